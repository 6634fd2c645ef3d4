#include <mutex>

#include <opencv2/core.hpp>
#include <opencv2/dnn.hpp>

#include "freqx/embedder.hpp"
#include "freqx/errors.hpp"

namespace freqx {

namespace {

class OnnxEmbedder final : public EmbeddingBackend {
 public:
  OnnxEmbedder(cv::dnn::Net net, BackendDescriptor descriptor)
      : net_(std::move(net)), descriptor_(std::move(descriptor)) {}

  Embedding embed(const SpatialImage& img) const override {
    const auto& cfg = descriptor_.preprocess;
    if (img.channels() != 3) throw DimensionError("model input must have 3 channels");
    std::vector<float> input = preprocess(img, cfg);
    const int side = cfg.expected_size > 0 ? cfg.expected_size : img.size();
    const int shape[] = {1, 3, side, side};
    cv::Mat blob(4, shape, CV_32F, input.data());

    cv::Mat output;
    {
      std::lock_guard lock(mutex_);
      try {
        net_.setInput(blob);
        output = net_.forward().clone();
      } catch (const cv::Exception& e) {
        throw ModelError("model forward pass failed: " + std::string(e.what()));
      }
    }
    output = output.reshape(1, 1);
    if (output.cols != descriptor_.embedding_dim) {
      throw ModelError("model produced " + std::to_string(output.cols) +
                       " values, sidecar declares " + std::to_string(descriptor_.embedding_dim));
    }
    Embedding e;
    e.model_id = descriptor_.model_id;
    e.values.resize(output.cols);
    const float* src = output.ptr<float>(0);
    for (int i = 0; i < output.cols; ++i) e.values[i] = src[i];
    return e;
  }

  const BackendDescriptor& descriptor() const override { return descriptor_; }
  bool thread_safe() const override { return false; }

 private:
  mutable cv::dnn::Net net_;
  mutable std::mutex mutex_;
  BackendDescriptor descriptor_;
};

}  // namespace

std::unique_ptr<EmbeddingBackend> external_model_embedder(const std::filesystem::path& model_file,
                                                          const ModelSidecar& sidecar,
                                                          ResizePolicy policy) {
  if (!std::filesystem::exists(model_file)) throw IoError("model file not found: " + model_file.string());
  cv::dnn::Net net;
  try {
    net = cv::dnn::readNetFromONNX(model_file.string());
  } catch (const cv::Exception& e) {
    throw ModelError("cannot load model " + model_file.string() + ": " + e.what());
  }
  if (net.empty()) throw ModelError("cannot load model " + model_file.string());
  net.setPreferableBackend(cv::dnn::DNN_BACKEND_OPENCV);
  net.setPreferableTarget(cv::dnn::DNN_TARGET_CPU);

  BackendDescriptor descriptor;
  descriptor.model_id = sidecar.model_id;
  descriptor.embedding_dim = sidecar.embedding_dim;
  descriptor.preprocess = sidecar.preprocess_config(policy);
  return std::make_unique<OnnxEmbedder>(std::move(net), std::move(descriptor));
}

}  // namespace freqx
