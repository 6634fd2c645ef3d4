#pragma once

#include <stdexcept>
#include <string>

namespace freqx {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Image or spectrum shape does not fit the operation.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A spectrum would reconstruct to complex-valued pixels.
class SymmetryError : public Error {
 public:
  using Error::Error;
};

// Out-of-range hyper-parameter (band size, factor, target rate, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Zero embedding vector; cosine similarity is undefined.
class DegenerateEmbeddingError : public Error {
 public:
  using Error::Error;
};

// Profile carries no influence, so no ordering can be derived from it.
class OrderingUnavailableError : public Error {
 public:
  using Error::Error;
};

// Score sets unusable for a verification metric.
class MetricError : public Error {
 public:
  using Error::Error;
};

// Files that cannot be read, decoded or parsed.
class IoError : public Error {
 public:
  using Error::Error;
};

class ModelError : public Error {
 public:
  using Error::Error;
};

}  // namespace freqx
