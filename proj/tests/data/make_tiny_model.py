"""Regenerates the tiny ONNX embedder used by the external-model tests.

Writes tiny_embedder.onnx, its preprocessing sidecar, and reference
embeddings for a deterministic probe image computed with PyTorch.

    python3 tests/data/make_tiny_model.py
"""
import json
import pathlib

import numpy as np
import torch

HERE = pathlib.Path(__file__).resolve().parent
SIZE = 16
DIM = 8


class TinyEmbedder(torch.nn.Module):
    def __init__(self):
        super().__init__()
        self.conv = torch.nn.Conv2d(3, 4, 3, padding=1)
        self.fc = torch.nn.Linear(4 * SIZE * SIZE, DIM)

    def forward(self, x):
        return self.fc(torch.relu(self.conv(x)).flatten(1))


def probe_image():
    """RGB probe, channel-planar, values (7r + 13c + 29ch) mod 256."""
    ch, r, c = np.meshgrid(np.arange(3), np.arange(SIZE), np.arange(SIZE), indexing="ij")
    return ((7 * r + 13 * c + 29 * ch) % 256).astype(np.float64)


def main():
    torch.manual_seed(0)
    model = TinyEmbedder().eval()
    torch.onnx.export(model, torch.zeros(1, 3, SIZE, SIZE), HERE / "tiny_embedder.onnx",
                      input_names=["input"], output_names=["embedding"], opset_version=13,
                      dynamo=False)
    sidecar = {"model_id": "tiny-embedder", "embedding_dim": DIM, "input_size": SIZE,
               "channel_order": "RGB", "mean": [0.5, 0.5, 0.5], "std": [0.5, 0.5, 0.5]}
    (HERE / "tiny_embedder.json").write_text(json.dumps(sidecar, indent=2) + "\n")

    x = (probe_image() / 255.0 - 0.5) / 0.5
    with torch.no_grad():
        ref = model(torch.from_numpy(x).float().unsqueeze(0))[0].double().tolist()
    (HERE / "tiny_embedder_probe.json").write_text(json.dumps({"embedding": ref}, indent=2) + "\n")


if __name__ == "__main__":
    main()
