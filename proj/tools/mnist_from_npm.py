#!/usr/bin/env python3
"""Build the bundled MNIST subset (IDX format) from the `mnist` npm package.

The npm package (MIT, Juan Cazala) ships real MNIST digits as JSON arrays of
grey levels in [0, 1] rounded to three decimals. This script re-quantizes them
to bytes and writes balanced, seeded-shuffled train/eval IDX file pairs.

    npm pack mnist && tar xzf mnist-*.tgz
    python3 tools/mnist_from_npm.py package/src/digits data/mnist
"""
import json
import random
import struct
import sys
from pathlib import Path

TRAIN_PER_CLASS = 100
EVAL_PER_CLASS = 50
SEED = 20240601


def write_idx(out_dir: Path, stem: str, images, labels):
    with open(out_dir / f"{stem}-images-idx3-ubyte", "wb") as f:
        f.write(struct.pack(">IIII", 0x00000803, len(images), 28, 28))
        for img in images:
            f.write(bytes(img))
    with open(out_dir / f"{stem}-labels-idx1-ubyte", "wb") as f:
        f.write(struct.pack(">II", 0x00000801, len(labels)))
        f.write(bytes(labels))


def main():
    src, dst = Path(sys.argv[1]), Path(sys.argv[2])
    dst.mkdir(parents=True, exist_ok=True)
    train, evals = [], []
    for digit in range(10):
        data = json.loads((src / f"{digit}.json").read_text())["data"]
        count = len(data) // 784
        for k in range(TRAIN_PER_CLASS + EVAL_PER_CLASS):
            px = data[k * 784:(k + 1) * 784]
            img = [max(0, min(255, round(v * 255))) for v in px]
            (train if k < TRAIN_PER_CLASS else evals).append((img, digit))
        assert count >= TRAIN_PER_CLASS + EVAL_PER_CLASS
    rng = random.Random(SEED)
    rng.shuffle(train)
    rng.shuffle(evals)
    write_idx(dst, "train", [i for i, _ in train], [l for _, l in train])
    write_idx(dst, "eval", [i for i, _ in evals], [l for _, l in evals])


if __name__ == "__main__":
    main()
