#!/usr/bin/env python3
"""Convert BSDS500 ground-truth .mat files into segfuse group directories.

    python3 scripts/bsds500_to_png.py BSR/BSDS500/data/groundTruth/test out/bsds500

Each `<id>.mat` becomes `out/<id>/annotator<j>.png`, a 16-bit grayscale label
image (labels start at 1). Requires numpy, scipy and Pillow.
"""

import sys
from pathlib import Path

import numpy as np
from PIL import Image
from scipy.io import loadmat


def convert(src: Path, out: Path) -> int:
    written = 0
    for mat in sorted(src.glob("*.mat")):
        truth = loadmat(mat)["groundTruth"][0]
        group = out / mat.stem
        group.mkdir(parents=True, exist_ok=True)
        for j, entry in enumerate(truth):
            seg = np.asarray(entry["Segmentation"][0, 0], dtype=np.uint16)
            Image.fromarray(seg).save(group / f"annotator{j}.png")
            written += 1
    return written


def main() -> None:
    if len(sys.argv) != 3:
        sys.exit(__doc__)
    n = convert(Path(sys.argv[1]), Path(sys.argv[2]))
    print(f"wrote {n} segmentations")


if __name__ == "__main__":
    main()
