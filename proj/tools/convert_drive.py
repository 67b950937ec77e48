#!/usr/bin/env python3
"""Convert an extracted DRIVE archive (TIF images, GIF masks and manuals) to
the PNG tree read by `vesseltrace evaluate`/`sweep`.

    python3 tools/convert_drive.py /data/DRIVE /data/DRIVE_png

Stems are kept, only the extension changes. Color images are written as RGB,
masks and manual segmentations as 8-bit grayscale.
"""

import argparse
import sys
from pathlib import Path

from PIL import Image

SUBDIRS = {
    "images": "RGB",
    "mask": "L",
    "1st_manual": "L",
    "2nd_manual": "L",
}
SPLITS = ("test", "training")
SOURCE_EXT = {".tif", ".tiff", ".gif", ".png", ".ppm", ".pgm"}


def convert_tree(src: Path, dst: Path) -> int:
    count = 0
    for split in SPLITS:
        for sub, mode in SUBDIRS.items():
            folder = src / split / sub
            if not folder.is_dir():
                continue
            out_dir = dst / split / sub
            out_dir.mkdir(parents=True, exist_ok=True)
            for path in sorted(folder.iterdir()):
                if path.suffix.lower() not in SOURCE_EXT:
                    continue
                with Image.open(path) as im:
                    im.convert(mode).save(out_dir / (path.stem + ".png"))
                count += 1
    return count


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("src", type=Path, help="DRIVE root containing test/ and training/")
    ap.add_argument("dst", type=Path, help="output root")
    args = ap.parse_args()
    if not (args.src / "test").is_dir():
        print(f"{args.src}: no test/ directory", file=sys.stderr)
        return 2
    n = convert_tree(args.src, args.dst)
    print(f"wrote {n} files under {args.dst}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
