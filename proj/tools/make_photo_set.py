#!/usr/bin/env python3
"""Builds the 20-photo, 432-piece evaluation set under data/photos432/.

Every source is a photograph redistributed inside an open-source Python
package. Each image is downscaled (Lanczos) so that it covers a 672x504
frame (504x672 for portrait sources), then center-cropped. With 28-pixel
tiles this gives 18x24 (or 24x18) = 432 pieces.

Usage: make_photo_set.py SOURCE_DIR OUT_DIR

SOURCE_DIR must contain the unpacked packages listed in SOURCES (wheels and
sdists fetched with `pip download` / the PyPI file host); the installed
scikit-image package is used directly.
"""
import os
import sys

from PIL import Image

SKIMAGE = os.path.join(os.path.dirname(__import__("skimage").__file__), "data")

# (output name, path relative to SOURCE_DIR or absolute)
SOURCES = [
    ("01_barbara", "sporco/data/barbara.png"),
    ("02_kodim23", "sporco/data/kodim23.png"),
    ("03_monarch", "sporco/data/monarch.png"),
    ("04_sail", "sporco/data/sail.png"),
    ("05_tulips", "sporco/data/tulips.png"),
    ("06_department_store", "mahotas/demos/data/DepartmentStore.jpg"),
    ("07_raccoon", "scipy/misc/face.dat"),
    ("08_hubble", os.path.join(SKIMAGE, "hubble_deep_field.jpg")),
    ("09_aloe", "opencv/samples/data/aloeL.jpg"),
    ("10_building", "opencv/samples/data/building.jpg"),
    ("11_notebook", "opencv/samples/data/ela_original.jpg"),
    ("12_graffiti", "opencv/samples/data/graf1.png"),
    ("13_leuven", "opencv/samples/data/leuvenA.jpg"),
    ("14_cat", "opencv/samples/dnn/dnn_model_runner/dnn_conversion/paddlepaddle/data/cat.jpg"),
    ("15_dog_bike", "opencv/doc/tutorials/dnn/dnn_yolo/images/yolo.jpg"),
    ("16_spaq", "pyiqa/tests/test_efficiency_img_dir/SPAQ_10241.jpg"),
    ("17_frame_a", "pyiqa/tests/test_efficiency_img_dir/frame_4wrwr48cdk6rbcjl.jpg"),
    ("18_frame_b", "pyiqa/tests/test_efficiency_img_dir/frame_7gzdcz9sif0ekg31.jpg"),
    ("19_frame_c", "pyiqa/tests/test_efficiency_img_dir/frame_9ogwhvvy7gfj6jzh.jpg"),
    ("20_signboard", "opencv/doc/tutorials/dnn/dnn_text_spotting/detect_test1.jpg"),
]

LONG, SHORT = 672, 504


def load(path):
    if path.endswith("face.dat"):
        import bz2
        import numpy as np
        with open(path, "rb") as f:
            raw = bz2.decompress(f.read())
        arr = np.frombuffer(raw, dtype="uint8").reshape(768, 1024, 3)
        return Image.fromarray(arr)
    return Image.open(path).convert("RGB")


def fit(img):
    w, h = img.size
    tw, th = (LONG, SHORT) if w >= h else (SHORT, LONG)
    scale = max(tw / w, th / h)
    nw, nh = max(tw, round(w * scale)), max(th, round(h * scale))
    img = img.resize((nw, nh), Image.LANCZOS)
    x0, y0 = (nw - tw) // 2, (nh - th) // 2
    return img.crop((x0, y0, x0 + tw, y0 + th))


def main():
    src, out = sys.argv[1], sys.argv[2]
    os.makedirs(out, exist_ok=True)
    for name, rel in SOURCES:
        path = rel if os.path.isabs(rel) else os.path.join(src, rel)
        fit(load(path)).save(os.path.join(out, name + ".png"), optimize=True)
        print(name)


if __name__ == "__main__":
    main()
