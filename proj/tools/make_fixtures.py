"""Regenerates the natural-image fixtures under data/ from scikit-image's bundled samples."""
import os

import numpy as np
from PIL import Image
from skimage import data

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.join(HERE, "..", "data")


def box_downsample(img, k):
    h, w = img.shape[0] // k * k, img.shape[1] // k * k
    img = img[:h, :w].astype(np.float64)
    return img.reshape(h // k, k, w // k, k, -1).mean(axis=(1, 3))


def save(arr, name):
    arr = np.clip(np.rint(arr), 0, 255).astype(np.uint8)
    if arr.shape[-1] == 1:
        arr = arr[..., 0]
    Image.fromarray(arr).save(os.path.join(OUT, name))


def main():
    os.makedirs(OUT, exist_ok=True)
    astro = box_downsample(data.astronaut(), 4)  # 128x128x3
    save(astro, "astronaut_128.png")
    save(astro[16:80, 40:104], "astronaut_64.png")
    coffee = box_downsample(data.coffee(), 4)  # 100x150x3
    save(coffee[18:82, 60:124], "coffee_64.png")


if __name__ == "__main__":
    main()
