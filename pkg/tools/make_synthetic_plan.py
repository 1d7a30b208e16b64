#!/usr/bin/env python3
"""Regenerate the bundled synthetic floorplan layers.

Draws a 320x320 two-gallery exhibition floor and writes the six layer
PNGs plus plan.conf into src/gallerysim/data/synthetic/. Deterministic:
rerunning reproduces the committed files byte for byte (PNG encoder
permitting).
"""

import os

import numpy as np
from PIL import Image

SIZE = 320
OUT_DIR = os.path.join(os.path.dirname(__file__), "..", "src", "gallerysim",
                       "data", "synthetic")

REGION_COLORS = [(255, 128, 0), (0, 128, 255)]
BOUNDARY_COLORS = [(255, 0, 255), (0, 200, 200)]


def rect(mask, r0, r1, c0, c1, value=True):
    mask[r0:r1 + 1, c0:c1 + 1] = value


def main():
    structure = np.zeros((SIZE, SIZE), dtype=bool)
    window = np.zeros((SIZE, SIZE), dtype=bool)
    exhibit = np.zeros((SIZE, SIZE), dtype=bool)
    region = np.zeros((SIZE, SIZE, 3), dtype=np.uint8) + 255
    boundary = np.zeros((SIZE, SIZE, 3), dtype=np.uint8) + 255

    # outer walls, 4 px thick
    rect(structure, 0, 3, 0, SIZE - 1)
    rect(structure, SIZE - 4, SIZE - 1, 0, SIZE - 1)
    rect(structure, 0, SIZE - 1, 0, 3)
    rect(structure, 0, SIZE - 1, SIZE - 4, SIZE - 1)

    # glazing: east facade strip, north clerestory, and a light court
    rect(window, 60, 260, SIZE - 4, SIZE - 1)
    rect(structure, 60, 260, SIZE - 4, SIZE - 1, False)
    rect(window, 0, 3, 100, 220)
    rect(structure, 0, 3, 100, 220, False)
    rect(window, 240, 260, 200, 230)

    # gallery A: outer ring rows/cols 40..150, interior 44..146,
    # opening in the south wall at cols 88..102
    rect(structure, 40, 150, 40, 150)
    rect(structure, 44, 146, 44, 146, False)
    rect(structure, 147, 150, 88, 102, False)
    rect(region[:, :, 0], 44, 146, 44, 146, REGION_COLORS[0][0])
    rect(region[:, :, 1], 44, 146, 44, 146, REGION_COLORS[0][1])
    rect(region[:, :, 2], 44, 146, 44, 146, REGION_COLORS[0][2])
    for ch in range(3):
        rect(boundary[:, :, ch], 147, 150, 88, 102, BOUNDARY_COLORS[0][ch])

    # gallery B: ring rows 60..200, cols 190..300, interior rows 64..196,
    # cols 194..296, opening in the west wall at rows 120..134
    rect(structure, 60, 200, 190, 300)
    rect(structure, 64, 196, 194, 296, False)
    rect(structure, 120, 134, 190, 193, False)
    for ch in range(3):
        rect(region[:, :, ch], 64, 196, 194, 296, REGION_COLORS[1][ch])
        rect(boundary[:, :, ch], 120, 134, 190, 193, BOUNDARY_COLORS[1][ch])

    # exhibits: three 9x9 plinths per gallery
    for r0, c0 in ((60, 60), (60, 120), (110, 88)):
        rect(exhibit, r0, r0 + 8, c0, c0 + 8)
    for r0, c0 in ((80, 210), (80, 270), (150, 240)):
        rect(exhibit, r0, r0 + 8, c0, c0 + 8)

    # free-standing columns on the open floor
    for r0, c0 in ((220, 80), (220, 160), (220, 240), (100, 170)):
        rect(structure, r0, r0 + 3, c0, c0 + 3)

    def save_binary(mask, name):
        img = np.where(mask[:, :, None], 0, 255).astype(np.uint8)
        Image.fromarray(np.repeat(img, 3, axis=2), mode="RGB").save(
            os.path.join(OUT_DIR, name))

    def save_rgb(arr, name):
        Image.fromarray(arr, mode="RGB").save(os.path.join(OUT_DIR, name))

    composite = np.full((SIZE, SIZE, 3), 255, dtype=np.uint8)
    composite[window] = (255, 0, 0)
    composite[exhibit] = (0, 255, 0)
    composite[structure] = (0, 0, 0)

    os.makedirs(OUT_DIR, exist_ok=True)
    save_binary(structure, "structure.png")
    save_binary(window, "window.png")
    save_binary(exhibit, "exhibit.png")
    save_rgb(region, "region.png")
    save_rgb(boundary, "boundary.png")
    save_rgb(composite, "floorplan.png")

    with open(os.path.join(OUT_DIR, "plan.conf"), "w") as fh:
        fh.write("""# synthetic two-gallery exhibition floor, 320x320 cells
window = window.png
structure = structure.png
exhibit = exhibit.png
region = region.png
boundary = boundary.png
floorplan = floorplan.png

# elevator lobby, bottom-left: agents start and leave here
spawn = 12,284,40,308
exit = 12,284,40,308

seed = 0
max_ticks = 10000
spawn_interval = 50
spawn_threshold = 30
spawn_batch_max = 10
weight = 10
noise_variance = 1000
noise = on
convergence_interval = 1000
convergence_epsilon = 1e-3
""")
    print(f"wrote layers to {os.path.abspath(OUT_DIR)}")


if __name__ == "__main__":
    main()
