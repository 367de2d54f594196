#!/usr/bin/env python3
"""Regenerates the bundled scenario files under scenarios/."""

import argparse
import json
import math
import random
from pathlib import Path


def grid_rows(width_m, height_m, resolution, blocked):
    """Row strings (top row first). `blocked(x, y)` is evaluated at cell centers; the border is walled."""
    w = round(width_m / resolution)
    h = round(height_m / resolution)
    rows = []
    for iy in reversed(range(h)):
        line = []
        for ix in range(w):
            x = (ix + 0.5) * resolution
            y = (iy + 0.5) * resolution
            border = ix == 0 or iy == 0 or ix == w - 1 or iy == h - 1
            line.append("#" if border or blocked(x, y) else ".")
        rows.append("".join(line))
    return {"resolution": resolution, "origin": [0.0, 0.0], "rows": rows}


def two_corridor():
    # Divider wall splits the map into a landmark-free lower corridor (the direct route) and a
    # landmark-rich upper corridor.
    def blocked(x, y):
        return 3.5 <= x <= 27.0 and 7.5 <= y <= 8.5

    landmarks = [[float(x), 12.5] for x in range(7, 28, 2)]
    landmarks += [[float(x), 14.5] for x in range(8, 27, 4)]
    return {
        "grid": grid_rows(32.0, 16.0, 0.5, blocked),
        "landmarks": landmarks,
        "pedestrians": [],
        "robot_start": [2.0, 6.0, 0.0],
        "goal": [30.0, 6.0],
        "params": {
            "w1": 60.0,
            "w2": 0.0,
            "w3": 1.0,
            "uncertainty_threshold": 0.12,
            "sensor_range": 6.0,
            "initial_covariance": [0.06, 0.06, 0.02],
            "process_noise": [0.001, 0.001, 0.0001],
            "robot_radius": 0.4,
            "range_variance": 0.01,
            "bearing_variance": 0.001,
            "tick_limit": 240,
        },
    }


def crowd_block():
    def blocked(x, y):
        return False

    landmarks = [[float(x), float(y)] for x in range(2, 30, 4) for y in (1.5, 12.5)]
    cluster = [(13.4, 6.6), (14.2, 7.4), (14.6, 6.5), (13.6, 7.6), (15.0, 7.2), (14.0, 6.0)]
    peds = []
    for i, (x, y) in enumerate(cluster):
        # Small loops in place: the group drifts but stays astride the direct route.
        peds.append({
            "id": i,
            "start": [x, y],
            "speed": 0.2,
            "waypoints": [[x + 0.3, y], [x + 0.3, y + 0.3], [x, y + 0.3], [x, y]],
        })
    return {
        "grid": grid_rows(30.0, 14.0, 0.5, blocked),
        "landmarks": landmarks,
        "pedestrians": peds,
        "robot_start": [2.0, 7.0, 0.0],
        "goal": [28.0, 7.0],
        "params": {
            "w1": 60.0,
            "w2": 400.0,
            "w3": 1.0,
            "initial_covariance": [0.01, 0.01, 0.005],
            "tick_limit": 240,
        },
    }


def corridor_with_crowd(count, seed):
    """A 40 m hallway with pillars and `count` pedestrians walking its length in both directions."""
    rng = random.Random(seed)

    def blocked(x, y):
        # Pillars along both walls.
        for px in range(6, 38, 8):
            if abs(x - px) <= 0.5 and (y <= 1.5 or y >= 10.5):
                return True
        return False

    landmarks = [[float(x), y] for x in range(3, 40, 3) for y in (1.0, 11.0)]
    peds = []
    for i in range(count):
        lane = rng.uniform(2.0, 10.0)
        a = rng.uniform(4.0, 36.0)
        b = rng.uniform(4.0, 36.0)
        while abs(a - b) < 8.0:
            b = rng.uniform(4.0, 36.0)
        peds.append({
            "id": i,
            "start": [round(a, 3), round(lane, 3)],
            "speed": round(rng.uniform(0.4, 1.2), 3),
            "waypoints": [[round(b, 3), round(lane + rng.uniform(-0.5, 0.5), 3)], [round(a, 3), round(lane, 3)]],
        })
    return {
        "grid": grid_rows(42.0, 12.0, 0.5, blocked),
        "landmarks": landmarks,
        "pedestrians": peds,
        "robot_start": [1.5, 6.0, 0.0],
        "goal": [40.5, 6.0],
        "params": {
            "w1": 60.0,
            "w2": 200.0,
            "w3": 1.0,
            "tree_budget": 800,
            "tick_limit": 300,
        },
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "scenarios")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    files = {
        "two_corridor.json": two_corridor(),
        "crowd_block.json": crowd_block(),
        "env_corridor_27.json": corridor_with_crowd(27, 7),
        "hallway_30.json": corridor_with_crowd(30, 11),
    }
    for name, doc in files.items():
        (args.out / name).write_text(json.dumps(doc, indent=1) + "\n")
        print(args.out / name)


if __name__ == "__main__":
    main()
