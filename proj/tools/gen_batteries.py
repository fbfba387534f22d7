#!/usr/bin/env python3
"""Writes the synthetic scene batteries used by the eval harness tests.

Output is fully determined by the seeds below, so re-running the script
reproduces the checked-in files exactly.

    python3 tools/gen_batteries.py [--out tests/data]
"""

import argparse
import json
import random
import struct
import zlib
from pathlib import Path

LABELS = ["cup", "bicycle", "dog", "umbrella", "clock", "backpack", "bottle", "kite", "bench", "vase"]
GRID = 20
K = 2


def write_scene(path: Path, scene: dict) -> None:
    path.write_text(json.dumps(scene, indent=2) + "\n")


def fragmented_scene(rng: random.Random, idx: int) -> dict:
    """Unit targets centred on low-lattice corners, each inside one coarse cell.

    Every target touches four low cells, so a low crop only ever sees a
    quarter of it while the enclosing coarse crop sees the whole object.
    """
    coarse = GRID // K
    count = rng.randint(2, 4)
    cells = rng.sample([(r, c) for r in range(coarse) for c in range(coarse)], count)
    targets = []
    for r, c in cells:
        x0 = c * K + 0.5
        y0 = r * K + 0.5
        targets.append({
            "rect": [x0, y0, x0 + 1.0, y0 + 1.0],
            "label": rng.choice(LABELS),
            "coherence": 0.5,
            "distractor": False,
        })
    return {
        "scene_id": f"frag_{idx:03d}",
        "grid_h": GRID,
        "grid_w": GRID,
        "background_level": 0.3,
        "noise_level": 0.15,
        "noise_seed": rng.getrandbits(48),
        "targets": targets,
    }


def distractor_scene(rng: random.Random, idx: int, hard: bool) -> dict:
    """High background, faint true targets and, in hard scenes, bright decoys.

    Decoys are whole coarse cells the embedder rates as perfect matches; the
    detector never reports them.
    """
    coarse = GRID // K
    free = [(r, c) for r in range(coarse) for c in range(coarse)]
    rng.shuffle(free)
    targets = []
    for _ in range(rng.randint(1, 2)):
        r, c = free.pop()
        # Straddle a coarse boundary when possible so no crop encloses the target.
        x0 = c * K + (1.0 if c + 1 < coarse else 0.0)
        y0 = r * K + (1.0 if r + 1 < coarse else 0.0)
        targets.append({
            "rect": [x0, y0, x0 + 2.0, y0 + 2.0],
            "label": rng.choice(LABELS),
            "coherence": round(rng.uniform(0.1, 0.3), 3),
            "distractor": False,
        })
    occupied = {(t["rect"][1] // K, t["rect"][0] // K) for t in targets}
    occupied |= {((t["rect"][3] - 1) // K, (t["rect"][2] - 1) // K) for t in targets}
    if hard:
        decoys = [cell for cell in free if cell not in occupied][: rng.randint(4, 6)]
        for r, c in decoys:
            targets.append({
                "rect": [float(c * K), float(r * K), float(c * K + K), float(r * K + K)],
                "label": "decoy",
                "coherence": 1.0,
                "distractor": True,
            })
    return {
        "scene_id": f"dist_{idx:03d}",
        "grid_h": GRID,
        "grid_w": GRID,
        "background_level": 0.6,
        "noise_level": round(rng.uniform(0.1, 0.3), 3),
        "noise_seed": rng.getrandbits(48),
        "targets": targets,
    }


def e2e_scene() -> dict:
    """20x20 scene for the 4480x4480 end-to-end run at 224 px crops."""
    return {
        "scene_id": "e2e_hr4k",
        "grid_h": GRID,
        "grid_w": GRID,
        "background_level": 0.25,
        "noise_level": 0.2,
        "noise_seed": 4480,
        "query": "What color is the umbrella next to the bench?",
        "targets": [
            {"rect": [5.5, 3.5, 6.5, 4.5], "label": "umbrella", "coherence": 0.5, "distractor": False},
            {"rect": [12.0, 14.0, 15.0, 15.5], "label": "bench", "coherence": 0.7, "distractor": False},
            {"rect": [16.0, 2.0, 18.0, 4.0], "label": "kite", "coherence": 1.0, "distractor": True},
        ],
    }


def fixture_scene() -> dict:
    """6x8 scene matching fixture_850x650.png at 112 px crops (padded to 896x672)."""
    return {
        "scene_id": "fixture",
        "grid_h": 6,
        "grid_w": 8,
        "background_level": 0.3,
        "noise_level": 0.1,
        "noise_seed": 850650,
        "targets": [
            {"rect": [2.5, 1.5, 3.5, 2.5], "label": "cup", "coherence": 0.5, "distractor": False},
            {"rect": [6.0, 4.0, 7.5, 5.0], "label": "bottle", "coherence": 0.8, "distractor": False},
        ],
    }


def write_png(path: Path, width: int, height: int, pixel) -> None:
    """Minimal 8-bit RGB PNG writer (stdlib only)."""
    rows = bytearray()
    for y in range(height):
        rows.append(0)
        for x in range(width):
            rows.extend(pixel(x, y))

    def chunk(tag: bytes, data: bytes) -> bytes:
        return struct.pack(">I", len(data)) + tag + data + struct.pack(">I", zlib.crc32(tag + data) & 0xFFFFFFFF)

    header = struct.pack(">IIBBBBB", width, height, 8, 2, 0, 0, 0)
    path.write_bytes(b"\x89PNG\r\n\x1a\n" + chunk(b"IHDR", header) +
                     chunk(b"IDAT", zlib.compress(bytes(rows), 9)) + chunk(b"IEND", b""))


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "tests" / "data"))
    args = ap.parse_args()
    out = Path(args.out)

    frag_dir = out / "fragmented"
    dist_dir = out / "distractor"
    for d in (frag_dir, dist_dir):
        d.mkdir(parents=True, exist_ok=True)
        for old in d.glob("*.json"):
            old.unlink()

    rng = random.Random(20240611)
    for i in range(50):
        write_scene(frag_dir / f"frag_{i:03d}.json", fragmented_scene(rng, i))

    rng = random.Random(7351)
    hard = [True] * 35 + [False] * 15
    rng.shuffle(hard)
    for i in range(50):
        write_scene(dist_dir / f"dist_{i:03d}.json", distractor_scene(rng, i, hard[i]))

    write_scene(out / "e2e_hr4k_scene.json", e2e_scene())
    write_scene(out / "fixture_scene.json", fixture_scene())
    write_png(out / "fixture_850x650.png", 850, 650,
              lambda x, y: (x * 255 // 849, y * 255 // 649, ((x // 53) ^ (y // 53)) & 1 and 200 or 40))


if __name__ == "__main__":
    main()
