#!/usr/bin/env python3
"""
Script to write the sample problem files under problems/
"""
import os
import sys
import argparse

# Add parent directory to path
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from cli.report import dumps
from utils.logger import setup_logger

logger = setup_logger("make_problems")

CUBE_ROOT_TWO = 2.0 ** (1.0 / 3.0)

PROBLEMS = {
    "hilbert_extend.json": {
        "model": {"weights": [1.0, 1.0], "structure": {"kind": "hilbert"}},
        "subspace": {"basis": [[1.0, 0.0]]},
        "action": {"action": [1.0]},
        "params": {"probe": 10},
        "seed": 1,
    },
    "lebesgue3_extend.json": {
        "model": {"weights": [1.0, 1.0, 1.0], "structure": {"kind": "lebesgue", "p": 3.0}},
        "subspace": {"basis": [[1.0, 1.0, 0.0]]},
        "action": {"action": [CUBE_ROOT_TWO]},
        "params": {"probe": 100},
        "seed": 1,
    },
    "lebesgue3_dualize.json": {
        "model": {"weights": [0.5, 1.0, 2.0], "structure": {"kind": "lebesgue", "p": 3.0}},
        "functional": {"values": [1.0, -2.0, 0.5]},
        "seed": 1,
    },
    "orlicz_mixed_norm.json": {
        "model": {"weights": [0.5, 1.0, 2.0],
                  "structure": {"kind": "orlicz", "young": {"family": "mixed", "p": 2.0, "r": 4.0}}},
        "input": {"values": [1.0, -2.0, 0.5]},
        "functional": {"values": [0.3, 1.0, -0.7]},
        "seed": 1,
    },
    "hilbert_modulus.json": {
        "model": {"weights": [1.0, 1.0], "structure": {"kind": "hilbert"}},
        "params": {"eps": 1.0, "samples": 2000},
        "seed": 7,
    },
}


def main():
    parser = argparse.ArgumentParser(description="Write sample problem files")
    parser.add_argument("--out-dir", default="problems", help="Destination directory")
    args = parser.parse_args()

    os.makedirs(args.out_dir, exist_ok=True)
    for name, problem in PROBLEMS.items():
        path = os.path.join(args.out_dir, name)
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(dumps(problem))
        logger.info(f"✓ {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
