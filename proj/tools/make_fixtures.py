#!/usr/bin/env python3
# Copyright 2026 The pkache-sim Authors
# SPDX-License-Identifier: Apache-2.0
"""Regenerates the synthetic PLAIN trace fixtures under tests/fixtures."""

import argparse
import pathlib

import numpy as np

EVENTS = 10_000


def zipf_keys(rng, n, s, size):
    weights = np.arange(1, n + 1, dtype=np.float64) ** -s
    return rng.choice(n, size=size, p=weights / weights.sum()) + 1


def db_mix(rng):
    # skewed point lookups interleaved with short sequential range reads
    out = []
    hot = zipf_keys(rng, 4000, 0.8, EVENTS)
    i = 0
    while len(out) < EVENTS:
        if rng.random() < 0.05:
            start = int(rng.integers(100_000, 200_000))
            out.extend(range(start, start + int(rng.integers(4, 32))))
        else:
            out.append(int(hot[i]) * 7919)
            i += 1
    return out[:EVENTS]


def loop_scan(rng):
    # repeated loops of different lengths plus random noise
    out = []
    loops = [range(1, 301), range(1000, 1900), range(5000, 5060)]
    while len(out) < EVENTS:
        loop = loops[int(rng.integers(0, len(loops)))]
        out.extend(loop)
        out.extend(int(k) for k in rng.integers(10_000, 60_000, size=int(rng.integers(10, 200))))
    return out[:EVENTS]


def shifting_hotspot(rng):
    # Zipf popularity whose hot set drifts every 2000 events; raw keys are
    # wide and include 0 to exercise remapping
    out = []
    for phase in range(EVENTS // 2000):
        ranks = zipf_keys(rng, 20_000, 1.0, 2000)
        offset = phase * 1500
        out.extend(((int(r) + offset) * 2654435761) % (2**64) for r in ranks)
    out[17] = 0
    return out


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "tests" / "fixtures"))
    parser.add_argument("--seed", type=int, default=20260101)
    args = parser.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for offset, (name, fn) in enumerate([("db_mix", db_mix), ("loop_scan", loop_scan),
                                         ("shifting_hotspot", shifting_hotspot)]):
        keys = fn(np.random.default_rng(args.seed + offset))
        assert len(keys) == EVENTS
        (out / f"{name}.txt").write_text("".join(f"{k}\n" for k in keys))


if __name__ == "__main__":
    main()
