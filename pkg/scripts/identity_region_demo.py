"""Trace the achievable rate region of a small compound QMAC.

Builds the identity QMAC and the {identity, dephasing-on-B} pair, traces
both regions at blocking level 1, and writes CSV/SVG next to this script.

Usage: python3 scripts/identity_region_demo.py [--budget N] [--seed S]
"""

import argparse
from pathlib import Path

from cqmac.channels import (
    CompoundSet,
    channel_tensor,
    dephasing_channel,
    identity_channel,
)
from cqmac.optimizer import pareto_trace
from cqmac.regions import corners_csv, staircase_svg


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--budget", type=int, default=24)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--out-dir", default=str(Path(__file__).parent / "out"))
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    identity = channel_tensor(identity_channel(2), identity_channel(2))
    dephased = channel_tensor(identity_channel(2), dephasing_channel(full=True))
    weights = [(1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]

    for name, cset in (
        ("identity", CompoundSet((identity,), ("id",))),
        ("id_deph_pair", CompoundSet((identity, dephased), ("id", "dephB"))),
    ):
        result = pareto_trace(cset, 1, weights, budget=args.budget, seed=args.seed)
        rows = [
            (o.rect.r1_max, o.rect.r2_max, f"w{o.weights[0]:g}:{o.weights[1]:g}")
            for o in result.optima
        ]
        (out / f"{name}.csv").write_text(corners_csv(rows))
        (out / f"{name}.svg").write_text(staircase_svg(result.region, title=name))
        print(f"{name}: corners {result.region.corners()}")


if __name__ == "__main__":
    main()
