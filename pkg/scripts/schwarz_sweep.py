"""Schwarz ratio sweeps for disk maps into the disk and into the exponential family.

Writes one JSON report, CSV table and SVG heatmap per suite to --out.

    python3 scripts/schwarz_sweep.py --out runs/schwarz
"""

import argparse
from pathlib import Path

from finslerium.chern import curvature_bound_estimate
from finslerium.io import dumps
from finslerium.maps import embed_map, mobius_map, power_map
from finslerium.metrics import SamplePlan, exp_family, poincare_disk
from finslerium.schwarz import SchwarzConfig, schwarz_check


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("runs/schwarz"))
    ap.add_argument("--samples", type=int, default=400)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    P = poincare_disk()
    plan = SamplePlan(args.samples, 0.99, args.seed)
    suites = {f"disk-{f.name.replace(':', '')}": (f, P, SchwarzConfig(-4, -4, plan=plan))
              for f in (power_map(2), power_map(3), mobius_map(0.5))}
    for a, b in ((1.0, 0.5), (2.0, -0.3)):
        H = exp_family(a, b, 1.0, 2)
        K2 = curvature_bound_estimate(H, SamplePlan(100, 1.0, args.seed)).sup
        for c in ((2 ** -0.5, 2 ** -0.5), (1.0, 0.0), (0.6, 0.8j)):
            f = embed_map(c)
            suites[f"expfam-{a:g}-{b:g}-{f.name.replace(':', '').replace(',', '_')}"] = (f, H, SchwarzConfig(-4, K2, plan=plan))
    print(f"{'suite':<40} {'bound':>8} {'max ratio':>10} verdict")
    for name, (f, H, cfg) in suites.items():
        rep = schwarz_check(f, P, H, cfg)
        (args.out / f"{name}.json").write_text(dumps(rep.to_dict()))
        (args.out / f"{name}.csv").write_text(rep.to_csv())
        (args.out / f"{name}.svg").write_text(rep.to_svg())
        print(f"{name:<40} {rep.bound:8.4f} {rep.max_ratio:10.6f} {'pass' if rep.verdict else 'FAIL'}")


if __name__ == "__main__":
    main()
