#!/usr/bin/env python3
"""Dynamical-invariant report for the cat-map suspension (or the flat torus)."""

import argparse
import json

from weyllab import (CatMapSuspension, FlatTorus, InvariantReport, bowen_entropy,
                     ehrenfest_time, inequality_report, lyapunov_spectrum,
                     max_expansion_rate, positive_sum_chi, substream)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--model", choices=["catmap", "torus"], default="catmap")
    ap.add_argument("--seed", type=int, default=11)
    ap.add_argument("--samples", type=int, default=8000)
    ap.add_argument("--h", type=float, default=1e-3)
    args = ap.parse_args()

    model = CatMapSuspension() if args.model == "catmap" else FlatTorus(2)
    er = max_expansion_rate(model, t_max=30.0, orbit_samples=100, seed=args.seed)
    st = model.liouville_sample(substream(args.seed, 0))
    lyap = lyapunov_spectrum(model, st, t_max=100.0, renorm_step=0.5)
    if args.model == "catmap":
        ent = bowen_entropy(model, T_list=[2.0, 3.0, 4.0, 5.0],
                            eps_list=[0.5, 0.4], samples=args.samples,
                            seed=args.seed)
    else:
        ent = bowen_entropy(model, T_list=[40.0, 50.0, 60.0],
                            eps_list=[3.0, 2.5], samples=min(args.samples, 2500),
                            seed=args.seed)
    report = InvariantReport(lambda_max=er.rate, lyapunov=tuple(lyap),
                             chi=positive_sum_chi(lyap), h_top=ent.h_top,
                             m=model.dim_level, t_horizon=100.0)
    checks = inequality_report(report, anosov_flag=(args.model == "catmap"))
    t_e = ehrenfest_time(er.rate, 0.01, args.h, polynomial_flag=er.polynomial)
    payload = {
        "model": model.label,
        "lambda_max": er.rate,
        "polynomial_growth": er.polynomial,
        "lyapunov": list(lyap),
        "chi": report.chi,
        "h_top": ent.h_top,
        "entropy_caveat": ent.caveat,
        "ehrenfest_time": t_e,
        "inequalities": [{"name": n, "lhs": l, "rhs": r, "pass": ok}
                         for (n, l, r, ok) in checks],
    }
    print(json.dumps(payload, indent=2))


if __name__ == "__main__":
    main()
