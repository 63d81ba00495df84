"""Command-line orchestration: runs experiments from JSON configs, writes CSV/JSON.

Commands: recurrence, invariants, spectrum, weyl, plan, returnmap,
scaling-fit, verify-bound.  Exit codes: 0 success, 2 configuration error,
3 numerical failure.  Every run writes a manifest listing the config hash and
the sha256 of each output; ``--check`` re-verifies a manifest.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .core import ConfigError, NumericalError, substream
from .invariants import (bowen_entropy, inequality_report, InvariantReport,
                         lyapunov_spectrum, max_expansion_rate, positive_sum_chi)
from .models import model_from_config
from .recurrence import (RecurrenceSpec, ScalingFit, extended_volume,
                         recurrence_volume, scaling_fit)
from .spectra import surfrev_count, sphere3_count, torus_count, weyl_leading
from .surfrev import first_return, return_map_grid, validate_profile
from .weyl import plan_parameters, remainder_series, verify_bound


def parse_grid(spec):
    """Grid values from a JSON list or a "start:stop:geom|lin:count" string."""
    if isinstance(spec, (list, tuple)):
        vals = [float(v) for v in spec]
        if not vals:
            raise ConfigError("grid must be non-empty")
        return vals
    if isinstance(spec, str):
        parts = spec.split(":")
        if len(parts) != 4:
            raise ConfigError(f"grid string must be start:stop:geom|lin:count, got {spec!r}")
        start, stop, kind, count = float(parts[0]), float(parts[1]), parts[2], int(parts[3])
        if count < 1:
            raise ConfigError("grid count must be >= 1")
        if kind == "geom":
            if start <= 0 or stop <= 0:
                raise ConfigError("geometric grids need positive endpoints")
            return list(np.geomspace(start, stop, count))
        if kind == "lin":
            return list(np.linspace(start, stop, count))
        raise ConfigError(f"unknown grid kind {kind!r}")
    raise ConfigError(f"cannot parse grid from {spec!r}")


def config_hash(cfg: dict) -> str:
    return hashlib.sha256(json.dumps(cfg, sort_keys=True).encode()).hexdigest()


def _fmt(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return str(x)


def write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(_fmt(v) for v in row) + "\n")
    return path


def _sha256(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(outdir: Path, cfg: dict, seed, outputs, t0) -> Path:
    manifest = {
        "config_hash": config_hash(cfg),
        "seed": seed,
        "versions": {
            "weyllab": __version__,
            "python": sys.version.split()[0],
            "numpy": np.__version__,
        },
        "wall_clock_s": time.time() - t0,
        "outputs": [{"path": str(Path(p).name), "sha256": _sha256(p)} for p in outputs],
    }
    path = outdir / "manifest.json"
    with open(path, "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
    return path


def check_manifest(outdir: Path) -> bool:
    path = outdir / "manifest.json"
    manifest = json.loads(path.read_text())
    ok = True
    for entry in manifest["outputs"]:
        p = outdir / entry["path"]
        if not p.exists() or _sha256(p) != entry["sha256"]:
            print(f"hash mismatch: {p}", file=sys.stderr)
            ok = False
    return ok


def _load_config(args) -> dict:
    if args.config is None:
        raise ConfigError("--config FILE is required")
    try:
        cfg = json.loads(Path(args.config).read_text())
    except OSError as e:
        raise ConfigError(f"cannot read config: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config is not valid JSON: {e}") from e
    if args.seed is not None:
        cfg["seed"] = args.seed
    # grid flags override their config entries
    for flag, key in (("t_grid", "T_grid"), ("eps_grid", "eps_grid"),
                      ("h_grid", "h_grid"), ("lambda_grid", "lambda_grid")):
        val = getattr(args, flag, None)
        if val is not None:
            cfg[key] = val
    return cfg


def _outdir(args) -> Path:
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# command handlers
# ---------------------------------------------------------------------------

def cmd_recurrence(args):
    t0 = time.time()
    cfg = _load_config(args)
    out = _outdir(args)
    model = model_from_config(cfg.get("model") or {})
    t_grid = parse_grid(cfg.get("T_grid"))
    eps_grid = parse_grid(cfg.get("eps_grid"))
    if "seed" not in cfg:
        raise ConfigError("recurrence needs a seed")
    seed = int(cfg["seed"])
    samples = int(cfg.get("samples", 10000))
    K = float(cfg.get("K", 2.0))
    method = cfg.get("method", "auto")
    extended = bool(cfg.get("extended", False))

    rows = []
    for T in sorted(t_grid):
        for eps in sorted(eps_grid):
            spec = RecurrenceSpec(T=T, eps=eps, surrogate_factor=K)
            fn = extended_volume if extended else recurrence_volume
            est = fn(model, spec, samples, seed, method=method)
            rows.append([model.label, T, eps, K, samples, seed, est.volume,
                         est.ci_low, est.ci_high, est.failed_samples])
    csv = write_csv(out / "recurrence.csv",
                    ["model", "T", "eps", "K", "samples", "seed", "volume",
                     "ci_low", "ci_high", "failed_samples"], rows)
    write_manifest(out, cfg, seed, [csv], t0)
    return 0


def cmd_invariants(args):
    t0 = time.time()
    cfg = _load_config(args)
    out = _outdir(args)
    model = model_from_config(cfg.get("model") or {})
    seed = int(cfg.get("seed", 0))
    er = max_expansion_rate(model, t_max=float(cfg.get("t_max", 30.0)),
                            orbit_samples=int(cfg.get("orbit_samples", 100)),
                            seed=seed)
    st = model.liouville_sample(substream(seed, 10 ** 6))
    lyap = lyapunov_spectrum(model, st, t_max=float(cfg.get("lyap_t_max", 100.0)),
                             renorm_step=float(cfg.get("renorm_step", 0.5)))
    chi = positive_sum_chi(lyap)
    ent_cfg = cfg.get("entropy") or {}
    ent = bowen_entropy(model,
                        T_list=parse_grid(ent_cfg.get("T_list", [2.0, 3.0, 4.0, 5.0])),
                        eps_list=parse_grid(ent_cfg.get("eps_list", [0.5, 0.4])),
                        samples=int(ent_cfg.get("samples", 4000)), seed=seed)
    flags = []
    if er.polynomial:
        flags.append("polynomial")
    if ent.caveat:
        flags.append("entropy-caveat")
    lyap3 = list(lyap) + [float("nan")] * max(0, 3 - len(lyap))
    rows = [[model.label, er.rate, lyap3[0], lyap3[1], lyap3[2], chi,
             ent.h_top, ";".join(flags) or "none"]]
    csv1 = write_csv(out / "invariants.csv",
                     ["model", "lambda_max", "lyap1", "lyap2", "lyap3", "chi",
                      "h_top", "flags"], rows)
    csv2 = write_csv(out / "entropy.csv", ["T", "eps", "N"], ent.table)
    write_manifest(out, cfg, seed, [csv1, csv2], t0)
    return 0


def _counts_for(model_cfg, lams):
    kind = model_cfg.get("kind")
    model = model_from_config(model_cfg)
    counts = []
    for lam in lams:
        if kind == "torus":
            N = torus_count(np.asarray(model.basis), math.sqrt(lam))
        elif kind == "sphere3":
            N = sphere3_count(lam)
        elif kind == "surfrev":
            N = surfrev_count(model.profile, lam)
        else:
            raise ConfigError(f"spectrum has no counting rule for kind {kind!r}")
        counts.append((lam, N))
    return model, counts


def _lambda_grid(cfg, args):
    if getattr(args, "h", None) is not None:
        return [1.0 / (args.h * args.h)]
    if getattr(args, "lam", None) is not None:
        return [args.lam]
    if "lambda_grid" in cfg:
        return parse_grid(cfg["lambda_grid"])
    if "h_grid" in cfg:
        return [1.0 / (h * h) for h in parse_grid(cfg["h_grid"])]
    raise ConfigError("need --h, --lambda, lambda_grid or h_grid")


def cmd_spectrum(args):
    t0 = time.time()
    cfg = _load_config(args)
    out = _outdir(args)
    lams = _lambda_grid(cfg, args)
    model, counts = _counts_for(cfg.get("model") or {}, lams)
    rows = []
    for lam, N in counts:
        h = 1.0 / math.sqrt(lam) if lam > 0 else float("nan")
        lead = weyl_leading(model, h) if 0 < h < 1 else float("nan")
        rows.append([model.label, h, lam, N, lead])
    csv = write_csv(out / "spectrum.csv", ["model", "h", "lambda", "count", "leading"],
                    rows)
    write_manifest(out, cfg, cfg.get("seed", 0), [csv], t0)
    return 0


def cmd_weyl(args):
    t0 = time.time()
    cfg = _load_config(args)
    out = _outdir(args)
    lams = _lambda_grid(cfg, args)
    model, counts = _counts_for(cfg.get("model") or {}, lams)
    series = remainder_series([(1.0 / math.sqrt(lam), N) for lam, N in counts
                               if lam > 1.0], model)
    rows = [[model.label, r.h, r.N, r.leading, r.R_h] for r in series]
    csv = write_csv(out / "weyl.csv", ["model", "h", "N", "leading", "R_h"], rows)
    write_manifest(out, cfg, cfg.get("seed", 0), [csv], t0)
    return 0


def cmd_plan(args):
    t0 = time.time()
    cfg = _load_config(args)
    out = _outdir(args)
    h = args.h if args.h is not None else cfg.get("h")
    if h is None:
        raise ConfigError("plan needs h (flag --h or config)")
    plan = plan_parameters(cfg.get("class"), float(h), p=cfg.get("p"),
                           r=cfg.get("r"), ell=cfg.get("ell"),
                           lambda_max=cfg.get("lambda_max"),
                           c=float(cfg.get("c", 1.0)))
    payload = {"class": plan.model_class, "delta": plan.delta, "eps": plan.eps,
               "T": plan.T, "predicted_bound": plan.predicted_bound, "h": plan.h}
    path = out / "plan.json"
    with open(path, "w") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
    write_manifest(out, cfg, cfg.get("seed", 0), [path], t0)
    return 0


def cmd_returnmap(args):
    t0 = time.time()
    cfg = _load_config(args)
    out = _outdir(args)
    profile = validate_profile(cfg.get("profile") or {})
    if "alphas" in cfg:
        alphas = parse_grid(cfg["alphas"])
    else:
        n = int(cfg.get("n_alpha", 256))
        margin = float(cfg.get("alpha_margin", 0.01))
        alphas = list(np.linspace(margin, math.pi - margin, n))
    use_ode = bool(cfg.get("ode", False))
    rows = []
    if use_ode:
        for a in alphas:
            smp = first_return(profile, float(a))
            rows.append([smp.xi, smp.tau, smp.theta, smp.clairaut])
    else:
        theta, tau = return_map_grid(profile, np.asarray(alphas))
        for a, th, ta in zip(alphas, theta, tau):
            rows.append([float(a), float(ta), float(th % (2.0 * math.pi)),
                         profile.rho_max * math.cos(float(a))])
    csv = write_csv(out / "returnmap.csv", ["alpha", "tau", "theta", "clairaut"], rows)
    write_manifest(out, cfg, cfg.get("seed", 0), [csv], t0)
    return 0


def cmd_scaling_fit(args):
    t0 = time.time()
    cfg = _load_config(args)
    out = _outdir(args)
    src = Path(cfg.get("in_csv", ""))
    if not src.exists():
        raise ConfigError(f"input CSV not found: {src}")
    table = []
    with open(src) as f:
        header = f.readline().strip().split(",")
        try:
            ie, it, iv = header.index("eps"), header.index("T"), header.index("volume")
        except ValueError as e:
            raise ConfigError(f"CSV lacks eps/T/volume columns: {header}") from e
        for line in f:
            parts = line.strip().split(",")
            table.append((float(parts[ie]), float(parts[it]), float(parts[iv])))
    fit = scaling_fit(table, mode=cfg.get("mode", "power"))
    payload = {"a_eps": fit.a_eps, "b_T": fit.b_T, "logC": fit.logC,
               "residual": fit.residual, "mode": fit.mode}
    path = out / "scaling_fit.json"
    with open(path, "w") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
    write_manifest(out, cfg, cfg.get("seed", 0), [path], t0)
    return 0


def cmd_verify_bound(args):
    t0 = time.time()
    cfg = _load_config(args)
    out = _outdir(args)
    src = Path(cfg.get("in_csv", ""))
    if not src.exists():
        raise ConfigError(f"input CSV not found: {src}")
    from .weyl import WeylSeriesRow
    series = []
    with open(src) as f:
        header = f.readline().strip().split(",")
        idx = {k: header.index(k) for k in ("h", "N", "leading", "R_h")}
        for line in f:
            parts = line.strip().split(",")
            series.append(WeylSeriesRow(h=float(parts[idx["h"]]),
                                        N=int(parts[idx["N"]]),
                                        leading=float(parts[idx["leading"]]),
                                        R_h=float(parts[idx["R_h"]])))
    shape = cfg.get("shape")
    if shape is None:
        raise ConfigError("verify-bound needs a shape (exponent or 'log')")
    report = verify_bound(series, shape if shape == "log" else float(shape),
                          slack=float(cfg.get("slack", 1.5)))
    payload = {"passed": report.passed, "C": report.C, "slack": report.slack,
               "worst_margin": report.worst_margin, "worst_h": report.worst_h,
               "shape": report.shape}
    path = out / "verify_bound.json"
    with open(path, "w") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
    write_manifest(out, cfg, cfg.get("seed", 0), [path], t0)
    # a FAIL verdict is a report outcome, not a command error
    return 0


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="weyllab",
                                 description="recurrence volumes, invariants and "
                                             "counting remainders for model flows")
    ap.add_argument("--config", help="JSON config file")
    ap.add_argument("--seed", type=int, help="seed override")
    ap.add_argument("--threads", type=int, default=1,
                    help="worker hint; results are independent of it")
    ap.add_argument("--out", help="output directory")
    ap.add_argument("--h", type=float, help="semiclassical parameter")
    ap.add_argument("--lambda", dest="lam", type=float, help="eigenvalue threshold")
    ap.add_argument("--t-grid", dest="t_grid", help="T grid, list or start:stop:kind:count")
    ap.add_argument("--eps-grid", dest="eps_grid", help="eps grid override")
    ap.add_argument("--h-grid", dest="h_grid", help="h grid override")
    ap.add_argument("--lambda-grid", dest="lambda_grid", help="Lambda grid override")
    ap.add_argument("--check", action="store_true",
                    help="verify the manifest hashes in --out and exit")
    ap.add_argument("command", nargs="?",
                    choices=["recurrence", "invariants", "spectrum", "weyl",
                             "plan", "returnmap", "scaling-fit", "verify-bound"])
    args = ap.parse_args(argv)

    try:
        if args.check:
            return 0 if check_manifest(_outdir(args)) else 3
        if args.command is None:
            raise ConfigError("no command given")
        handler = {
            "recurrence": cmd_recurrence,
            "invariants": cmd_invariants,
            "spectrum": cmd_spectrum,
            "weyl": cmd_weyl,
            "plan": cmd_plan,
            "returnmap": cmd_returnmap,
            "scaling-fit": cmd_scaling_fit,
            "verify-bound": cmd_verify_bound,
        }[args.command]
        return handler(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except (NumericalError, OverflowError) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
