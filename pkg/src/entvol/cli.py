"""Command-line front end: ``entvol {evolve,open,phase,verify}``.

Exit codes: 0 success, 1 numerical failure or verification breach,
2 invalid arguments.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .entanglement import classify_margins, excitation_margins
from .errors import DomainError, EntvolError
from .freezing import (
    FAMILIES,
    MARGIN_TOL,
    VALUE_TOL,
    OpenDetectorConfig,
    bracket_critical_theta,
    closed_trace,
    default_theta_axis,
    detect_freezing_conditional,
    detect_open,
    family_coeffs,
    open_trace,
    phase_diagram,
)
from .oracle import cross_check
from .sector_state import enumerate_sector, make_two_branch
from .xx_dynamics import XXModel, evolve_trace, time_grid

VERIFY_THRESHOLD = 1e-8
RNG_NAME = "numpy.random.Generator(PCG64)"

_ANGLE = re.compile(r"^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*\*?\s*pi\s*(?:/\s*(\d+\.?\d*))?\s*$")


def parse_angle(text: str) -> float:
    """Radians from ``"0.3"``, ``"0.25pi"``, ``"pi/12"`` or ``"2pi/5"``."""
    m = _ANGLE.match(text)
    if m:
        coef = float(m.group(1)) if m.group(1) else 1.0
        den = float(m.group(2)) if m.group(2) else 1.0
        return coef * math.pi / den
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse angle {text!r}") from None


def fmt(x) -> str:
    return format(float(x), ".17g")


def load_coeffs(spec: str, n: int, e: int) -> np.ndarray:
    """Preset name, ``basis:<bitstring>``, or a JSON file of ``[re, im]`` pairs."""
    if spec in FAMILIES:
        return family_coeffs(spec, n, e)
    if spec.startswith("basis:"):
        basis = enumerate_sector(n, e)
        c = np.zeros(len(basis), dtype=complex)
        c[basis.index(spec[len("basis:"):])] = 1.0
        return c
    path = Path(spec)
    if not path.is_file():
        raise DomainError(f"--coeffs {spec!r} is neither a preset nor a readable file")
    pairs = json.loads(path.read_text())
    try:
        return np.array([complex(float(re_), float(im)) for re_, im in pairs])
    except (TypeError, ValueError):
        raise DomainError(f"{spec}: expected a JSON array of [re, im] pairs") from None


def write_trace_csv(path: Path, times, y, cases) -> None:
    n = y.shape[1]
    header = ["t"] + [f"Y_{k}" for k in range(1, n + 1)] + ["Y_s", "case"]
    lines = [",".join(header)]
    ys = y.sum(axis=1)
    for j, t in enumerate(times):
        row = [fmt(t)] + [fmt(v) for v in y[j]] + [fmt(ys[j]), str(int(cases[j]))]
        lines.append(",".join(row))
    path.write_text("\n".join(lines) + "\n")


def write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2) + "\n")


def cmd_evolve(args) -> int:
    coeffs = load_coeffs(args.coeffs, args.n, args.e)
    state = make_two_branch(args.n, args.e, coeffs, args.theta, args.phi)
    model = XXModel(args.n, args.coupling)
    times = time_grid(args.horizon, args.samples)
    states = evolve_trace(state, model, args.horizon, args.samples)
    trace = closed_trace(states, times, args.margin_tol)
    report = detect_freezing_conditional(states, times, model, args.margin_tol, args.value_tol)

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_trace_csv(out / "trace.csv", times, trace.y, trace.cases)
    payload = report.to_dict()
    payload["config"] = {
        "command": "evolve", "n": args.n, "e": args.e, "theta": args.theta, "phi": args.phi,
        "coeffs": args.coeffs, "coupling": args.coupling, "horizon": args.horizon,
        "samples": args.samples, "margin_tol": args.margin_tol, "value_tol": args.value_tol,
    }
    write_json(out / "report.json", payload)
    print(f"{report.classification}: {len(report.intervals)} interval(s), R_f = {report.r_f:.6f}")
    for iv in report.intervals:
        print(f"  [{iv.t_start:.9f}, {iv.t_end:.9f}]  Y_s = {iv.frozen_value:.12g}  ({iv.mechanism})")
    return 0


def cmd_open(args) -> int:
    config = OpenDetectorConfig(args.value_tol, args.min_len, args.curvature_tol, args.min_duration,
                                args.kappa, args.horizon, args.samples)
    if args.theta_crit:
        lo, hi = bracket_critical_theta(config, args.bisection_tol)
        print(f"theta_crit in [{lo:.10f}, {hi:.10f}]  (midpoint {0.5 * (lo + hi):.10f} rad"
              f" = {0.5 * (lo + hi) / math.pi:.8f} pi)")
        if args.theta is None:
            return 0
    if args.theta is None:
        raise DomainError("open: --theta is required unless --theta-crit is given")
    trace = open_trace(config.params(args.theta))
    # cases from the bit-flipped two-branch form (n = 4, e = 2, r^2 = chi^2, chi^2, xi^2, xi^2)
    chi2 = -np.expm1(-trace.times)
    r2 = np.stack([chi2, chi2, 1.0 - chi2, 1.0 - chi2], axis=1)
    cases = classify_margins(excitation_margins(r2, args.theta), MARGIN_TOL)
    report = detect_open(args.theta, config)

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_trace_csv(out / "trace.csv", trace.times, trace.y, cases)
    payload = report.to_dict()
    payload["config"] = {"command": "open", "theta": args.theta, **config.to_dict()}
    write_json(out / "report.json", payload)
    print(f"{report.classification}: {len(report.intervals)} interval(s), R_f = {report.r_f:.6f}")
    for iv in report.intervals:
        print(f"  [{iv.t_start:.6f}, {iv.t_end:.6f}]  Y_s = {iv.frozen_value:.12g}")
    return 0


def cmd_phase(args) -> int:
    if args.n_min > args.n_max:
        raise DomainError("--n-min exceeds --n-max")
    grid = phase_diagram(args.family, range(args.n_min, args.n_max + 1), default_theta_axis(args.theta_steps),
                         e=args.e, J=args.coupling, horizon=args.horizon, samples=args.samples,
                         margin_tol=args.margin_tol, workers=args.workers)
    lines = ["N,theta,R_f,frozen_value,classification"]
    for n, th, r_f, value, cls in grid.rows():
        lines.append(",".join([str(n), fmt(th), fmt(r_f), "NA" if value is None else fmt(value), cls]))
    text = "\n".join(lines) + "\n"
    if args.out == "-":
        sys.stdout.write(text)
    else:
        path = Path(args.out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
        print(f"wrote {len(lines) - 1} cells to {path}")
    return 0


def random_instances(seed: int, trials: int, n_max: int, n_min: int = 3):
    """Seeded ``(n, e, theta, phi, coeffs)`` tuples with ``1 <= e <= n - 1``."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(trials):
        n = int(rng.integers(n_min, n_max + 1))
        e = int(rng.integers(1, n))
        theta = float(rng.uniform(0.0, math.pi / 2))
        phi = float(rng.uniform(0.0, 2 * math.pi))
        dim = math.comb(n, e)
        coeffs = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        out.append((n, e, theta, phi, coeffs))
    return out


def cmd_verify(args) -> int:
    if args.n_max < 3:
        raise DomainError("--n-max must be at least 3")
    started = time.perf_counter()
    rows = []
    failed = []
    times = time_grid(args.horizon, args.samples)
    for idx, (n, e, theta, phi, coeffs) in enumerate(random_instances(args.seed, args.trials, args.n_max)):
        state = make_two_branch(n, e, coeffs, theta, phi)
        model = XXModel(n, 1.0)
        rep = cross_check(evolve_trace(state, model, args.horizon, args.samples), times, model)
        row = {"index": idx, "n": n, "e": e, "theta": theta, "phi": phi,
               "coeffs": [[c.real, c.imag] for c in state.amps],
               "max_dy_s": rep.max_dy_s, "max_dy_k": rep.max_dy_k,
               "max_amp_dev": rep.max_amp_dev, "max_leakage": rep.max_leakage}
        rows.append(row)
        if rep.worst > VERIFY_THRESHOLD or rep.max_leakage > 1e-12:
            failed.append(row)
    payload = {
        "version": __version__, "generator": RNG_NAME, "seed": args.seed, "trials": args.trials,
        "n_max": args.n_max, "samples": args.samples, "horizon": args.horizon,
        "threshold": VERIFY_THRESHOLD, "passed": not failed, "instances": rows,
    }
    if args.out:
        write_json(Path(args.out), payload)
    worst = max((max(r["max_dy_s"], r["max_dy_k"], r["max_amp_dev"]) for r in rows), default=0.0)
    print(f"{len(rows)} instance(s), worst deviation {worst:.3e}, "
          f"{time.perf_counter() - started:.2f} s")
    if failed:
        for r in failed:
            print(f"FAILED instance {r['index']}: n={r['n']} e={r['e']} theta={r['theta']!r} "
                  f"phi={r['phi']!r} dY_s={r['max_dy_s']:.3e} amp={r['max_amp_dev']:.3e}",
                  file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="entvol", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("evolve", help="XX-chain trajectory, trace CSV and freeze report")
    ev.add_argument("--n", type=int, default=3)
    ev.add_argument("--e", type=int, default=1)
    ev.add_argument("--theta", type=parse_angle, default=0.0)
    ev.add_argument("--phi", type=parse_angle, default=0.0)
    ev.add_argument("--coeffs", default="single_head",
                    help="single_head, symmetric_W, basis:<bits>, or a JSON file of [re, im] pairs")
    ev.add_argument("--coupling", type=float, default=1.0)
    ev.add_argument("--horizon", type=float, default=10.0)
    ev.add_argument("--samples", type=int, default=2001)
    ev.add_argument("--out-dir", default="out")
    ev.add_argument("--margin-tol", type=float, default=MARGIN_TOL)
    ev.add_argument("--value-tol", type=float, default=VALUE_TOL)
    ev.set_defaults(func=cmd_evolve)

    op = sub.add_parser("open", help="two-cavity amplitude-damping trajectory")
    op.add_argument("--theta", type=parse_angle, default=None)
    op.add_argument("--kappa", type=float, default=1.0)
    op.add_argument("--horizon", type=float, default=10.0, help="range of kappa*t")
    op.add_argument("--samples", type=int, default=2001)
    op.add_argument("--out-dir", default="out")
    op.add_argument("--value-tol", type=float, default=VALUE_TOL)
    op.add_argument("--min-len", type=int, default=3)
    op.add_argument("--curvature-tol", type=float, default=OpenDetectorConfig.curvature_tol)
    op.add_argument("--min-duration", type=float, default=OpenDetectorConfig.min_duration)
    op.add_argument("--theta-crit", action="store_true", help="bisect for the onset angle of freezing")
    op.add_argument("--bisection-tol", type=float, default=1e-6)
    op.set_defaults(func=cmd_open)

    ph = sub.add_parser("phase", help="(N, theta) phase diagram CSV")
    ph.add_argument("--family", choices=FAMILIES, default="single_head")
    ph.add_argument("--n-min", type=int, default=3)
    ph.add_argument("--n-max", type=int, default=10)
    ph.add_argument("--theta-steps", type=int, default=49)
    ph.add_argument("--e", type=int, default=1)
    ph.add_argument("--coupling", type=float, default=1.0)
    ph.add_argument("--horizon", type=float, default=10.0)
    ph.add_argument("--samples", type=int, default=2001)
    ph.add_argument("--margin-tol", type=float, default=MARGIN_TOL)
    ph.add_argument("--workers", type=int, default=None, help="process count (capped by ENTVOL_THREADS)")
    ph.add_argument("--out", default="-", help="CSV path, or - for stdout")
    ph.set_defaults(func=cmd_phase)

    vf = sub.add_parser("verify", help="cross-check fast paths against the full-space oracle")
    vf.add_argument("--n-max", type=int, default=8)
    vf.add_argument("--trials", type=int, default=50)
    vf.add_argument("--seed", type=int, default=0)
    vf.add_argument("--samples", type=int, default=200)
    vf.add_argument("--horizon", type=float, default=10.0)
    vf.add_argument("--out", default=None, help="write the JSON report here")
    vf.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except EntvolError as exc:
        if isinstance(exc, ValueError):
            parser.exit(2, f"entvol: error: {exc}\n")
        print(f"entvol: {exc}", file=sys.stderr)
        return 1
    except (FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"entvol: numerical failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
