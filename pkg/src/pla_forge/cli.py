"""Command-line entry point: ``pla-forge <subcommand> ...``.

Sequence arguments accept either a JSON file path or a catalog name
(``primitive``, ``knill``, ``F1``, ``PLA1_2``, ``PLA2_1``, ``PLA3_1``).
Exit codes: 0 success, 1 invalid input, 2 no solution found (``design``).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import design, mc, response
from .envelope import by_name
from .sequences import DEFAULT_RABI, PulseSequence, catalog, gate_angle, get

DEFAULT_RMS_RATIO = 1.21e-2
EXIT_OK, EXIT_INVALID, EXIT_NOT_FOUND = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Argument errors become one-line diagnostics instead of usage dumps."""

    def error(self, message):
        raise UsageError(message)


def fmt(x) -> str:
    """12 significant digits in scientific notation."""
    return f"{float(x):.11e}"


def _threads(args) -> int | None:
    env = os.environ.get("PLA_FORGE_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"PLA_FORGE_THREADS must be an integer, got {env!r}") from None
    return args.threads


def load_sequence(ref: str, args) -> PulseSequence:
    path = Path(ref)
    if path.is_file():
        seq = PulseSequence.load(path, degrees=args.degrees)
    else:
        try:
            seq = get(ref)
        except KeyError:
            raise UsageError(f"unknown sequence {ref!r} (not a file or catalog name)") from None
    if args.rabi is not None:
        seq = seq.with_rabi(args.rabi)
    if getattr(args, "envelope", None):
        seq = seq.with_envelope(by_name(args.envelope))
    return seq


def _rabi(args) -> float:
    return args.rabi if args.rabi is not None else DEFAULT_RABI


def _check_nonneg(value: float, name: str):
    if value < 0:
        raise UsageError(f"{name} must be non-negative")


def _fc_grid(args, rabi: float) -> np.ndarray:
    base = rabi / (2 * np.pi)
    start = args.fc_start if args.fc_start is not None else 1e-3 * base
    stop = args.fc_stop if args.fc_stop is not None else base
    if args.fc_points < 1:
        raise UsageError("--fc-points must be positive")
    if args.fc_points == 1:
        return np.array([start])
    if not 0 < start < stop:
        raise UsageError("need 0 < --fc-start < --fc-stop")
    return np.geomspace(start, stop, args.fc_points)


def _write_csv(out, header, rows):
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([r if isinstance(r, (str, int, np.integer)) else fmt(r) for r in row])


# -- subcommands ------------------------------------------------------------


def cmd_catalog(args, out):
    json.dump([s.to_dict() for s in catalog(_rabi(args))], out, indent=2)
    out.write("\n")


def cmd_design(args, out):
    cfg = design.SolverConfig(
        n=args.n, pulses=args.pulses, restarts=args.restarts, max_iters=args.max_iters,
        tol=args.tol, seed=args.seed, gate_angle_target=args.gamma, rabi=_rabi(args),
    )
    seq = design.solve_pla(cfg, name=args.name)
    out.write(seq.to_json() + "\n")


def cmd_verify(args, out):
    seq = load_sequence(args.sequence, args)
    rep = design.check_pla(seq, args.n, tol=args.tol)
    gamma, k = gate_angle(seq)
    d = {"name": seq.name, **rep.to_dict(), "gate_angle": gamma, "gate_k": k}
    json.dump(d, out, indent=2)
    out.write("\n")


def cmd_filter(args, out):
    seq = load_sequence(args.sequence, args)
    base = seq.rabi / (2 * np.pi)
    fmin = args.fmin if args.fmin is not None else 1e-4 * base
    fmax = args.fmax if args.fmax is not None else 10 * base
    if not 0 < fmin < fmax:
        raise UsageError("need 0 < --fmin < --fmax")
    curve = response.filter_curve(seq, fmin, fmax, args.points)
    _write_csv(out, ["f_hz", "h"], zip(curve.frequencies, curve.values))


def cmd_theory(args, out):
    seq = load_sequence(args.sequence, args)
    _check_nonneg(args.rms_ratio, "--rms-ratio")
    fcs = _fc_grid(args, seq.rabi)
    preds = response.theory_curve(seq, fcs, args.rms_ratio * seq.rabi)
    rows = ((f, p.first_order, p.dc_second_order, p.dc_quadrature, p.total) for f, p in zip(fcs, preds))
    _write_csv(out, ["f_hz", "first_order", "dc2", "dc_quad", "total"], rows)


def cmd_simulate(args, out):
    seq = load_sequence(args.sequence, args)
    _check_nonneg(args.rms_ratio, "--rms-ratio")
    fcs = _fc_grid(args, seq.rabi)
    res = mc.mc_scan(seq, fcs, args.rms_ratio * seq.rabi, trials=args.trials,
                     steps_per_pulse=args.steps, seed=args.seed, f_band=args.band,
                     bins=args.bins, threads=_threads(args))
    _write_csv(out, ["fc_hz", "omega_over_Omega", "mean_infidelity", "stderr", "trials"], res.rows())


def _parse_grid(text: str) -> tuple[int, int]:
    try:
        w, h = (int(x) for x in text.lower().split("x"))
    except ValueError:
        raise UsageError(f"--grid must look like WxH, got {text!r}") from None
    if w < 2 or h < 1:
        raise UsageError("--grid needs at least 2 frequency points and 1 rms point")
    return w, h


def cmd_regime(args, out):
    ref = load_sequence(args.ref, args)
    alt = load_sequence(args.alt, args)
    nw, ns = _parse_grid(args.grid)
    w = np.geomspace(args.w_min, args.w_max, nw)
    s = np.geomspace(args.s_min, args.s_max, ns)
    ratio = response.regime_map(ref, alt, w, s)
    lower, upper = response.regime_boundaries(ref, alt, s)
    _write_csv(out, ["rms_ratio"] + [fmt(x) for x in w],
               ([s[i], *ratio[i]] for i in range(ns)))
    rows = ((s[i], lower[i], upper[i], int(lower[i] >= upper[i])) for i in range(ns))
    header = ["rms_ratio", "lower_omega_over_Omega", "upper_omega_over_Omega", "empty"]
    if args.boundary_out:
        with open(args.boundary_out, "w", newline="") as fh:
            _write_csv(fh, header, rows)
    else:
        out.write("\n")
        _write_csv(out, header, rows)


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--rabi", type=float, default=None,
                        help=f"Rabi frequency in rad/s (default: sequence value, else {DEFAULT_RABI:g})")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=None, help="worker threads (default: all)")
    common.add_argument("--out", default=None, help="output path (default: stdout)")
    common.add_argument("--degrees", action="store_true", help="sequence JSON phases are in degrees")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="pla-forge", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("catalog", parents=[common], help="print the named sequences as JSON")

    d = sub.add_parser("design", parents=[common], help="solve PLA(n) numerically")
    d.add_argument("--n", type=int, required=True)
    d.add_argument("--pulses", type=int, required=True)
    d.add_argument("--restarts", type=int, default=50)
    d.add_argument("--max-iters", type=int, default=4000)
    d.add_argument("--tol", type=float, default=design.DEFAULT_TOL)
    d.add_argument("--gamma", type=float, default=0.0, help="target gate axis angle (rad)")
    d.add_argument("--name", default=None)

    v = sub.add_parser("verify", parents=[common], help="report PLA(n) residuals")
    v.add_argument("sequence")
    v.add_argument("--n", type=int, required=True)
    v.add_argument("--tol", type=float, default=design.DEFAULT_TOL)

    env_kinds = ["square", "raised_cosine", "truncated_gaussian"]

    f = sub.add_parser("filter", parents=[common], help="filter function CSV")
    f.add_argument("sequence")
    f.add_argument("--fmin", type=float, default=None)
    f.add_argument("--fmax", type=float, default=None)
    f.add_argument("--points", type=int, default=None)
    f.add_argument("--envelope", choices=env_kinds, default=None)

    for name, helptext in (("theory", "perturbative infidelity CSV"), ("simulate", "Monte Carlo scan CSV")):
        t = sub.add_parser(name, parents=[common], help=helptext)
        t.add_argument("sequence")
        t.add_argument("--rms-ratio", type=float, default=DEFAULT_RMS_RATIO)
        t.add_argument("--fc-start", type=float, default=None, help="Hz (default 1e-3 Ω/2π)")
        t.add_argument("--fc-stop", type=float, default=None, help="Hz (default Ω/2π)")
        t.add_argument("--fc-points", type=int, default=20)
        t.add_argument("--envelope", choices=env_kinds, default=None)
        if name == "simulate":
            t.add_argument("--trials", type=int, default=mc.DEFAULT_TRIALS)
            t.add_argument("--steps", type=int, default=mc.DEFAULT_STEPS)
            t.add_argument("--bins", type=int, default=mc.DEFAULT_BINS)
            t.add_argument("--band", type=float, default=mc.DEFAULT_BAND)

    r = sub.add_parser("regime", parents=[common], help="infidelity ratio map and boundaries")
    r.add_argument("--ref", default="F1")
    r.add_argument("--alt", default="PLA2_1")
    r.add_argument("--grid", default="61x31")
    r.add_argument("--w-min", type=float, default=1e-4)
    r.add_argument("--w-max", type=float, default=0.5)
    r.add_argument("--s-min", type=float, default=1e-4)
    r.add_argument("--s-max", type=float, default=1e-1)
    r.add_argument("--boundary-out", default=None)
    return p


COMMANDS = {
    "catalog": cmd_catalog,
    "design": cmd_design,
    "verify": cmd_verify,
    "filter": cmd_filter,
    "theory": cmd_theory,
    "simulate": cmd_simulate,
    "regime": cmd_regime,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"pla-forge: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_INVALID
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    buf = io.StringIO()
    try:
        COMMANDS[args.command](args, buf)
    except design.SolutionNotFound as exc:
        print(f"pla-forge: {exc}", file=sys.stderr)
        return EXIT_NOT_FOUND
    except (UsageError, ValueError, KeyError, OSError) as exc:
        msg = str(exc).replace("\n", " ")
        print(f"pla-forge: {msg}", file=sys.stderr)
        return EXIT_INVALID
    text = buf.getvalue()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
