"""Command-line front end: ``pskqkd {keyrate,sweep,crossings,psa,simulate}``.

Flags may also come from a ``--config`` file of ``key = value`` lines (keys
are flag names without the leading dashes); flags on the command line win.
Exit codes: 0 success, 2 usage, 3 numerical failure, 4 partial results.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import NumericalError
from .information import iab_total
from .keyrate import DIRECT, REVERSE, keyrate, psa_boundary
from .montecarlo import POSTSELECTION_MODES, SimulationConfig, simulate
from .optimize import BracketError, find_crossing, locate_bracket, sweep_eta
from .quadrature import QuadratureGrid
from .states import ProtocolParams

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL, EXIT_PARTIAL = 0, 2, 3, 4


class UsageError(Exception):
    pass


def fmt(x) -> str:
    """Fixed 9-significant-digit rendering used in every CSV."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".9g")
    return str(x)


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.replace(" ", "").split(",") if t]


def _ints(text: str) -> list[int]:
    return [int(t) for t in text.replace(" ", "").split(",") if t]


def parse_range(text: str) -> list[float]:
    """``start:stop:step`` with ``stop`` included, rounded to 12 digits."""
    try:
        start, stop, step = (float(t) for t in text.split(":"))
    except ValueError:
        raise UsageError(f"range must look like start:stop:step, got {text!r}") from None
    if step <= 0 or stop < start:
        raise UsageError(f"bad range {text!r}")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(n)]


def parse_pairs(text: str) -> list[tuple[int, int]]:
    pairs = []
    for item in text.replace(" ", "").split(","):
        if not item:
            continue
        a, _, b = item.partition(":")
        if not b:
            raise UsageError(f"pair must look like N1:N2, got {item!r}")
        pairs.append((int(a), int(b)))
    return pairs


def read_config(path: str) -> list[str]:
    """Turn a ``key = value`` file into argv tokens."""
    tokens = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key = key.strip().replace("_", "-")
        value = value.strip()
        if value.lower() in ("true", "yes") and key in _FLAG_SWITCHES:
            tokens.append(f"--{key}")
        elif value.lower() in ("false", "no") and key in _FLAG_SWITCHES:
            continue
        else:
            tokens.extend([f"--{key}", value])
    return tokens


_FLAG_SWITCHES = {"check-convergence", "full-star"}


def _add_grid(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("quadrature")
    g.add_argument("--radial-nodes", type=int, default=96)
    g.add_argument("--angular-nodes", type=int, default=64)
    g.add_argument("--r-max", type=float, default=None)
    g.add_argument("--convergence-target", type=float, default=1e-5)
    p.add_argument("--threads", type=int, default=1, help="worker cap")
    p.add_argument("--out", default=None, help="output file (default: stdout)")
    p.add_argument("--config", default=None, help="key = value file; flags take precedence")


def _add_amp_search(p: argparse.ArgumentParser) -> None:
    p.add_argument("--a-min", type=float, default=0.05)
    p.add_argument("--a-max", type=float, default=5.0)
    p.add_argument("--a-step", type=float, default=0.05)


def _postselect(flag: str, mode: str) -> bool:
    if flag == "auto":
        return mode == DIRECT
    return flag == "on"


def _modes(text: str) -> list[str]:
    if text == "both":
        return [DIRECT, REVERSE]
    modes = [m for m in text.split(",") if m]
    for m in modes:
        if m not in (DIRECT, REVERSE):
            raise UsageError(f"unknown reconciliation {m!r}")
    return modes


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pskqkd", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keyrate", help="key rate at a single (N, a, eta)")
    p.add_argument("--letters", type=int, required=True)
    p.add_argument("--amplitude", type=float, required=True)
    p.add_argument("--transmittance", type=float, required=True)
    p.add_argument("--reconciliation", choices=[DIRECT, REVERSE], default=DIRECT)
    p.add_argument("--postselection", choices=["on", "off", "auto"], default="auto")
    p.add_argument("--check-convergence", action="store_true")
    p.add_argument("--boundary-out", default=None, help="also write the PSA boundary CSV here")
    _add_grid(p)

    p = sub.add_parser("sweep", help="amplitude-optimized rate over a transmittance grid")
    p.add_argument("--letters", type=_ints, required=True, help="comma list, e.g. 2,3,4")
    p.add_argument("--eta-range", required=True, help="start:stop:step (stop included)")
    p.add_argument("--reconciliation", default=DIRECT, help="direct, reverse, both or a comma list")
    p.add_argument("--postselection", choices=["on", "off", "auto"], default="auto")
    _add_amp_search(p)
    _add_grid(p)

    p = sub.add_parser("crossings", help="transmittance where two optimized rate curves meet")
    p.add_argument("--pairs", default=None, help="comma list of N1:N2")
    p.add_argument("--consecutive", default=None, help="N1:N2 -> pairs (N1,N1+1)..(N2-1,N2)")
    p.add_argument("--reconciliation", choices=[DIRECT, REVERSE], default=DIRECT)
    p.add_argument("--postselection", choices=["on", "off", "auto"], default="auto")
    p.add_argument("--eta-scan", default="0.30:0.95:0.05",
                   help="coarse transmittance grid used to bracket each crossing")
    p.add_argument("--width", type=float, default=1e-3)
    _add_amp_search(p)
    _add_grid(p)

    p = sub.add_parser("psa", help="postselection boundary r*(theta) for several eta")
    p.add_argument("--letters", type=int, required=True)
    p.add_argument("--amplitude", type=float, required=True)
    p.add_argument("--eta-list", type=_floats, required=True)
    p.add_argument("--angles", type=int, default=64, help="samples per sector")
    p.add_argument("--full-star", action="store_true", help="replicate over all N sectors")
    _add_grid(p)

    p = sub.add_parser("simulate", help="Monte Carlo run of the protocol chain")
    p.add_argument("--letters", type=int, required=True)
    p.add_argument("--amplitude", type=float, required=True)
    p.add_argument("--transmittance", type=float, required=True)
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--postselection", choices=list(POSTSELECTION_MODES), default="off")
    _add_grid(p)
    return parser


def _grid(args) -> QuadratureGrid:
    return QuadratureGrid(args.radial_nodes, args.angular_nodes, args.r_max,
                          args.convergence_target)


def _metadata(args) -> dict:
    resolved = {k: v for k, v in vars(args).items() if k not in ("func",)}
    return {"program": "pskqkd", "version": __version__, "config": resolved}


def _csv_text(meta: dict, header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    buf.write(f"# {json.dumps(meta, sort_keys=True)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x) for x in row])
    return buf.getvalue()


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _json_text(meta: dict, payload: dict) -> str:
    return json.dumps({"metadata": meta, **payload}, indent=2, default=_jsonable) + "\n"


def _jsonable(x):
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(type(x).__name__)


def _boundary_rows(boundary, full_star: bool) -> list[list]:
    if full_star:
        theta, radii = boundary.full_star()
        sectors = np.repeat(np.arange(boundary.params.letters), boundary.angles.size)
    else:
        theta, radii = boundary.angles, boundary.radii
        sectors = np.zeros(theta.size, dtype=int)
    eta = boundary.params.transmittance
    return [[eta, s, t, r if np.isfinite(r) else None, not np.isfinite(r)]
            for s, t, r in zip(sectors, theta, radii)]


BOUNDARY_HEADER = ["eta", "sector", "theta", "r_star", "empty"]


def cmd_keyrate(args) -> int:
    params = ProtocolParams(args.letters, args.amplitude, args.transmittance)
    grid = _grid(args)
    mode = args.reconciliation
    res = keyrate(params, mode, _postselect(args.postselection, mode), grid,
                  check_convergence=args.check_convergence, workers=args.threads)
    meta = _metadata(args)
    eve_label = "I_AE" if mode == DIRECT else "mean I_BE"
    summary = (
        f"G = {res.rate:.9g} bits/transmission (operational {res.operational_rate:.9g})\n"
        f"I_AB = {res.iab:.9g}\n{eve_label} = {res.eve_information:.9g}\n"
        f"accepted fraction = {res.accepted_fraction:.9g}\n"
        f"grid: {grid.radial_nodes} radial x {grid.angular_nodes} angular, "
        f"r_max = {res.r_max:.6g}, normalization = {res.normalization:.12g}"
    )
    if res.convergence_delta is not None:
        summary += f", half-step delta = {res.convergence_delta:.3g} (converged: {res.converged})"
    print(summary, file=sys.stderr if not args.out else sys.stdout)
    if args.out:
        _emit(args, _json_text(meta, {"result": res.as_dict()}))
    else:
        sys.stdout.write(_json_text(meta, {"result": res.as_dict()}))
    if args.boundary_out:
        boundary = psa_boundary(params, grid)
        Path(args.boundary_out).write_text(
            _csv_text(meta, BOUNDARY_HEADER, _boundary_rows(boundary, True)), encoding="utf-8")
    return EXIT_OK


SWEEP_HEADER = ["eta", "letters", "mode", "postselection", "a_opt", "rate",
                "accepted_fraction", "a_secondary", "rate_secondary", "error"]


def cmd_sweep(args) -> int:
    etas = parse_range(args.eta_range)
    grid = _grid(args)
    rows, failed = [], False
    opt = dict(a_range=(args.a_min, args.a_max), step=args.a_step)
    for mode in _modes(args.reconciliation):
        ps = _postselect(args.postselection, mode)
        for n in args.letters:
            for pt in sweep_eta(n, mode, etas, grid, ps, workers=args.threads, **opt):
                sec = pt.secondary_maximum or (None, None)
                failed |= pt.error is not None
                rows.append([pt.eta, pt.letters, pt.mode, "on" if ps else "off",
                             pt.optimal_amplitude, pt.rate, pt.accepted_fraction,
                             sec[0], sec[1], pt.error or ""])
    _emit(args, _csv_text(_metadata(args), SWEEP_HEADER, rows))
    return EXIT_PARTIAL if failed else EXIT_OK


CROSSING_HEADER = ["n_low", "n_high", "mode", "eta_star", "bracket_lo", "bracket_hi",
                   "delta_low", "delta_high", "residual", "status"]


def cmd_crossings(args) -> int:
    if args.pairs:
        pairs = parse_pairs(args.pairs)
    elif args.consecutive:
        lo, hi = parse_pairs(args.consecutive)[0]
        pairs = [(n, n + 1) for n in range(lo, hi)]
    else:
        raise UsageError("give --pairs or --consecutive")
    grid = _grid(args)
    mode = args.reconciliation
    ps = _postselect(args.postselection, mode)
    opt = dict(a_range=(args.a_min, args.a_max), step=args.a_step)
    scan = parse_range(args.eta_scan)
    rows, failed, cache = [], False, {}
    for n_lo, n_hi in pairs:
        try:
            bracket = locate_bracket(n_lo, n_hi, mode, scan, grid, ps, cache=cache, **opt)
            rec = find_crossing(n_lo, n_hi, mode, bracket, grid, ps, width=args.width,
                                cache=cache, **opt)
            rows.append([n_lo, n_hi, mode, rec.eta_star, rec.bracket[0], rec.bracket[1],
                         rec.delta_low, rec.delta_high, rec.residual, "ok"])
        except BracketError as exc:
            failed = True
            rows.append([n_lo, n_hi, mode, None, None, None, None, None, None,
                         f"unbracketed: {exc}"])
    _emit(args, _csv_text(_metadata(args), CROSSING_HEADER, rows))
    return EXIT_PARTIAL if failed else EXIT_OK


def cmd_psa(args) -> int:
    grid = _grid(args)
    rows = []
    for eta in args.eta_list:
        params = ProtocolParams(args.letters, args.amplitude, eta)
        width = 2 * math.pi / args.letters
        theta = (np.arange(args.angles) + 0.5) * width / args.angles
        boundary = psa_boundary(params, grid, angles=theta)
        rows.extend(_boundary_rows(boundary, args.full_star))
    _emit(args, _csv_text(_metadata(args), BOUNDARY_HEADER, rows))
    return EXIT_OK


def cmd_simulate(args) -> int:
    params = ProtocolParams(args.letters, args.amplitude, args.transmittance)
    cfg = SimulationConfig(params, args.samples, args.seed, args.postselection)
    rep = simulate(cfg, workers=args.threads)
    grid = _grid(args)
    i_quad = iab_total(params, grid)
    comparison = {
        "iab_quadrature": i_quad,
        "sampled_iab_z": _z(rep.sampled_iab - i_quad, rep.sampled_iab_stderr),
        "plugin_minus_quadrature": rep.empirical_iab - i_quad,
    }
    if args.postselection == "direct-psa":
        frac = keyrate(params, DIRECT, True, grid).accepted_fraction
        comparison["accepted_fraction_quadrature"] = frac
        comparison["accepted_fraction_z"] = _z(rep.accepted_fraction - frac,
                                               rep.accepted_fraction_stderr)
    _emit(args, _json_text(_metadata(args), {"report": rep.as_dict(), "comparison": comparison}))
    return EXIT_OK


def _z(diff: float, se: float) -> float | None:
    if se > 0:
        return diff / se
    return 0.0 if diff == 0 else None


COMMANDS = {
    "keyrate": cmd_keyrate,
    "sweep": cmd_sweep,
    "crossings": cmd_crossings,
    "psa": cmd_psa,
    "simulate": cmd_simulate,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        pre = argparse.ArgumentParser(add_help=False)
        pre.add_argument("--config", default=None)
        known, _ = pre.parse_known_args(argv)
        if known.config and argv and not argv[0].startswith("-"):
            # config tokens go first so later command-line flags override them
            argv = [argv[0]] + read_config(known.config) + argv[1:]
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    except (UsageError, ValueError, OSError) as exc:
        print(f"pskqkd: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"pskqkd: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
