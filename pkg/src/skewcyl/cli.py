"""Command-line front end.

    skewcyl potential eval|grid
    skewcyl set fiber|grid
    skewcyl levi certify|find-a
    skewcyl fiber monodromy
    skewcyl schwarzian eval
    skewcyl rigidity bound|certificate

Exit codes: 0 success, 2 negative certification or verdict, 3 invalid input.
Relative --out paths resolve against $SKEWCYL_OUTPUT_DIR when it is set.
"""

from __future__ import annotations

import argparse
import cmath
import csv
import io
import json
import math
import os
import re
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import brset, fiber, levi, potential, rigidity, schwarzian

SCHEMA_VERSION = 1
EXIT_OK, EXIT_NEGATIVE, EXIT_INVALID = 0, 2, 3
OUTPUT_DIR_ENV = "SKEWCYL_OUTPUT_DIR"
FIBER_CSV_COLUMNS = ("z_re", "z_im", "center_re", "center_im", "radius", "degenerate")
POTENTIAL_CSV_COLUMNS = ("z_re", "z_im", "u", "tail_bound")


class InputError(ValueError):
    pass


def parse_number(text: str):
    """Rational literals ('1/3', '-0.4', '2') become exact Fractions; anything else complex."""
    s = text.strip().replace(" ", "")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        pass
    try:
        return complex(s.replace("i", "j"))
    except ValueError:
        raise InputError(f"malformed number: {text!r}") from None


def parse_real(text: str) -> float:
    v = parse_number(text)
    if isinstance(v, complex):
        if v.imag != 0:
            raise InputError(f"expected a real number, got {text!r}")
        v = v.real
    v = float(v)
    if not math.isfinite(v):
        raise InputError(f"expected a finite number, got {text!r}")
    return v


def parse_grid(text: str) -> tuple[int, int]:
    try:
        parts = [int(p) for p in text.lower().split("x")]
    except ValueError:
        raise InputError(f"malformed grid {text!r}; expected e.g. 64x64") from None
    if len(parts) == 1:
        parts *= 2
    if len(parts) != 2 or min(parts) < 1:
        raise InputError(f"malformed grid {text!r}")
    return parts[0], parts[1]


@dataclass(frozen=True)
class RunConfig:
    A: float = brset.DEFAULT_A
    N_truncation: int = potential.DEFAULT_TRUNCATION
    grid: tuple[int, int] = (64, 64)
    angles: int = 32
    epsilon: float = levi.DEFAULT_EPSILON
    margin: float = 0.5
    workers: int = 1
    out: str | None = None
    format: str = "json"

    def __post_init__(self):
        if not math.isfinite(self.A):
            raise InputError("A must be finite")
        if self.N_truncation < 1:
            raise InputError("truncation must be >= 1")
        if min(self.grid) < 1 or self.angles < 1:
            raise InputError("grid sizes must be positive")
        if not self.epsilon > 0:
            raise InputError("epsilon must be positive")
        if self.workers < 1:
            raise InputError("workers must be >= 1")
        if self.format not in ("json", "csv"):
            raise InputError("format must be json or csv")


def _resolve(out: str | None) -> Path | None:
    if out is None:
        return None
    p = Path(out)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    p.parent.mkdir(parents=True, exist_ok=True)
    return p


def dumps(payload) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _emit(text: str, out: str | None):
    path = _resolve(out)
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text)


def _figure_path(args) -> Path | None:
    if getattr(args, "figure", None):
        return _resolve(args.figure)
    return None


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _c2(v) -> list[float]:
    v = complex(v)
    return [v.real, v.imag]


def _grid_points(res: int) -> np.ndarray:
    xs = -1.0 + (2.0 * np.arange(res) + 1.0) / res
    Z = (xs[None, :] + 1j * xs[:, None]).ravel()
    return Z[np.abs(Z) < 1.0]


# --- subcommands -------------------------------------------------------------

def cmd_potential_eval(args, cfg: RunConfig) -> int:
    z = parse_number(args.z)
    value, bound = potential.eval_u(z, cfg.N_truncation)
    zc = complex(float(z)) if isinstance(z, Fraction) else complex(z)
    payload = {"schema_version": SCHEMA_VERSION, "z": _c2(zc), "N": cfg.N_truncation,
               "value": value, "tail_bound": bound}
    if value != -math.inf:
        payload["u_z"] = _c2(potential.eval_u_z(zc, cfg.N_truncation))
    _emit(dumps(payload), cfg.out)
    return EXIT_OK


def cmd_potential_grid(args, cfg: RunConfig) -> int:
    Z = _grid_points(args.resolution)
    Z = Z[levi.segment_distance(Z) > 0]
    u = potential.partial_sum(Z, cfg.N_truncation)
    tb = potential.tail_bound(Z, cfg.N_truncation)
    if cfg.format == "csv":
        text = _csv(POTENTIAL_CSV_COLUMNS, [[repr(z.real), repr(z.imag), repr(float(a)), repr(float(b))]
                                            for z, a, b in zip(Z, u, tb)])
    else:
        text = dumps({"schema_version": SCHEMA_VERSION, "N": cfg.N_truncation,
                      "points": [_c2(z) for z in Z], "u": [float(a) for a in u],
                      "tail_bound": [float(b) for b in tb]})
    _emit(text, cfg.out)
    fig = _figure_path(args)
    if fig:
        from . import plotting
        plotting.disc_scalar(Z, np.maximum(u, -20), fig, "u(z)", "harmonic potential")
    return EXIT_OK


def cmd_set_fiber(args, cfg: RunConfig) -> int:
    z = parse_number(args.z)
    fd = brset.DiscFibration(cfg.A, potential.LogPotential(cfg.N_truncation)).fiber(z)
    payload = fd.to_dict()
    payload.update(schema_version=SCHEMA_VERSION, A=cfg.A)
    _emit(dumps(payload), cfg.out)
    return EXIT_OK


def cmd_set_grid(args, cfg: RunConfig) -> int:
    fib = brset.DiscFibration(cfg.A, potential.LogPotential(cfg.N_truncation))
    fds = brset.fiber_grid(fib, args.resolution)
    if cfg.format == "csv":
        text = _csv(FIBER_CSV_COLUMNS, [[repr(f.z.real), repr(f.z.imag), repr(f.center.real),
                                         repr(f.center.imag), repr(f.radius),
                                         "true" if f.degenerate else "false"] for f in fds])
    else:
        text = dumps({"schema_version": SCHEMA_VERSION, "A": cfg.A,
                      "fibers": [f.to_dict() for f in fds]})
    _emit(text, cfg.out)
    fig = _figure_path(args)
    if fig:
        from . import plotting
        Z = np.array([f.z for f in fds])
        logr = np.array([math.log10(f.radius) if f.radius > 0 else -300.0 for f in fds])
        plotting.disc_scalar(Z, logr, fig, "log10 radius", f"fibers of K, A = {cfg.A:g}")
    return EXIT_OK


def cmd_levi_certify(args, cfg: RunConfig) -> int:
    rep = levi.certify(cfg.A, cfg.grid, cfg.angles, cfg.epsilon, cfg.margin, cfg.workers)
    _emit(dumps(rep.to_dict()), cfg.out)
    fib = brset.DiscFibration(cfg.A)
    if args.dump:
        path = _resolve(args.dump)
        path.write_text(levi.grid_csv(fib, cfg.grid, cfg.angles, cfg.epsilon))
    fig = _figure_path(args)
    if fig:
        from . import plotting
        Z = levi.certification_grid(cfg.grid, cfg.epsilon)
        H = levi.levi_values(fib, Z[:, None], levi.theta_grid(cfg.angles)[None, :]).min(axis=1)
        plotting.disc_scalar(Z, H, fig, "min over angles of H", f"Levi form, A = {cfg.A:g}")
    return EXIT_OK if rep.certified else EXIT_NEGATIVE


def cmd_levi_find_a(args, cfg: RunConfig) -> int:
    a_star = levi.find_min_A(args.lo, args.hi, cfg.grid, cfg.angles, cfg.epsilon, cfg.margin,
                             cfg.workers)
    above = levi.certify(a_star + 1, cfg.grid, cfg.angles, cfg.epsilon, cfg.margin, cfg.workers)
    below = levi.certify(a_star - 1, cfg.grid, cfg.angles, cfg.epsilon, cfg.margin, cfg.workers)
    payload = {"schema_version": SCHEMA_VERSION, "A_star": a_star, "lo": args.lo, "hi": args.hi,
               "grid": list(cfg.grid), "angles": cfg.angles, "epsilon": cfg.epsilon,
               "margin": cfg.margin, "width": 1e-2,
               "certified_at_A_star_plus_1": above.certified,
               "certified_at_A_star_minus_1": below.certified}
    _emit(dumps(payload), cfg.out)
    return EXIT_OK


def _load_path(spec: str) -> fiber.PathPolyline:
    text = spec
    if spec.startswith("@"):
        text = Path(spec[1:]).read_text()
    try:
        data = json.loads(text)
        return fiber.PathPolyline.from_json(data)
    except (json.JSONDecodeError, TypeError, ValueError) as exc:
        raise InputError(f"malformed path: {exc}") from None


def cmd_fiber_monodromy(args, cfg: RunConfig) -> int:
    z = parse_number(args.z)
    fd = brset.DiscFibration(cfg.A).fiber(z)
    loop = _load_path(args.path) if args.path else fiber.circle(0, 0.5)
    dich = fiber.log_chart_dichotomy(fd, loop)
    payload = dich.to_dict()
    payload.update(schema_version=SCHEMA_VERSION, A=cfg.A, path=loop.to_json())
    _emit(dumps(payload), cfg.out)
    fig = _figure_path(args)
    if fig:
        from . import plotting
        plotting.fiber_loop(loop.vertices, fd.center, fd.radius, fig,
                            f"fiber over z = {args.z}: log winding {dich.log_monodromy.winding}")
    return EXIT_OK


def _named_map(name: str, coeffs: str | None):
    if name == "exp":
        return schwarzian.exp_jet, cmath.exp
    if name == "log":
        return schwarzian.log_jet, cmath.log
    if name == "square":
        return (lambda p: schwarzian.Jet3(p, p * p, 2 * p, 2, 0)), (lambda p: p * p)
    if name == "mobius":
        if not coeffs:
            raise InputError("--coeffs a,b,c,d is required for mobius")
        vals = [parse_number(c) for c in coeffs.split(",")]
        if len(vals) != 4:
            raise InputError("--coeffs needs four numbers")
        M = schwarzian.Mobius(*(complex(float(v)) if isinstance(v, Fraction) else v for v in vals))
        return M.jet, M
    raise InputError(f"unknown map {name!r}")


def cmd_schwarzian_eval(args, cfg: RunConfig) -> int:
    p = parse_number(args.p)
    p = complex(float(p)) if isinstance(p, Fraction) else complex(p)
    jet_fn, fn = _named_map(args.fn, args.coeffs)
    if args.fd:
        jet, err = schwarzian.jet_fd(fn, p)
        route = "finite-difference"
    else:
        jet, err, route = jet_fn(p), 0.0, "closed-form"
    value = schwarzian.schwarzian(jet)
    payload = {"schema_version": SCHEMA_VERSION, "map": args.fn, "p": _c2(p), "route": route,
               "schwarzian": _c2(value), "error_estimate": err}
    if args.log_chart:
        payload["schwarzian_log_chart"] = _c2(schwarzian.schwarzian_in_log_chart(jet))
    _emit(dumps(payload), cfg.out)
    return EXIT_OK


def cmd_rigidity_bound(args, cfg: RunConfig) -> int:
    z = parse_number(args.z)
    z = complex(float(z)) if isinstance(z, Fraction) else complex(z)
    b = rigidity.blaschke_bound(z, args.N)
    payload = {"schema_version": SCHEMA_VERSION, "z": _c2(z), "N": args.N, "blaschke_bound": b,
               "sup_bound": args.M, "propagated": rigidity.vanishing_propagation(args.M, args.N, z)}
    _emit(dumps(payload), cfg.out)
    return EXIT_OK


def cmd_rigidity_certificate(args, cfg: RunConfig) -> int:
    try:
        fam = rigidity.canned_family(args.family, cfg.A)
    except KeyError as exc:
        raise InputError(str(exc)) from None
    rep = rigidity.run_certificate(fam, args.N, args.tol_zero, args.tol_cr, cfg.A)
    _emit(dumps(rep.to_dict()), cfg.out)
    fig = _figure_path(args)
    if fig:
        from . import plotting
        plotting.certificate_panel(rep, fig)
    return EXIT_OK if rep.verdict == rigidity.CONTRADICTION else EXIT_NEGATIVE


# --- parser ------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        # accept -1/3, -0.3-0.1i, -.5 as values rather than flags
        self._negative_number_matcher = re.compile(r"^-[\d.]")

    def error(self, message):
        self.print_usage(sys.stderr)
        raise InputError(message)


def _common(p, *, A=False, trunc=False, grid=False, fmt=None, figure=False):
    p.add_argument("--out", help="output file (default stdout)")
    if A:
        p.add_argument("--A", type=parse_real, default=brset.DEFAULT_A)
    if trunc:
        p.add_argument("--N", dest="truncation", type=int, default=potential.DEFAULT_TRUNCATION,
                       help="series truncation")
    if grid:
        p.add_argument("--grid", type=parse_grid, default=(64, 64))
        p.add_argument("--angles", type=int, default=32)
        p.add_argument("--epsilon", type=parse_real, default=levi.DEFAULT_EPSILON)
        p.add_argument("--margin", type=parse_real, default=None)
        p.add_argument("--workers", type=int, default=1)
    if fmt:
        p.add_argument("--format", choices=("json", "csv"), default=fmt)
    if figure:
        p.add_argument("--figure", help="also render a PNG figure to this path")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="skewcyl", description=__doc__.splitlines()[0])
    top = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)

    g = top.add_parser("potential").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = g.add_parser("eval")
    p.add_argument("--z", required=True)
    _common(p, trunc=True)
    p.set_defaults(func=cmd_potential_eval)
    p = g.add_parser("grid")
    p.add_argument("--resolution", type=int, default=64)
    _common(p, trunc=True, fmt="csv", figure=True)
    p.set_defaults(func=cmd_potential_grid)

    g = top.add_parser("set").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = g.add_parser("fiber")
    p.add_argument("--z", required=True)
    _common(p, A=True, trunc=True)
    p.set_defaults(func=cmd_set_fiber)
    p = g.add_parser("grid")
    p.add_argument("--resolution", type=int, default=32)
    _common(p, A=True, trunc=True, fmt="csv", figure=True)
    p.set_defaults(func=cmd_set_grid)

    g = top.add_parser("levi").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = g.add_parser("certify")
    _common(p, A=True, grid=True, figure=True)
    p.add_argument("--dump", help="also write the Levi grid as CSV (z_re, z_im, theta, H)")
    p.set_defaults(func=cmd_levi_certify, default_margin=0.5)
    p = g.add_parser("find-a")
    p.add_argument("--lo", type=parse_real, default=-30.0)
    p.add_argument("--hi", type=parse_real, default=30.0)
    _common(p, grid=True)
    p.set_defaults(func=cmd_levi_find_a, default_margin=0.1)

    g = top.add_parser("fiber").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = g.add_parser("monodromy")
    p.add_argument("--z", required=True)
    p.add_argument("--path", help="JSON array of [re, im] pairs, or @file.json (default: circle |w| = 1/2)")
    _common(p, A=True, figure=True)
    p.set_defaults(func=cmd_fiber_monodromy)

    g = top.add_parser("schwarzian").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = g.add_parser("eval")
    p.add_argument("--fn", required=True, choices=("exp", "log", "square", "mobius"))
    p.add_argument("--coeffs", help="a,b,c,d for --fn mobius")
    p.add_argument("--p", required=True)
    p.add_argument("--fd", action="store_true", help="finite-difference jets instead of closed form")
    p.add_argument("--log-chart", action="store_true", help="also report S in the ln w chart")
    _common(p)
    p.set_defaults(func=cmd_schwarzian_eval)

    g = top.add_parser("rigidity").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = g.add_parser("bound")
    p.add_argument("--z", required=True)
    p.add_argument("--N", type=int, default=25)
    p.add_argument("--M", type=parse_real, default=1.0)
    _common(p)
    p.set_defaults(func=cmd_rigidity_bound)
    p = g.add_parser("certificate")
    p.add_argument("--family", required=True)
    p.add_argument("--N", type=int, default=25)
    p.add_argument("--tol-zero", type=parse_real, default=1e-9)
    p.add_argument("--tol-cr", type=parse_real, default=1e-6)
    _common(p, A=True, figure=True)
    p.set_defaults(func=cmd_rigidity_certificate)
    return parser


def _config(args) -> RunConfig:
    margin = getattr(args, "margin", None)
    if margin is None:
        margin = getattr(args, "default_margin", 0.5)
    return RunConfig(
        A=getattr(args, "A", brset.DEFAULT_A),
        N_truncation=getattr(args, "truncation", potential.DEFAULT_TRUNCATION),
        grid=getattr(args, "grid", (64, 64)),
        angles=getattr(args, "angles", 32),
        epsilon=getattr(args, "epsilon", levi.DEFAULT_EPSILON),
        margin=margin,
        workers=getattr(args, "workers", 1),
        out=args.out,
        format=getattr(args, "format", "json"),
    )


def dispatch(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = _config(args)
        return args.func(args, cfg)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except (InputError, ValueError, KeyError, ZeroDivisionError, ArithmeticError, OSError) as exc:
        print(f"skewcyl: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def main():
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
