"""Command-line driver.

Exit codes: 0 when every selected check passes, 1 when a check fails,
2 for invalid input and 3 for numerical failures.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from ._kernels import BACKEND
from .abelian import LATTICE_TOL, abel_jacobi_point, compute_periods
from .chen import compute_iter_matrices
from .curve import CurveSpec, SurfacePoint, make_curve
from .errors import EvenDegreeUnsupported, InputError, NumericalError
from .extension import (
    extension_class,
    period_relation_matrix,
    verify_group_ring_relation,
    verify_higher_period_relation,
    verify_main_theorem,
    verify_third_kind_reciprocity,
)
from .quadrature import QuadratureConfig
from .sampling import point_from_values, random_points
from .serialize import cplx, dumps
from .theta import (
    riemann_constant,
    riemann_constant_from_traces,
    verify_kappa_canonical,
    verify_riemann_vanishing,
)
from .topology import build_homology_basis

CHECKS = ("main", "period-relation", "group-ring", "theta", "reciprocity")


class _Phases:
    def __init__(self):
        self.times: dict = {}

    def run(self, name, fn, *args, **kwargs):
        t = time.perf_counter()
        try:
            return fn(*args, **kwargs)
        finally:
            self.times[name] = self.times.get(name, 0.0) + time.perf_counter() - t


def load_curve_file(path: str) -> tuple:
    """Read ``{"f": [[re, im], ...], "points": {"p": [...], "q": [...]}}``."""
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read curve file {path}: {exc}") from None
    if "f" not in data:
        raise InputError("curve file lacks the coefficient list 'f'")
    curve = make_curve(data["f"])
    pts = {k: point_from_values(curve, v) for k, v in data.get("points", {}).items()}
    return curve, pts


def _parse_point(curve: CurveSpec, text: str) -> SurfacePoint:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise InputError(f"cannot parse point {text!r}") from None
    return point_from_values(curve, vals)


class Session:
    """Shared state for one run: curve, points, loops, periods and iterated integrals."""

    def __init__(self, args):
        self.args = args
        self.phases = _Phases()
        self.cfg = QuadratureConfig(nodes=args.nodes, max_depth=args.max_depth, eps=args.eps)
        self.curve, pts = load_curve_file(args.curve)
        self.rng = np.random.default_rng(args.seed)
        self.p = _parse_point(self.curve, args.p) if args.p else pts.get("p")
        if self.p is None:
            self.p = random_points(self.curve, self.rng, 1)[0]
        self.q = _parse_point(self.curve, args.q) if args.q else pts.get("q")
        if self.q is None:
            self.q = random_points(self.curve, self.rng, 1, avoid=[self.p.x])[0]
        self.loops = self.phases.run("loops", build_homology_basis, self.curve, self.p, self.cfg,
                                     q=self.q if self.q != self.p else None)
        self.periods = self.phases.run("periods", compute_periods, self.curve, self.loops, self.cfg)
        self.iters = self.phases.run("iterated", compute_iter_matrices, self.curve, self.loops, self.periods.N, self.cfg)
        if args.perturb_z:
            # negative control: shift Z after the iterated integrals were formed
            Z = self.periods.Z + args.perturb_z
            self.periods = dataclasses.replace(self.periods, Z=Z, A=np.linalg.inv(Z.conj() - Z))
        self.kappa = riemann_constant(self.periods, self.iters)

    def header(self) -> dict:
        c = self.curve
        return {
            "tool": "hypermhs",
            "version": __version__,
            "kernels": BACKEND,
            "seed": self.args.seed,
            "quadrature": {"nodes": self.cfg.nodes, "max_depth": self.cfg.max_depth, "eps": self.cfg.eps},
            "tol": self.args.tol,
            "perturb_z": self.args.perturb_z,
            "curve": {"f": [list(s) for s in c.source], "genus": c.genus, "degree": c.degree,
                      "branch_points": cplx(list(c.roots))},
            "p": cplx([self.p.x, self.p.y]),
            "q": cplx([self.q.x, self.q.y]),
        }


# ------------------------------------------------------------------ sections


def section_periods(s: Session) -> tuple:
    per = s.periods
    pi = period_relation_matrix(per)
    pi_res = float(np.max(np.abs(pi)))
    ok = per.symmetry_residual < 1e-8 and per.a_residual < 1e-10 and pi_res < 1e-8
    frag = per.to_json()
    frag.update({"period_relation_residual": pi_res, "pass": bool(ok)})
    return frag, ok


def section_kappa(s: Session) -> tuple:
    k2 = riemann_constant_from_traces(s.periods, s.iters)
    frag = {
        "kappa": cplx(s.kappa.v),
        "kappa_reduced": cplx(s.kappa.reduced().v),
        "two_formula_difference": float(np.max(np.abs(s.kappa.v - k2.v))),
    }
    ok = True
    try:
        canon = s.phases.run("kappa", verify_kappa_canonical, s.curve, s.periods, s.loops, s.kappa, s.cfg, tol=s.args.tol)
        frag["canonical"] = canon
        ok &= canon["pass"]
    except EvenDegreeUnsupported as exc:
        frag["canonical"] = {"skipped": str(exc)}
    return frag, ok


def section_theta(s: Session) -> tuple:
    g = s.curve.genus
    rng = np.random.default_rng([s.args.seed, 1])
    trials = [tuple(random_points(s.curve, rng, g - 1, avoid=[s.p.x])) for _ in range(s.args.trials)]
    if g == 1:
        trials = [()]
    frag = s.phases.run("theta", verify_riemann_vanishing, s.curve, s.periods, s.loops, s.kappa, trials, s.cfg,
                        seed=s.args.seed)
    return frag, frag["pass"]


def section_extension(s: Session) -> tuple:
    g = s.curve.genus
    u = abel_jacobi_point(s.curve, s.periods, s.loops, s.q, s.cfg)
    ext = extension_class(s.periods, s.iters, u, g)
    red = (ext.v_pp - 2 * s.kappa).reduce()
    frag = ext.to_json()
    frag.update({"v_pp_minus_2kappa": red.to_json(), "pass": bool(red.residual < s.args.tol)})
    return frag, frag["pass"]


def section_main(s: Session) -> tuple:
    frags = [
        s.phases.run("main", verify_main_theorem, s.curve, s.periods, s.loops, s.iters, s.q, s.cfg,
                     kappa=s.kappa, tol=s.args.tol),
        s.phases.run("main", verify_main_theorem, s.curve, s.periods, s.loops, s.iters, s.p, s.cfg,
                     kappa=s.kappa, tol=s.args.tol),
    ]
    frags[1]["name"] = "main_theorem_q_equals_p"
    return frags, all(f["pass"] for f in frags)


def section_period_relation(s: Session) -> tuple:
    frag = verify_higher_period_relation(s.periods, s.iters, tol=s.args.tol)
    return frag, frag["pass"]


def section_group_ring(s: Session) -> tuple:
    if s.loops.delta is None:
        return {"name": "group_ring_relation", "skipped": "q equals p, no puncture loop"}, True
    frag = s.phases.run("group_ring", verify_group_ring_relation, s.curve, s.loops, s.periods, s.cfg)
    return frag, frag["pass"]


def section_reciprocity(s: Session) -> tuple:
    if s.q == s.p:
        return {"name": "third_kind_reciprocity", "skipped": "q equals p"}, True
    rng = np.random.default_rng([s.args.seed, 2])
    q2 = random_points(s.curve, rng, 1, avoid=[s.p.x, s.q.x])[0]
    frag = s.phases.run("reciprocity", verify_third_kind_reciprocity, s.curve, s.p, s.q, q2, s.cfg, tol=s.args.tol)
    return frag, frag["pass"]


VERIFY = {
    "main": section_main,
    "period-relation": section_period_relation,
    "group-ring": section_group_ring,
    "theta": section_theta,
    "reciprocity": section_reciprocity,
}


def _checks_for(s: Session, which: str) -> tuple:
    names = CHECKS if which == "all" else (which,)
    out, ok = {}, True
    for name in names:
        if name == "theta":
            frag, passed = section_kappa(s)
            out["kappa"] = frag
            ok &= passed
        frag, passed = VERIFY[name](s)
        out[name] = frag
        ok &= passed
    return out, ok


def build_report(args) -> tuple:
    s = Session(args)
    report = s.header()
    cmd = args.command
    ok = True
    if cmd in ("periods", "report"):
        report["periods"], passed = section_periods(s)
        ok &= passed
    if cmd in ("kappa", "report"):
        report["kappa"], passed = section_kappa(s)
        ok &= passed
        if cmd == "kappa":
            report["theta"], passed = section_theta(s)
            ok &= passed
    if cmd in ("extension", "report"):
        report["extension"], passed = section_extension(s)
        ok &= passed
    if cmd == "report":
        report["iterated"] = s.iters.to_json()
    if cmd in ("verify", "report"):
        checks, passed = _checks_for(s, getattr(args, "which", "all"))
        report["checks"] = checks
        ok &= passed
    report["pass"] = bool(ok)
    if args.timings:
        report["timings"] = s.phases.times
    return report, ok


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--curve", required=True, help="curve file (JSON)")
    common.add_argument("--p", help="basepoint 'x_re,x_im[,y_re,y_im]'")
    common.add_argument("--q", help="puncture 'x_re,x_im[,y_re,y_im]'")
    common.add_argument("--tol", type=float, default=LATTICE_TOL, help="lattice residual tolerance")
    common.add_argument("--nodes", type=int, default=32, help="Gauss-Legendre nodes per panel")
    common.add_argument("--max-depth", type=int, default=12, help="maximal bisection depth")
    common.add_argument("--eps", type=float, default=1e-10, help="relative quadrature tolerance")
    common.add_argument("--seed", type=int, default=0, help="seed for random trial points")
    common.add_argument("--trials", type=int, default=10, help="number of theta-vanishing trials")
    common.add_argument("--out", help="write the JSON report here")
    common.add_argument("--json", action="store_true", help="print the JSON report to stdout")
    common.add_argument("--perturb-z", type=float, default=0.0, help="add this to Z (negative control)")
    common.add_argument("--timings", action="store_true", help="include wall-clock times in the report")

    parser = argparse.ArgumentParser(prog="hypermhs", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("periods", parents=[common], help="period matrix, Z and A")
    sub.add_parser("kappa", parents=[common], help="Riemann's constant and its checks")
    sub.add_parser("extension", parents=[common], help="images of the extension classes")
    v = sub.add_parser("verify", parents=[common], help="run theorem checks")
    v.add_argument("which", nargs="?", default="all", choices=("all",) + CHECKS)
    sub.add_parser("report", parents=[common], help="everything")
    return parser


def _summary(report: dict) -> str:
    lines = [f"genus {report['curve']['genus']}, kernels {report['kernels']}"]

    def walk(prefix, node):
        if isinstance(node, dict):
            if "pass" in node and "residuals" in node:
                res = max(node["residuals"]) if node["residuals"] else 0.0
                lines.append(f"{'PASS' if node['pass'] else 'FAIL'}  {prefix:<40s} max residual {res:.3e}")
            for k, v in node.items():
                if isinstance(v, (dict, list)) and k not in ("inputs", "trials", "functionals"):
                    walk(f"{prefix}.{k}" if prefix else k, v)
        elif isinstance(node, list):
            for i, v in enumerate(node):
                walk(f"{prefix}[{i}]", v)

    walk("", {k: v for k, v in report.items() if k not in ("curve",)})
    lines.append("overall: " + ("PASS" if report["pass"] else "FAIL"))
    return "\n".join(lines)


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        report, ok = build_report(args)
    except InputError as exc:
        print(f"input error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    text = dumps(report)
    if args.out:
        Path(args.out).write_text(text + "\n")
    if args.json:
        print(text)
    else:
        print(_summary(report))
    return 0 if ok else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
