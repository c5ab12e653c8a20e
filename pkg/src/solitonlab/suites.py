"""Named check suites, run configuration and report serialization.

A check maps ``(geometry, point, cfg, rng)`` to a non-negative residual and
an optional dict of recorded observables.  Tolerances come from one table
keyed by derivative depth, with per-check values where a check has a
sharper or looser natural bound, and per-run overrides on top.
"""
from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .curvature import (
    cotton,
    curvature_package,
    div_weyl,
    riemann_symmetry_defects,
    rm_action_residual,
    weyl_trace_defect,
)
from .errors import ConfigurationError, SolitonLabError
from .fields import DiffConfig
from .forms import (
    J_FRAME,
    build_frames_gram_schmidt,
    build_frames_j_adapted,
    frame_invariants,
    tensor_to_frame,
)
from .hermitian import (
    RIC_J_TOL,
    case2_system_residual,
    eigen_frame_field,
    j_adapted_frame_field,
    j_frame_identities,
    kappa_arrays,
    kappa_chain_residuals,
    lee_closedness,
    lee_connection_claim_residual,
    lee_connection_symmetry_residual,
    lee_form,
    nabla_wplus_expansion_residual,
    div_wplus_expansion_residual,
    ric_j_defect,
    ric_j_identities,
    theta_arrays,
    wplus_eigenstructure_check,
)
from .soliton import (
    cotton_soliton_form_residual,
    cplus_contraction_identity_residual,
    grad_scalar_identity_residual,
    main_identity_lhs,
    ric0_gradf,
    soliton_residual,
)
from .zoo import get_geometry, list_geometries

VERSION = "0.1.0"

DEPTH_TOLERANCES = {
    "algebraic": 1e-10,
    "first": 1e-7,
    "second": 5e-5,
    "eigenframe": 1e-3,
}

EIGEN_MIN_GAP = 1e-3


@dataclass(frozen=True)
class Check:
    """One residual check.

    ``fn(spec, x, cfg, rng)`` returns ``residual`` or ``(residual, observables)``.
    ``tolerance`` overrides the depth default when given.
    """

    name: str
    depth: str
    reference: str
    fn: Callable
    applies: Callable = lambda spec: True
    tolerance: float | Callable | None = None

    def default_tolerance(self, spec=None):
        tol = self.tolerance
        if callable(tol):
            tol = tol(spec)
        return DEPTH_TOLERANCES[self.depth] if tol is None else float(tol)


# ---------------------------------------------------------------------------
# helpers


def _g(spec, x):
    return np.asarray(spec.g(x), dtype=np.float64)


def _J(spec, x):
    return np.asarray(spec.J(x), dtype=np.float64)


def _gs(spec, x):
    return build_frames_gram_schmidt(_g(spec, x), spec.orientation)


def _fnorm(t, e, rank):
    return float(np.linalg.norm(tensor_to_frame(t, e, rank)))


def _has_j(spec):
    return spec.J is not None


def _is_soliton(spec):
    return spec.f is not None and bool(spec.expected.get("soliton"))


def _hermitian_soliton(spec):
    return _is_soliton(spec) and _has_j(spec)


def _flag(key):
    return lambda spec: bool(spec.expected.get(key))


def _has(key):
    return lambda spec: spec.expected.get(key) is not None


# ---------------------------------------------------------------------------
# frames


def _frame_invariants(spec, x, cfg, rng):
    g = _g(spec, x)
    return frame_invariants(build_frames_gram_schmidt(g, spec.orientation), g)["max"]


def _j_frame(spec, x, cfg, rng):
    g, J = _g(spec, x), _J(spec, x)
    fr = build_frames_j_adapted(g, J)
    inv = frame_invariants(fr, g)["max"]
    jf = float(np.max(np.abs(fr.coframe @ J @ fr.e - J_FRAME)))
    return max(inv, jf, max(j_frame_identities().values()))


# ---------------------------------------------------------------------------
# curvature


def _riemann_symmetries(spec, x, cfg, rng):
    pkg = curvature_package(spec.g, x, _gs(spec, x), cfg)
    d = riemann_symmetry_defects(pkg.riemann_frame)
    return max(max(d.values()), weyl_trace_defect(pkg.weyl, np.linalg.inv(pkg.g)))


def _rm_action(spec, x, cfg, rng):
    return rm_action_residual(curvature_package(spec.g, x, _gs(spec, x), cfg))


def _scalar(spec, x, cfg, rng):
    pkg = curvature_package(spec.g, x, _gs(spec, x), cfg)
    return abs(pkg.scalar - spec.expected["scalar"]), {"scalar": pkg.scalar}


def _weyl_zero(spec, x, cfg, rng):
    pkg = curvature_package(spec.g, x, _gs(spec, x), cfg)
    return float(np.linalg.norm(pkg.weyl_frame))


def _ricci_spectrum(spec, x, cfg, rng):
    pkg = curvature_package(spec.g, x, _gs(spec, x), cfg)
    got = np.sort(pkg.ricci_endomorphism_eigenvalues)
    want = np.sort(np.asarray(spec.expected["ricci_eigenvalues"], dtype=np.float64))
    return float(np.max(np.abs(got - want)))


def _wplus_spectrum(spec, x, cfg, rng):
    pkg = curvature_package(spec.g, x, _gs(spec, x), cfg)
    got = pkg.wplus_eigenvalues
    want = np.asarray(spec.expected["wplus_spectrum"], dtype=np.float64)
    return float(np.max(np.abs(got - want))), {"wplus_eigenvalues": got}


def _wplus_trace(spec, x, cfg, rng):
    pkg = curvature_package(spec.g, x, _gs(spec, x), cfg)
    return abs(float(np.sum(pkg.wplus_eigenvalues))) + abs(float(np.sum(pkg.wminus_eigenvalues)))


# ---------------------------------------------------------------------------
# Cotton and div W


def _cotton_div(spec, x, cfg, rng):
    e = _gs(spec, x).e
    C = cotton(spec.g, x, cfg).components
    D = div_weyl(spec.g, x, None, cfg).components
    cn = _fnorm(C, e, 3)
    # relative where C is of unit size or larger, absolute where C is near zero
    return _fnorm(C + 2 * D, e, 3) / max(cn, 1.0), {"cotton_norm": cn}


# ---------------------------------------------------------------------------
# soliton


def _soliton(spec, x, cfg, rng):
    return _fnorm(soliton_residual(spec.g, spec.f, x, cfg), _gs(spec, x).e, 2)


def _grad_scalar(spec, x, cfg, rng):
    return _fnorm(grad_scalar_identity_residual(spec.g, spec.f, x, cfg), _gs(spec, x).e, 1)


def _cotton_soliton(spec, x, cfg, rng):
    return _fnorm(cotton_soliton_form_residual(spec.g, spec.f, x, None, cfg), _gs(spec, x).e, 3)


def _cplus(spec, x, cfg, rng):
    fr = _gs(spec, x)
    worst = 0.0
    for _ in range(3):
        v = rng.normal(size=4)
        worst = max(worst, float(np.max(np.abs(
            cplus_contraction_identity_residual(spec.g, v, x, fr, cfg)))))
    return worst


# ---------------------------------------------------------------------------
# Hermitian


def _lee(spec, x, cfg, rng):
    lf = lee_form(spec.g, spec.J, x, cfg)
    e = _gs(spec, x).e
    th = float(np.linalg.norm(lf.theta @ e))
    return _fnorm(lf.residual, e, 3), {"theta_norm": th}


def _theta_expected(spec, x, cfg, rng):
    th = theta_arrays(spec.g, spec.J, x, cfg)[0]
    want = np.asarray(spec.expected["theta"](x), dtype=np.float64)
    return float(np.linalg.norm((th - want) @ _gs(spec, x).e))


def _theta_kahler(spec, x, cfg, rng):
    th = theta_arrays(spec.g, spec.J, x, cfg)[0]
    return float(np.linalg.norm(th @ _gs(spec, x).e))


def _lee_closed(spec, x, cfg, rng):
    return lee_closedness(spec.g, spec.J, x, cfg)


def _lee_claim(spec, x, cfg, rng):
    return float(np.linalg.norm(lee_connection_claim_residual(spec.g, spec.J, x, cfg)))


def _lee_symmetry(spec, x, cfg, rng):
    return float(np.linalg.norm(lee_connection_symmetry_residual(spec.g, spec.J, x, cfg)))


def _omega_eigen(spec, x, cfg, rng):
    rec = wplus_eigenstructure_check(spec.g, spec.J, x, None, cfg)
    return rec.omega_residual, {"kappa": rec.kappa, "simple_eigenvalue": rec.simple}


def _pair_gap(spec, x, cfg, rng):
    rec = wplus_eigenstructure_check(spec.g, spec.J, x, None, cfg)
    return rec.pair_gap, {"pair": rec.pair, "ric_j_defect": rec.ric_j_defect}


def _degenerate_wplus(spec):
    return _has_j(spec) and (bool(spec.expected.get("kahler")) or _is_soliton(spec))


# ---------------------------------------------------------------------------
# kappa


def _kappa_expected(spec, x, cfg, rng):
    k = float(kappa_arrays(spec.g, spec.J, x, cfg).kappa)
    return abs(k - spec.expected["kappa"]), {"kappa": k}


def _chain(key):
    def fn(spec, x, cfg, rng):
        return float(getattr(kappa_chain_residuals(spec.g, spec.f, spec.J, x, cfg), key))
    return fn


# ---------------------------------------------------------------------------
# W+ expansions


def _expansion_frame(spec, x, cfg):
    if _has_j(spec):
        return j_adapted_frame_field(spec.g, spec.J), "absolute"
    return eigen_frame_field(spec.g, x, cfg, min_gap=EIGEN_MIN_GAP), "relative"


def _expansion(which):
    fn_res = nabla_wplus_expansion_residual if which == "nabla" else div_wplus_expansion_residual

    def fn(spec, x, cfg, rng):
        ff, mode = _expansion_frame(spec, x, cfg)
        r = fn_res(spec.g, x, ff, cfg)
        val = r.absolute if mode == "absolute" else r.relative
        return val, {"direct_norm": r.direct_norm, "offdiagonal": r.offdiagonal}
    return fn


def _expansion_tol(spec):
    return 5e-5 if spec is not None and _has_j(spec) else DEPTH_TOLERANCES["eigenframe"]


# ---------------------------------------------------------------------------
# Case 2 and the main identity


def _case2(spec, x, cfg, rng):
    return float(np.max(np.linalg.norm(case2_system_residual(spec.g, spec.f, spec.J, x, cfg),
                                       axis=-1)))


def _ric_j(spec, x, cfg, rng):
    pkg = curvature_package(spec.g, x, None, cfg)
    return ric_j_defect(pkg.ricci, _J(spec, x), pkg.frames.e)


def _ric_j_frame(spec, x, cfg, rng):
    fr = build_frames_j_adapted(_g(spec, x), _J(spec, x))
    return max(ric_j_identities(curvature_package(spec.g, x, fr, cfg).ricci_frame).values())


def _main(spec, x, cfg, rng):
    val = abs(main_identity_lhs(spec.g, spec.f, spec.J, x, cfg, spec.orientation))
    alpha, c = ric0_gradf(spec.g, spec.f, x, cfg)
    an = float(np.linalg.norm(alpha @ build_frames_gram_schmidt(c.g).e))
    return val, {"ric0_gradf_norm": an}


# ---------------------------------------------------------------------------
# catalogue

CHECKS = {c.name: c for c in [
    Check("frame_invariants", "algebraic", "self-dual and anti-self-dual frame algebra",
          _frame_invariants),
    Check("j_adapted_frame", "algebraic", "J-adapted frame with E1 = omega", _j_frame, _has_j),
    Check("riemann_symmetries", "first", "algebraic symmetries of Rm and trace-free W",
          _riemann_symmetries, tolerance=1e-8),
    Check("rm_action", "first", "Rm acting on self-dual 2-forms", _rm_action, tolerance=1e-8),
    Check("scalar_curvature", "second", "scalar curvature oracle", _scalar, _has("scalar"),
          tolerance=5e-6),
    Check("weyl_vanishes", "second", "conformally flat W = 0", _weyl_zero,
          _flag("conformally_flat"), tolerance=5e-6),
    Check("ricci_spectrum", "second", "Ricci eigenvalue oracle", _ricci_spectrum,
          _has("ricci_eigenvalues"), tolerance=5e-6),
    Check("wplus_spectrum", "second", "W+ eigenvalue oracle", _wplus_spectrum,
          _has("wplus_spectrum")),
    Check("wplus_trace", "second", "W+ and W- trace-free", _wplus_trace, tolerance=1e-8),
    Check("cotton_plus_2divw", "second", "C = -2 div W cross-path", _cotton_div,
          tolerance=1e-4),
    Check("soliton_residual", "second", "Ric + Hess f = g/2", _soliton, _is_soliton,
          tolerance=1e-6),
    Check("grad_scalar_identity", "second", "2 Ric(grad f) = dR", _grad_scalar, _is_soliton,
          tolerance=5e-6),
    Check("cotton_soliton_form", "second", "Cotton tensor of a soliton", _cotton_soliton,
          _is_soliton),
    Check("cplus_contraction", "first", "C+ contraction algebra", _cplus),
    Check("lee_extraction", "first", "d omega = theta ^ omega", _lee, _has_j, tolerance=5e-7),
    Check("theta_oracle", "first", "Lee form of exp(2u) delta is 2 du", _theta_expected,
          lambda s: _has_j(s) and _has("theta")(s), tolerance=1e-6),
    Check("theta_vanishes_kahler", "first", "Kaehler metrics have theta = 0", _theta_kahler,
          lambda s: _has_j(s) and _flag("kahler")(s), tolerance=5e-7),
    Check("lee_closed", "second", "d theta = 0", _lee_closed,
          lambda s: _has_j(s) and _flag("lee_closed")(s)),
    Check("lee_connection_claim", "first", "E3 Om_1^2 = -theta/2", _lee_claim, _has_j,
          tolerance=5e-6),
    Check("lee_connection_symmetry", "first", "E3 Om_1^2 = -E2 Om_1^3", _lee_symmetry, _has_j,
          tolerance=5e-6),
    Check("wplus_omega_eigenform", "second", "W+(omega) = kappa/6 omega", _omega_eigen, _has_j,
          tolerance=1e-4),
    Check("wplus_pair_degenerate", "second", "degenerate W+ bottom pair", _pair_gap,
          _degenerate_wplus, tolerance=1e-4),
    Check("kappa_oracle", "second", "conformal scalar curvature oracle", _kappa_expected,
          lambda s: _has_j(s) and _has("kappa")(s)),
    Check("kappa_chain_a", "second", "first Case-2 equation", _chain("a"), _hermitian_soliton),
    Check("kappa_chain_b", "second", "dX equation", _chain("b"), _hermitian_soliton),
    Check("kappa_chain_c", "second", "Ric0(grad f) ^ theta + kappa/2 d theta", _chain("c"),
          _hermitian_soliton),
    Check("kappa_chain_d", "second", "d theta ^ omega = 0", _chain("d"), _hermitian_soliton),
    Check("nabla_wplus_expansion", "eigenframe", "nabla W+ in an eigenframe",
          _expansion("nabla"), tolerance=_expansion_tol),
    Check("div_wplus_expansion", "eigenframe", "div W+ in an eigenframe", _expansion("div"),
          tolerance=_expansion_tol),
    Check("case2_system", "second", "Case-2 system", _case2, _hermitian_soliton,
          tolerance=1e-4),
    Check("ric_j_invariant", "second", "J-invariant Ricci", _ric_j, _hermitian_soliton,
          tolerance=RIC_J_TOL),
    Check("ric_j_frame_relations", "second", "omega Ric omega = -Ric", _ric_j_frame,
          _hermitian_soliton, tolerance=RIC_J_TOL),
    Check("main_identity", "second", "Ric0(grad f) ^ d omega = 0", _main, _hermitian_soliton,
          tolerance=5e-6),
]}

SUITES = {
    "frames": ["frame_invariants", "j_adapted_frame"],
    "curvature": ["riemann_symmetries", "rm_action", "scalar_curvature", "weyl_vanishes",
                  "ricci_spectrum", "wplus_spectrum", "wplus_trace"],
    "cotton-divergence": ["cotton_plus_2divw"],
    "soliton": ["soliton_residual", "grad_scalar_identity", "cotton_soliton_form"],
    "cplus-algebra": ["cplus_contraction"],
    "hermitian-lee": ["lee_extraction", "theta_oracle", "theta_vanishes_kahler", "lee_closed",
                      "lee_connection_claim", "lee_connection_symmetry",
                      "wplus_omega_eigenform", "wplus_pair_degenerate"],
    "kappa": ["kappa_oracle", "kappa_chain_a", "kappa_chain_b", "kappa_chain_c",
              "kappa_chain_d"],
    "divwplus-expansion": ["nabla_wplus_expansion", "div_wplus_expansion"],
    "case2": ["ric_j_invariant", "ric_j_frame_relations", "case2_system"],
    "main-identity": ["main_identity"],
}
SUITES["all"] = [name for names in SUITES.values() for name in names]


def list_suites():
    return list(SUITES)


# ---------------------------------------------------------------------------
# configuration and report


@dataclass(frozen=True)
class RunConfig:
    """Validated run parameters.

    Raises
    ------
    ConfigurationError
        Unknown metric or suite, ``points < 1``, ``h <= 0`` or a tolerance
        override naming a check outside the suite.
    """

    metric: str
    suite: str
    points: int = 10
    seed: int = 0
    params: dict = field(default_factory=dict)
    h: float | None = None
    tolerances: dict = field(default_factory=dict)
    out: str | None = None

    def __post_init__(self):
        if self.metric not in list_geometries():
            raise ConfigurationError(f"unknown metric {self.metric!r}; "
                                     f"choose from {list_geometries()}")
        if self.suite not in SUITES:
            raise ConfigurationError(f"unknown suite {self.suite!r}; choose from {list_suites()}")
        if int(self.points) != self.points or self.points < 1:
            raise ConfigurationError(f"points must be a positive integer, got {self.points}")
        if not (0 <= int(self.seed) < 2 ** 64):
            raise ConfigurationError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.h is not None and not (math.isfinite(self.h) and self.h > 0):
            raise ConfigurationError(f"h must be positive and finite, got {self.h}")
        unknown = set(self.tolerances) - set(SUITES[self.suite])
        if unknown:
            raise ConfigurationError(f"tolerance override for checks not in suite "
                                     f"{self.suite!r}: {sorted(unknown)}")
        for k, v in self.tolerances.items():
            if not (math.isfinite(v) and v > 0):
                raise ConfigurationError(f"tolerance for {k} must be positive, got {v}")

    def echo(self):
        return {"metric": self.metric, "params": dict(sorted(self.params.items())),
                "suite": self.suite, "points": int(self.points), "seed": int(self.seed),
                "h": self.h, "tolerances": dict(sorted(self.tolerances.items()))}


@dataclass
class VerificationReport:
    version: str
    config: dict
    points: list
    summary: dict
    wall_time: float | None = None

    @property
    def passed(self):
        return all(s["fail"] == 0 for s in self.summary.values())

    def as_dict(self, timing=False):
        out = {"version": self.version, "config": self.config, "points": self.points,
               "summary": self.summary}
        if timing:
            out["wall_time"] = self.wall_time
        return out


def _evaluate(check, spec, x, cfg, rng, tol):
    rec = {"name": check.name, "tolerance": tol, "reference": check.reference}
    try:
        out = check.fn(spec, x, cfg, rng)
        res, obs = out if isinstance(out, tuple) else (out, None)
        res = float(res)
        rec["residual"] = res
        rec["pass"] = bool(math.isfinite(res) and res <= tol)
        if obs:
            rec["observables"] = {k: _plain(v) for k, v in sorted(obs.items())}
    except SolitonLabError as exc:
        rec["residual"] = None
        rec["pass"] = False
        rec["error"] = f"{type(exc).__name__}: {exc}"
    return rec


def _plain(v):
    if isinstance(v, np.ndarray):
        return [float(t) for t in v.ravel()]
    return float(v)


def run_suite(config):
    """Run every applicable check of ``config.suite`` at seeded points.

    Numerical precondition failures become failed records carrying the
    error message.  Points are evaluated in index order, so the report is
    deterministic.
    """
    t0 = time.perf_counter()
    spec = get_geometry(config.metric, **config.params)
    cfg = DiffConfig() if config.h is None else DiffConfig(h=config.h)
    checks = [CHECKS[n] for n in SUITES[config.suite] if CHECKS[n].applies(spec)]
    if not checks:
        raise ConfigurationError(f"suite {config.suite!r} has no checks applicable to "
                                 f"{config.metric!r}")
    tols = {c.name: config.tolerances.get(c.name, c.default_tolerance(spec)) for c in checks}
    pts = spec.points(config.points, config.seed)
    records = []
    for i, x in enumerate(pts):
        recs = []
        for c in checks:
            rng = np.random.default_rng([int(config.seed), i, _stable_hash(c.name)])
            recs.append(_evaluate(c, spec, x, cfg, rng, tols[c.name]))
        records.append({"index": i, "point": [float(t) for t in x], "checks": recs})
    summary = {}
    for c in checks:
        rs = [r for p in records for r in p["checks"] if r["name"] == c.name]
        vals = [r["residual"] for r in rs if r["residual"] is not None]
        summary[c.name] = {
            "max_residual": max(vals) if vals else None,
            "tolerance": tols[c.name],
            "pass": sum(r["pass"] for r in rs),
            "fail": sum(not r["pass"] for r in rs),
            "reference": c.reference,
        }
    return VerificationReport(VERSION, {**config.echo(), "checks": [c.name for c in checks]},
                              records, summary, time.perf_counter() - t0)


def _stable_hash(s):
    return int.from_bytes(s.encode(), "little") % (2 ** 63)


# ---------------------------------------------------------------------------
# serialization


def _num(x):
    if x is None or not math.isfinite(x):
        return "null"
    if float(x).is_integer() and abs(x) < 2 ** 53:
        return repr(float(x))
    return format(float(x), ".17g")


def _dump(obj, indent, level=0):
    import json

    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_dump(v, indent, level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.floating)) and not isinstance(v, bool)
               for v in obj):
            return "[" + ", ".join(_dump(v, indent) for v in obj) + "]"
        items = [pad + _dump(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def report_json(report, timing=False):
    """JSON text with floats written to 17 significant digits."""
    return _dump(report.as_dict(timing), 2) + "\n"


def report_csv(report):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["check", "max_residual", "tolerance", "pass"])
    for name, s in report.summary.items():
        mr = "" if s["max_residual"] is None else format(s["max_residual"], ".17g")
        ok = "true" if s["fail"] == 0 else "false"
        w.writerow([name, mr, format(s["tolerance"], ".17g"), ok])
    return buf.getvalue()


def emit_report(report, path, fmt="json", timing=False):
    """Write ``report`` to ``path`` (``"-"`` for stdout).

    Raises
    ------
    OSError
        Re-raised with the path when the file cannot be written.
    """
    if fmt == "json":
        text = report_json(report, timing)
    elif fmt == "csv-summary":
        text = report_csv(report)
    else:
        raise ConfigurationError(f"unknown format {fmt!r}; use json or csv-summary")
    if path == "-":
        import sys

        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc.strerror or exc}") from exc
