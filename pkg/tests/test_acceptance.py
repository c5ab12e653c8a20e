"""Acceptance criteria, one test per criterion.

Each test prints a ``PASS``/``FAIL`` line; the lines are repeated in the
terminal summary.  Run ``python tests/test_acceptance.py`` to execute only
this file.
"""
import numpy as np
import pytest

from solitonlab.curvature import cotton, curvature_package, div_weyl
from solitonlab.fields import DiffConfig, gradient
from solitonlab.forms import (
    E_FRAME,
    build_frames_gram_schmidt,
    build_frames_j_adapted,
    exterior_derivative_1form,
    frame_invariants,
    tensor_to_frame,
    wedge_2_2,
)
from solitonlab.hermitian import (
    div_wplus_expansion_residual,
    eigen_frame_field,
    j_adapted_frame_field,
    kappa_arrays,
    kappa_chain_residuals,
    lee_connection_claim_residual,
    lee_form,
    nabla_wplus_expansion_residual,
    theta_field,
    wplus_eigenstructure_check,
)
from solitonlab.soliton import (
    cotton_soliton_form_residual,
    cplus_contraction_identity_residual,
    grad_scalar_identity_residual,
    main_identity_lhs,
    ric0_gradf,
    soliton_residual,
)
from solitonlab.zoo import get_geometry

H = DiffConfig(h=1e-4)


def g_at(spec, x):
    return np.asarray(spec.g(x), dtype=np.float64)


def frame(spec, x):
    return build_frames_gram_schmidt(g_at(spec, x), spec.orientation).e


def fnorm(t, e, rank):
    return float(np.linalg.norm(tensor_to_frame(t, e, rank)))


def hermitian_solitons():
    return [get_geometry("gaussian"), get_geometry("round_s4", a=np.sqrt(6.0)),
            get_geometry("fubini_study"), get_geometry("product_shrinker"),
            get_geometry("page")]


def test_criterion_01_frame_algebra(acceptance):
    worst = 0.0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        A = rng.normal(size=(4, 4))
        g = A @ A.T + 0.5 * np.eye(4)
        for orientation in (1, -1):
            inv = frame_invariants(build_frames_gram_schmidt(g, orientation), g)
            worst = max(worst, inv["max"])
    acceptance(1, "frame algebra on 100 random SPD metrics", worst <= 1e-10,
               f"max {worst:.2e} <= 1e-10")


def test_criterion_02_curvature_oracles(acceptance):
    worst = {}
    for a in (1.3, np.sqrt(6.0)):
        spec = get_geometry("round_s4", a=a)
        for x in spec.points(50, 2):
            pkg = curvature_package(spec.g, x, None, H)
            worst["R-12/a^2"] = max(worst.get("R-12/a^2", 0), abs(pkg.scalar - 12 / a ** 2))
            worst["|W|"] = max(worst.get("|W|", 0), float(np.linalg.norm(pkg.weyl_frame)))
    spec = get_geometry("product_shrinker")
    for x in spec.points(50, 2):
        pkg = curvature_package(spec.g, x, None, H)
        ev = np.sort(pkg.ricci_endomorphism_eigenvalues)
        worst["product R-1"] = max(worst.get("product R-1", 0), abs(pkg.scalar - 1.0))
        worst["product Ric"] = max(worst.get("product Ric", 0),
                                   float(np.max(np.abs(ev - [0, 0, 0.5, 0.5]))))
    ok = max(worst.values()) <= 5e-6
    acceptance(2, "sphere and product curvature oracles", ok,
               ", ".join(f"{k} {v:.2e}" for k, v in worst.items()) + " <= 5e-6")


def test_criterion_03_cotton_cross_path(acceptance):
    worst = 0.0
    for seed in range(20):
        spec = get_geometry("random_poly", seed=seed)
        for x in spec.points(10, seed):
            e = frame(spec, x)
            C = cotton(spec.g, x, H).components
            D = div_weyl(spec.g, x, None, H).components
            worst = max(worst, fnorm(C + 2 * D, e, 3) / (fnorm(C, e, 3) + 1e-12))
    acceptance(3, "C + 2 div W on 20 random metrics x 10 points", worst <= 1e-4,
               f"max relative {worst:.2e} <= 1e-4")


def test_criterion_04_soliton_suite(acceptance):
    worst = [0.0, 0.0, 0.0]
    zero = get_geometry("round_s4", a=np.sqrt(6.0))
    for spec in (get_geometry("gaussian"), zero, get_geometry("fubini_study"),
                 get_geometry("product_shrinker")):
        for x in spec.points(50, 4):
            e = frame(spec, x)
            worst[0] = max(worst[0], fnorm(soliton_residual(spec.g, spec.f, x, H), e, 2))
            worst[1] = max(worst[1], fnorm(grad_scalar_identity_residual(spec.g, spec.f, x, H),
                                           e, 1))
            worst[2] = max(worst[2], fnorm(cotton_soliton_form_residual(spec.g, spec.f, x,
                                                                        None, H), e, 3))
    ok = worst[0] <= 1e-6 and worst[1] <= 5e-6 and worst[2] <= 5e-5
    acceptance(4, "soliton, gradient-of-R and Cotton soliton form", ok,
               f"{worst[0]:.2e} <= 1e-6, {worst[1]:.2e} <= 5e-6, {worst[2]:.2e} <= 5e-5")


def test_criterion_05_cplus_algebra(acceptance):
    worst = 0.0
    for seed in range(20):
        spec = get_geometry("random_poly", seed=seed)
        rng = np.random.default_rng(100 + seed)
        for x in spec.points(10, seed):
            fr = build_frames_gram_schmidt(g_at(spec, x))
            for _ in range(3):
                r = cplus_contraction_identity_residual(spec.g, rng.normal(size=4), x, fr, H)
                worst = max(worst, float(np.max(np.abs(r))))
    acceptance(5, "C+ contraction identity, 600 samples", worst <= 1e-7,
               f"max {worst:.2e} <= 1e-7")


def test_criterion_06_lee_form(acceptance):
    spec = get_geometry("conformal_hermitian", u="0.1*x1 + 0.05*x2**2")
    th_err = res = 0.0
    for x in spec.points(50, 6):
        e = frame(spec, x)
        lf = lee_form(spec.g, spec.J, x, H)
        th_err = max(th_err, float(np.linalg.norm((lf.theta - spec.expected["theta"](x)) @ e)))
        res = max(res, fnorm(lf.residual, e, 3))
    kahler = 0.0
    for name in ("gaussian", "fubini_study", "product_shrinker"):
        k = get_geometry(name)
        for x in k.points(50, 6):
            theta = lee_form(k.g, k.J, x, H).theta
            kahler = max(kahler, float(np.linalg.norm(theta @ frame(k, x))))
    ok = th_err <= 1e-6 and res <= 5e-7 and kahler <= 5e-7
    acceptance(6, "Lee form of conformal and Kahler metrics", ok,
               f"theta-2du {th_err:.2e} <= 1e-6, d omega - theta^omega {res:.2e} <= 5e-7, "
               f"Kahler theta {kahler:.2e} <= 5e-7")


def test_criterion_07_kappa_sign(acceptance):
    spec = get_geometry("conformal_hermitian")
    worst = flipped = 0.0
    for x in spec.points(50, 7):
        kp = kappa_arrays(spec.g, spec.J, x, H)
        worst = max(worst, abs(float(kp.kappa)))
        flipped = max(flipped, abs(float(kp.scalar - 1.5 * (kp.theta_norm2 - 2 * kp.delta_theta))))
    ok = worst <= 5e-5 and flipped > 5e-5
    acceptance(7, "conformal scalar curvature vanishes, flipped delta sign does not", ok,
               f"|kappa| {worst:.2e} <= 5e-5, flipped {flipped:.2e} > 5e-5")


def test_criterion_08_wplus_eigenstructure(acceptance):
    fs = get_geometry("fubini_study")
    spec_err = 0.0
    for x in fs.points(20, 8):
        pkg = curvature_package(fs.g, x, None, H)
        kap = float(kappa_arrays(fs.g, fs.J, x, H).kappa)
        want = np.array([kap / 6, -kap / 12, -kap / 12])
        spec_err = max(spec_err, float(np.max(np.abs(pkg.wplus_eigenvalues - want))),
                       abs(kap - pkg.scalar))
    page = get_geometry("page")
    gap = om = 0.0
    for x in page.points(20, 8):
        rec = wplus_eigenstructure_check(page.g, page.J, x, None, H)
        gap, om = max(gap, rec.pair_gap), max(om, rec.omega_residual)
    ok = spec_err <= 5e-5 and gap <= 1e-4 and om <= 1e-4
    acceptance(8, "W+ spectrum on Fubini-Study and Page", ok,
               f"FS {spec_err:.2e} <= 5e-5, Page gap {gap:.2e} <= 1e-4, "
               f"omega eigenform {om:.2e} <= 1e-4")


def test_criterion_09_wplus_expansions(acceptance):
    rel = 0.0
    used = 0
    for seed in range(4):
        spec = get_geometry("random_poly", seed=seed)
        for x in spec.points(12, seed):
            lam = curvature_package(spec.g, x, None, H).wplus_eigenvalues
            if min(lam[0] - lam[1], lam[1] - lam[2]) <= 0.05:
                continue
            ff = eigen_frame_field(spec.g, x, H)
            rel = max(rel, nabla_wplus_expansion_residual(spec.g, x, ff, H).relative,
                      div_wplus_expansion_residual(spec.g, x, ff, H).relative)
            used += 1
    ab = 0.0
    for name in ("fubini_study", "product_shrinker"):
        spec = get_geometry(name)
        ff = j_adapted_frame_field(spec.g, spec.J)
        for x in spec.points(10, 9):
            ab = max(ab, nabla_wplus_expansion_residual(spec.g, x, ff, H).absolute,
                     div_wplus_expansion_residual(spec.g, x, ff, H).absolute)
    ok = used >= 10 and rel <= 1e-3 and ab <= 5e-5
    acceptance(9, "nabla W+ and div W+ expansions", ok,
               f"{used} gapped points, relative {rel:.2e} <= 1e-3, J-adapted {ab:.2e} <= 5e-5")


def dtheta_wedge_omega(spec, x):
    fr = build_frames_j_adapted(g_at(spec, x), np.asarray(spec.J(x), dtype=np.float64))
    dth = exterior_derivative_1form(gradient(theta_field(spec.g, spec.J, H), x, H))
    return abs(float(wedge_2_2(tensor_to_frame(dth, fr.e, 2), E_FRAME[0])))


def test_criterion_10_kappa_chain(acceptance):
    ch = get_geometry("conformal_hermitian")
    page = get_geometry("page")
    claim_c = max(float(np.linalg.norm(lee_connection_claim_residual(ch.g, ch.J, x, H)))
                  for x in ch.points(20, 10))
    claim_p = max(float(np.linalg.norm(lee_connection_claim_residual(page.g, page.J, x, H)))
                  for x in page.points(20, 10))
    chain = 0.0
    for spec in hermitian_solitons():
        for x in spec.points(10, 10):
            chain = max(chain, max(kappa_chain_residuals(spec.g, spec.f, spec.J, x, H)
                                   .as_dict().values()))
    dtw = 0.0
    for spec in hermitian_solitons() + [ch]:
        for x in spec.points(10, 11):
            dtw = max(dtw, dtheta_wedge_omega(spec, x))
    ok = claim_c <= 5e-6 and claim_p <= 1e-4 and chain <= 5e-5 and dtw <= 5e-5
    acceptance(10, "Lee connection claim, kappa chain and d theta ^ omega", ok,
               f"claim {claim_c:.2e} <= 5e-6 / Page {claim_p:.2e} <= 1e-4, "
               f"chain {chain:.2e} <= 5e-5, d theta ^ omega {dtw:.2e} <= 5e-5")


def test_criterion_11_main_identity(acceptance):
    worst = {}
    for spec in hermitian_solitons():
        pts = spec.points(100, 12)
        worst[spec.name] = max(abs(main_identity_lhs(spec.g, spec.f, spec.J, x, H,
                                                     spec.orientation)) for x in pts)
    prod = get_geometry("product_shrinker")
    pts = prod.points(100, 12)
    pts = pts[np.linalg.norm(pts[:, 2:], axis=1) >= 0.5]
    alpha, c = ric0_gradf(prod.g, prod.f, pts, H)
    e = build_frames_gram_schmidt(c.g).e
    floor = float(np.min(np.linalg.norm(np.einsum("...i,...ia->...a", alpha, e), axis=-1)))
    ok = max(worst.values()) <= 5e-6 and floor >= 0.01
    acceptance(11, "Ric0(grad f) ^ d omega vanishes at 100 points", ok,
               ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
               + f" <= 5e-6; product |Ric0(grad f)| >= {floor:.3f} on {len(pts)} points")


def test_criterion_12_convergence(acceptance):
    # W of a conformally flat metric and d omega - theta ^ omega of a conformal
    # Hermitian pair cancel algebraically in the discrete jets, so they carry no
    # truncation error; they are required to stay at roundoff for both steps.
    a, h = 1.3, 2e-2
    sphere = get_geometry("round_s4", a=a)
    prod = get_geometry("product_shrinker")
    conf = get_geometry("conformal_hermitian")

    def truncation(cfg, x, y, z):
        ps = curvature_package(sphere.g, x, None, cfg)
        pp = curvature_package(prod.g, y, None, cfg)
        ev = np.sort(pp.ricci_endomorphism_eigenvalues)
        theta = lee_form(conf.g, conf.J, z, cfg).theta - conf.expected["theta"](z)
        return {"R sphere": abs(ps.scalar - 12 / a ** 2), "R product": abs(pp.scalar - 1.0),
                "Ric product": float(np.max(np.abs(ev - [0, 0, 0.5, 0.5]))),
                "theta": float(np.linalg.norm(theta))}

    def exact(cfg, x, z):
        return max(float(np.linalg.norm(curvature_package(sphere.g, x, None, cfg).weyl_frame)),
                   float(np.max(np.abs(lee_form(conf.g, conf.J, z, cfg).residual))))

    lo, hi, roundoff = {}, {}, 0.0
    for x, y, z in zip(sphere.points(3, 13), prod.points(3, 13), conf.points(3, 13)):
        big = truncation(DiffConfig(h=h), x, y, z)
        small = truncation(DiffConfig(h=h / 2), x, y, z)
        for k in big:
            r = big[k] / small[k] if small[k] > 0 else float("inf")
            lo[k], hi[k] = min(lo.get(k, r), r), max(hi.get(k, r), r)
        roundoff = max(roundoff, exact(DiffConfig(h=h), x, z), exact(DiffConfig(h=h / 2), x, z))
    ok = all(3.0 <= lo[k] and hi[k] <= 5.0 for k in lo) and roundoff <= 1e-13
    acceptance(12, "second-order convergence when h halves", ok,
               ", ".join(f"{k} {lo[k]:.3f}..{hi[k]:.3f}" for k in lo)
               + f" in [3, 5]; exact residuals {roundoff:.1e} <= 1e-13")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
