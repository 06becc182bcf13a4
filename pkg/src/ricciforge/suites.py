"""Claim runners shared by the command line and the acceptance tests.

Every runner returns a :class:`~ricciforge.reports.VerificationReport`
whose ``worst_margin`` is non-negative exactly when the claim holds at its
tolerance.
"""

from __future__ import annotations

import time
from contextlib import contextmanager

import numpy as np

from . import global_verify as gv
from . import heisenberg as hz
from . import perturbation as pt
from .curvature_oracle import (circle_bundle_chart, conformal_ricci, conformally_scaled,
                               covariant_hessian, curvature_at, scalar_jet, sphere2_half_metric,
                               sphere_gnomonic_metric, sphere_polar_metric)
from .harmonic import green_radial, green_radial_d1, green_radial_d2, potential_u
from .metric import (MetricParams, choose_lambda, conformal_ricci_identity, lambda_margins, ricci_bundle_standard,
                     ricci_closed_form, ricci_layers, relative_deviation, standard_grid, w_of_potential)
from .reports import VerificationReport
from .s3core import DEFAULT_EXCLUSION, PoleConfiguration, to_complex, to_vec


@contextmanager
def _clock(enabled: bool):
    box = {"ms": 0}
    t0 = time.perf_counter()
    yield box
    box["ms"] = int(round((time.perf_counter() - t0) * 1000)) if enabled else 0


def resolve_lambda(k: int, lam, delta: float = 0.05) -> float:
    if lam is None or lam == "auto":
        return choose_lambda(k, delta)
    return float(lam)


# ---------------------------------------------------------------------------
# Green's function and potential


def green_ode(points: int = 100, timing: bool = False) -> VerificationReport:
    with _clock(timing) as clk:
        s = np.linspace(0.1, 3.0, points)
        res = np.abs(green_radial_d2(s) + 2 * np.cos(s) / np.sin(s) * green_radial_d1(s) - 1 / np.pi).max()
    return VerificationReport("green.ode", {"k": None, "lambda": None}, points, 1e-8 - res, 1e-8,
                              clk["ms"], value=float(res))


def green_limit(s: float = 1e-4, timing: bool = False) -> VerificationReport:
    with _clock(timing) as clk:
        err = abs(s * green_radial(s) - 0.5)
    return VerificationReport("green.limit", {"k": None, "lambda": None, "s": s}, 1, 1e-3 - err, 1e-3,
                              clk["ms"], value=float(err))


def averaging_deviation(k: int, x) -> np.ndarray:
    """``|u_k(z) - (1/k) sum_l u_1(w^l z1, w^l z2)|`` with ``w = exp(2 pi i / k)``."""
    cfg_k = PoleConfiguration.roots_of_unity(k)
    cfg_1 = PoleConfiguration.roots_of_unity(1)
    z1, z2 = to_complex(x)
    acc = 0.0
    for ell in range(k):
        w = np.exp(2j * np.pi * ell / k)
        acc = acc + potential_u(cfg_1, to_vec(w * z1, w * z2))
    return np.abs(potential_u(cfg_k, x, scaled=True) - acc / k)


def averaging_identity(k: int, n: int = 100, seed: int = 0, timing: bool = False) -> VerificationReport:
    with _clock(timing) as clk:
        rng = np.random.default_rng(seed)
        x = rng.normal(size=(n, 4))
        x /= np.linalg.norm(x, axis=1, keepdims=True)
        dev = averaging_deviation(k, x).max()
    return VerificationReport("harmonic.averaging", {"k": k, "lambda": None}, n, 1e-10 - dev, 1e-10,
                              clk["ms"], seed, value=float(dev))


# ---------------------------------------------------------------------------
# Ricci curvature


def ricci_band(k: int, lam=None, samples: int = 10_000, exclusion: float = DEFAULT_EXCLUSION, seed: int = 0,
               delta: float = 0.05, upper: float = 2.5, vertical_cap: float = 0.05,
               timing: bool = False) -> VerificationReport:
    """Eigenvalues in (0, upper], vertical entry in (0, vertical_cap], mixed block zero."""
    with _clock(timing) as clk:
        lam = resolve_lambda(k, lam, delta)
        x = standard_grid(k, samples, seed, exclusion)
        form = ricci_closed_form(MetricParams(k, lam), x)
        ev = form.eigenvalues()
        vert = np.asarray(form.vertical)
        mixed = float(np.abs(form.mixed).max())
        lo, hi = float(ev.min()), float(ev.max())
        # strict lower bounds: a zero eigenvalue gives a negative margin
        margins = {
            "positive": lo if lo > 0 else -1.0,
            "upper": upper - hi,
            "vertical_positive": float(vert.min()) if vert.min() > 0 else -1.0,
            "vertical_upper": vertical_cap - float(vert.max()),
            "mixed_zero": 0.0 - mixed,
        }
        worst = min(margins.values())
    return VerificationReport("metric.ricci_band", {"k": k, "lambda": lam, "exclusion": exclusion}, len(x),
                              worst, 0.0, clk["ms"], seed, value=[lo, hi],
                              extra={"margins": margins, "max_vertical": float(vert.max()),
                                     "min_vertical": float(vert.min())})


def layer_consistency(k: int, n: int = 100, seed: int = 0, lam: float = 64.0, timing: bool = False) -> VerificationReport:
    """Pairwise relative deviation of the four formula layers, plus the power check."""
    with _clock(timing) as clk:
        x = standard_grid(k, n, seed)
        params = MetricParams(k, lam)
        layers = ricci_layers(params, x)
        names = list(layers)
        worst = 0.0
        pairs = {}
        for i in range(len(names)):
            for j in range(i + 1, len(names)):
                d = float(relative_deviation(layers[names[i]], layers[names[j]]).max())
                pairs[f"{names[i]}~{names[j]}"] = d
                worst = max(worst, d)
        power1 = ricci_closed_form(params, x, basefin_power=1)
        dev1 = float(relative_deviation(power1, layers["general"]).max())
    return VerificationReport("metric.layers", {"k": k, "lambda": lam}, len(x), 1e-9 - worst, 1e-9, clk["ms"],
                              seed, value=worst,
                              notes="closed form uses (V+Lambda)^2; power 1 deviates by %.3g" % dev1,
                              extra={"pairs": pairs, "power1_deviation": dev1})


def resample_lambda(k: int, delta: float = 0.05, seed: int = 1, n: int = 10_000):
    lam = choose_lambda(k, delta)
    return lambda_margins(MetricParams(k, lam), standard_grid(k, n, seed)), lam


# ---------------------------------------------------------------------------
# oracles


def hopf_test_bundle(f, point) -> tuple[np.ndarray, np.ndarray]:
    """(brute-force, standard-formula) Ricci matrices of the Hopf bundle with fibre scale ``f(eta)``.

    The bundle is ``g_{S^2(1/2)} + f(eta)^2 (d psi + sin^2 eta d phi)^2`` in
    coordinates ``(eta, phi, psi)``; both matrices are in the frame
    ``{U, X1, X2}`` with ``U = f^{-1} d_psi`` and ``X_i`` horizontal lifts of
    ``d_eta`` and ``d_phi / (sin(2 eta)/2)``.
    """
    point = np.asarray(point, dtype=float)
    base = sphere2_half_metric()
    conn = lambda y: np.array([0.0 * y[0], np.sin(y[0]) ** 2])  # noqa: E731
    chart = circle_bundle_chart(base, lambda y: f(y[0]) ** 2, conn)
    ric = curvature_at(chart, point).ricci
    eta = point[0]
    f0 = float(f(eta))
    a = np.array([0.0, np.sin(eta) ** 2])
    lens = np.array([1.0, 0.5 * np.sin(2 * eta)])
    F = np.zeros((3, 3))
    F[0, 2] = 1.0 / f0
    for i in range(2):
        F[i + 1, i] = 1.0 / lens[i]
        F[i + 1, 2] = -a[i] / lens[i]
    brute = F @ ric @ F.T

    bcurv = curvature_at(base, point[:2])
    fj = scalar_jet(lambda y: f(y[0]), point[:2])
    E = np.diag(1.0 / lens)
    hess = E @ covariant_hessian(bcurv.christoffel, fj) @ E
    df = E @ fj.grad
    omega = np.array([[0.0, 2.0], [-2.0, 0.0]])  # d(sin^2 eta d phi) in the orthonormal frame
    ric_base = E @ bcurv.ricci @ E
    std = ricci_bundle_standard(f0, df, hess, omega, np.zeros(2), ric_base).matrix
    return brute, std


def oracle_hopf(points: int = 8, seed: int = 0, timing: bool = False) -> VerificationReport:
    with _clock(timing) as clk:
        rng = np.random.default_rng(seed)
        worst = 0.0
        profiles = [lambda e: 1.0 + 0.0 * e, lambda e: 0.6 + 0.0 * e, lambda e: 1.0 + 0.3 * np.cos(2 * e),
                    lambda e: np.exp(0.2 * np.sin(e))]
        for f in profiles:
            for _ in range(points):
                p = np.array([rng.uniform(0.2, 1.3), rng.uniform(0, 2 * np.pi), rng.uniform(0, 2 * np.pi)])
                b, s = hopf_test_bundle(f, p)
                worst = max(worst, float(np.abs(b - s).max()))
    return VerificationReport("oracle.hopf", {"k": None, "lambda": None}, points * len(profiles), 1e-6 - worst,
                              1e-6, clk["ms"], seed, value=worst)


def _phi_test(y):
    return 0.3 * np.sin(y[0]) * np.cos(y[1]) + 0.1 * y[2] * y[-1]


def oracle_conformal(points: int = 6, seed: int = 0, timing: bool = False) -> VerificationReport:
    """Conformal Ricci formula against brute force on the scaled metric (dimensions 3 and 4)."""
    with _clock(timing) as clk:
        rng = np.random.default_rng(seed)
        worst = 0.0
        charts = [(sphere_polar_metric(3), lambda: rng.uniform(0.4, 1.2, 3)),
                  (sphere_polar_metric(4), lambda: rng.uniform(0.4, 1.2, 4)),
                  (pt.model_chart(1, 4.0, pt.model_curvature_tensor(seed=seed)), lambda: rng.normal(size=4) * 0.5)]
        for metric, draw in charts:
            for _ in range(points):
                y = draw()
                ref = curvature_at(conformally_scaled(metric, _phi_test), y).ricci
                got = conformal_ricci(metric, _phi_test, y)
                worst = max(worst, float(np.abs(ref - got).max()))
    return VerificationReport("oracle.conformal", {"k": None, "lambda": None}, 3 * points, 1e-7 - worst, 1e-7,
                              clk["ms"], seed, value=worst)


def oracle_round(points: int = 10, seed: int = 0, timing: bool = False) -> VerificationReport:
    """Round S^3 in polar and gnomonic charts (jets and finite differences): Ric = 2 g."""
    with _clock(timing) as clk:
        rng = np.random.default_rng(seed)
        worst, worst_fd = 0.0, 0.0
        polar = sphere_polar_metric(3)
        gn = sphere_gnomonic_metric()
        for _ in range(points):
            y = rng.uniform(0.3, 1.3, 3)
            c = curvature_at(polar, y)
            worst = max(worst, float(np.abs(c.ricci - 2 * c.metric).max()))
            z = rng.normal(size=3) * 0.5
            c = curvature_at(gn, z)
            worst = max(worst, float(np.abs(c.ricci - 2 * c.metric).max()))
            c = curvature_at(gn, z, scheme="fd", h=1e-3)
            worst_fd = max(worst_fd, float(np.abs(c.ricci - 2 * c.metric).max()))
    return VerificationReport("oracle.round", {"k": None, "lambda": None}, 2 * points, 1e-8 - worst, 1e-8,
                              clk["ms"], seed, value=worst, extra={"finite_difference_error": worst_fd})


def conformal_identity(k: int, points: int = 20, seed: int = 0, lam: float = 64.0,
                       timing: bool = False) -> VerificationReport:
    with _clock(timing) as clk:
        W = w_of_potential(MetricParams(k, lam))
        x = standard_grid(k, points, seed)
        res = max(conformal_ricci_identity(W, xi)[0] for xi in x)
        literal = max(conformal_ricci_identity(W, xi, gradient_coefficient=2.0)[0] for xi in x[:5])
    return VerificationReport("metric.conformal_identity", {"k": k, "lambda": lam}, len(x), 1e-8 - res, 1e-8,
                              clk["ms"], seed, value=res, extra={"coefficient_2_residual": literal})


# ---------------------------------------------------------------------------
# global certificates


def chern_spheres(k: int, r: float, m: int = 32, timing: bool = False) -> VerificationReport:
    with _clock(timing) as clk:
        cfg = PoleConfiguration.roots_of_unity(k)
        table = gv.chern_table(cfg, r, m)
        target = 2 * np.pi * np.array([[1.0], [-1.0]])
        err = float(np.abs(table - target).max() / (2 * np.pi))
    return VerificationReport("chern.spheres", {"k": k, "lambda": None, "radius": r}, 2 * k, 1e-4 - err, 1e-4,
                              clk["ms"], value=err, extra={"sum": float(table.sum())})


def chern_clifford(k: int, m: int = 64, timing: bool = False) -> VerificationReport:
    with _clock(timing) as clk:
        val = gv.chern_integral_clifford(PoleConfiguration.roots_of_unity(k), m)
        err = abs(val - 2 * np.pi * k) / (2 * np.pi * k)
    return VerificationReport("chern.clifford", {"k": k, "lambda": None}, m * m, 1e-6 - err, 1e-6, clk["ms"],
                              value=val)


def diameter(k: int, lam=None, nodes: int = 5000, seed: int = 0, timing: bool = False) -> VerificationReport:
    with _clock(timing) as clk:
        lam = resolve_lambda(k, lam)
        rep = gv.diameter_estimate(k, lam, nodes, seed=seed)
    return VerificationReport("global.diameter", {"k": k, "lambda": lam}, rep.nodes, np.pi + 0.2 - rep.estimate,
                              0.2, clk["ms"], seed, value=rep.estimate,
                              extra={"base": rep.base_estimate, "fiber_slack": rep.fiber_slack})


def diameter_round(nodes: int = 5000, seed: int = 0, timing: bool = False) -> VerificationReport:
    with _clock(timing) as clk:
        rep = gv.diameter_estimate(1, None, nodes, seed=seed)
    return VerificationReport("global.diameter_round", {"k": None, "lambda": None}, rep.nodes,
                              0.1 - abs(rep.estimate - np.pi), 0.1, clk["ms"], seed, value=rep.estimate)


def curve_length(k: int, r: float, delta: float = 0.1, timing: bool = False) -> VerificationReport:
    """Lengths of the eight curves ``gamma_{z1}``, z1 an 8th root of unity, against the bound."""
    with _clock(timing) as clk:
        cert = gv.certify_lambda_closeness(k, r, delta)
        lengths = [gv.curve_length_gamma(k, cert.lam, np.exp(2j * np.pi * j / 8), r) for j in range(8)]
        bound = gv.curve_length_bound(r, delta)
    return VerificationReport("global.curve_length", {"k": k, "lambda": cert.lam, "r": r, "delta": delta}, 8,
                              bound - max(lengths), 0.0, clk["ms"], value=max(lengths),
                              extra={"bound": bound, "closeness": [cert.outer_margin, cert.inner_margin]})


def curve_speed(r: float, points: int = 20_000, projected: bool = True, timing: bool = False) -> VerificationReport:
    with _clock(timing) as clk:
        t = np.linspace(2 * np.sqrt(r) / points, 2 * np.sqrt(r), points)
        margin = float((3 * t - gv.gamma_speed(1.0, t, projected)).min())
    return VerificationReport("global.curve_speed", {"k": None, "lambda": None, "r": r, "projected": projected},
                              points, margin, 0.0, clk["ms"], value=margin)


def closeness(k: int, lam, r: float, delta: float, samples: int = 10_000, seed: int = 0,
              timing: bool = False) -> VerificationReport:
    with _clock(timing) as clk:
        rep = gv.vlambda_closeness(k, float(lam), r, delta, samples, seed)
    return VerificationReport("global.closeness", {"k": k, "lambda": float(lam), "r": r, "delta": delta},
                              rep.samples, min(rep.outer_margin, rep.inner_margin), 0.0, clk["ms"], seed)


# ---------------------------------------------------------------------------
# groups


def group_axioms(k: int) -> dict[str, bool]:
    """Exhaustive identity, inverse and associativity checks via the multiplication table."""
    T = hz.multiplication_table(k)
    n = T.shape[0]
    ident = bool(np.all(T[0] == np.arange(n)) and np.all(T[:, 0] == np.arange(n)))
    inv = bool(np.all(np.sum(T == 0, axis=1) == 1) and np.array_equal(np.argmax(T == 0, 1), np.argmax(T == 0, 0)))
    assoc = all(np.array_equal(T[T[i]], T[i][T]) for i in range(n))
    X, Y, Z = hz.generators(k)
    e = hz.HeisenbergElement.identity(k)
    rel = (hz.commutator(X, Y) == Z and X * Z == Z * X and Y * Z == Z * Y
           and X**k == e and Y**k == e and Z**k == e and len(hz.elements(k)) == k**3)
    inverses = all(g * g.inverse() == e for g in hz.elements(k))
    return {"identity": ident, "inverse": inv and inverses, "associativity": assoc, "relations": bool(rel)}


def nil_checks(k: int, points: int = 100, seed: int = 0, freeness: bool = True) -> dict[str, bool]:
    X, Y, Z = hz.generators(k)
    pts = hz.random_nil_points(points, k, seed)
    comm = all(hz.nil_equal(hz.nil_act(hz.commutator(X, Y), p), hz.nil_act(Z, p)) for p in pts)
    rng = np.random.default_rng(seed)
    hom = True
    for p in pts[:20]:
        g = hz.HeisenbergElement(*rng.integers(0, k, 3), k)
        h = hz.HeisenbergElement(*rng.integers(0, k, 3), k)
        hom &= hz.nil_equal(hz.nil_act(g, hz.nil_act(h, p)), hz.nil_act(g * h, p))
    out = {"commutator_is_Z": comm, "homomorphism": bool(hom)}
    if freeness:
        els = [g for g in hz.elements(k) if not g.is_identity]
        out["free"] = not any(hz.nil_equal(hz.nil_act(g, p), p, 1e-9) for g in els for p in pts)
    return out


def group_relations(k: int, seed: int = 0, timing: bool = False) -> VerificationReport:
    with _clock(timing) as clk:
        checks = group_axioms(k)
        checks.update(nil_checks(k, seed=seed, freeness=k <= 5))
        ok = all(checks.values())
    return VerificationReport("group.relations", {"k": k, "lambda": None}, k**3, 0.0 if ok else -1.0, 0.0,
                              clk["ms"], seed, value=checks)


def group_index(k: int, timing: bool = False) -> VerificationReport:
    """The minimal abelian index; the claim is that it exceeds 1 and equals k at desk scale."""
    with _clock(timing) as clk:
        idx = hz.min_abelian_index(k)
    return VerificationReport("group.index", {"k": k, "lambda": None}, k**3, float(idx - k) if idx >= k else -1.0,
                              0.0, clk["ms"], value=idx)


# ---------------------------------------------------------------------------
# perturbations


def perturbation_suite(k: int = 1, lam=None, seed: int = 0, timing: bool = False) -> list[VerificationReport]:
    with _clock(timing) as clk:
        lam = resolve_lambda(k, lam)
        curv = pt.model_curvature_tensor(seed=seed)
        rho = pt.model_rho_check(k, lam, seed=seed, curvature=curv)
        pert = pt.perturbation_check(k, lam, r_coord=rho.r_k, seed=seed, curvature=curv)
    rho_margin = min(1e-12 - rho.flat_hessian_error, rho.min_ratio - 0.5, 1e-2 - rho.max_grad)
    pert_margin = min(pert.inner_min, pert.outer_min, pert.ric_lower - pert.c_measured * pert.eps)
    return [
        VerificationReport("perturbation.rho", {"k": k, "lambda": lam}, rho.samples, rho_margin, 1e-12, clk["ms"],
                           seed, value=rho.flat_hessian_error,
                           extra={"min_ratio": rho.min_ratio, "threshold": rho.threshold, "r_k": rho.r_k}),
        VerificationReport("perturbation.conformal", {"k": k, "lambda": lam}, pert.samples, pert_margin, 0.0,
                           0, seed, value=pert.eps,
                           extra={"inner_min": pert.inner_min, "outer_min": pert.outer_min,
                                  "ric_lower": pert.ric_lower, "c_measured": pert.c_measured}),
    ]


def framebundle(ric_lower: float, rm: float, drm: float, margin: float = 2.0,
                timing: bool = False) -> VerificationReport:
    """Choose d_k and re-evaluate the criterion; ``ric_lower <= 0`` fails."""
    with _clock(timing) as clk:
        params = {"k": None, "lambda": None, "ric_lower": ric_lower, "rm": rm, "drm": drm}
        if ric_lower <= 0:
            d = 1.0
            res = pt.frame_bundle_ricci(pt.FrameBundleParams(d, max(ric_lower, 0.0), rm, drm), margin)
            worst = res.horizontal_lower if res.horizontal_lower < 0 else -1.0
            value = None
        else:
            d = pt.choose_dk(ric_lower, rm, drm, margin)
            res = pt.frame_bundle_ricci(pt.FrameBundleParams(d, ric_lower, rm, drm), margin)
            worst = min(res.horizontal_lower - ric_lower / margin,
                        res.vertical * res.horizontal_lower - margin * res.mixed_bound**2)
            worst = worst if res.positive else -1.0
            value = d
    return VerificationReport("perturbation.framebundle", params, 1, worst, 0.0, clk["ms"], value=value,
                              extra={"vertical": res.vertical, "mixed_bound": res.mixed_bound,
                                     "horizontal_lower": res.horizontal_lower})

