"""Conformal perturbation near an added point, and frame-bundle positivity.

Near a point added to the base, ``h_k`` is ``(1/(k Lambda))`` times a metric
that is flat to second order.  The model chart here is

    h(y) = (delta + P(z)) / (k Lambda),   P_ij(z) = -1/3 R_ikjl z^k z^l,   z = y / sqrt(k Lambda),

with ``R`` an algebraic curvature tensor; ``z`` are h-normal coordinates, so
``R`` is the curvature at the origin in units of h.  Because ``P(z) z = 0``
the coordinates are normal coordinates and ``rho = |y|^2 / (2 k Lambda)`` is
half the squared h-distance to the origin exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh

from .curvature_oracle import (ChartMetric, conformal_ricci, covariant_hessian, curvature_at, scalar_jet)
from .errors import ProfileTooLarge, Unsatisfiable

# ---------------------------------------------------------------------------
# model chart


def kulkarni_nomizu(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """``(A o B)_ijkl = A_ik B_jl + A_jl B_ik - A_il B_jk - A_jk B_il``."""
    return (np.einsum("ik,jl->ijkl", A, B) + np.einsum("jl,ik->ijkl", A, B)
            - np.einsum("il,jk->ijkl", A, B) - np.einsum("jk,il->ijkl", A, B))


def model_curvature_tensor(n: int = 4, size: float = 0.1, seed: int = 0) -> np.ndarray:
    """Algebraic curvature tensor ``A o delta`` with positive definite random A.

    Scaled so that ``|P(z)| <= size |z|^2`` in operator norm.  Its Ricci
    tensor ``(n-2) A + tr(A) delta`` is positive, like that of ``h_k``.
    """
    rng = np.random.default_rng(seed)
    M = rng.normal(size=(n, n))
    A = M @ M.T / n + 0.5 * np.eye(n)
    R = kulkarni_nomizu(A, np.eye(n))
    # sup over unit y of the operator norm of P(y); the sample max is
    # inflated by 10% to cover directions it missed
    zs = rng.normal(size=(4000, n))
    zs /= np.linalg.norm(zs, axis=1, keepdims=True)
    P = -np.einsum("ikjl,sk,sl->sij", R, zs, zs) / 3.0
    worst = np.abs(np.linalg.eigvalsh(P)).max() * 1.1
    return R * (size / worst)


def model_chart(k: int, lam: float, curvature: np.ndarray | None = None) -> ChartMetric:
    """The chart metric ``(delta - R(z, ., z, .)/3) / (k Lambda)``; flat if ``curvature`` is None."""
    scale = 1.0 / (k * lam)

    def ev(y):
        n = len(y)
        g = np.eye(n) + 0.0 * np.outer(y, y)
        if curvature is not None:
            g = g - scale * np.einsum("ikjl,k,l->ij", curvature, y, y) / 3.0
        return scale * g

    return ChartMetric(4, ev)


def model_rho(k: int, lam: float) -> callable:
    scale = 1.0 / (2.0 * k * lam)

    def rho(y):
        return scale * np.sum(y * y)

    return rho


def hessian_rho(metric: ChartMetric, rho, y) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(Hess rho, d rho, metric) at ``y`` with Christoffel symbols from the oracle."""
    curv = curvature_at(metric, y)
    f = scalar_jet(rho, y)
    return covariant_hessian(curv.christoffel, f), f.grad, curv.metric


def ball_samples(radius: float, count: int, seed: int = 0, n: int = 4) -> np.ndarray:
    """Uniform samples in the coordinate ball of the given radius."""
    rng = np.random.default_rng(seed)
    d = rng.normal(size=(count, n))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    r = radius * rng.random(count) ** (1.0 / n)
    return d * r[:, None]


def relative_eigenvalues(form: np.ndarray, metric: np.ndarray) -> np.ndarray:
    """Eigenvalues of ``form`` with respect to ``metric``."""
    return eigh(form, metric, eigvals_only=True)


@dataclass(frozen=True)
class RhoReport:
    k: int
    lam: float
    chart_radius: float
    flat_hessian_error: float  # max |Hess rho - h| / |h| on the flat model
    origin_gradient: float
    min_ratio: float  # min eigenvalue of Hess rho relative to h, perturbed chart
    max_grad: float  # max |d rho|_h on the perturbed chart
    threshold: float  # largest tested h-radius where min_ratio >= 1/2
    r_k: float  # coordinate radius sqrt(k Lambda) min(0.01, threshold)
    samples: int

    @property
    def passed(self) -> bool:
        return (self.flat_hessian_error <= 1e-12 and self.origin_gradient == 0.0
                and self.min_ratio >= 0.5 and self.max_grad <= 1e-2 * (1 + 1e-12))


def model_rho_check(k: int, lam: float, chart_radius: float = 0.3, samples: int = 40, seed: int = 0,
                    curvature: np.ndarray | None = None) -> RhoReport:
    """Hess rho against h on the flat and the perturbed model charts.

    ``chart_radius`` and ``threshold`` are h-distances to the origin;
    ``r_k`` is a coordinate radius ``|y|`` (h-distance times ``sqrt(k Lambda)``).
    """
    if curvature is None:
        curvature = model_curvature_tensor(seed=seed)
    unit = np.sqrt(k * lam)
    flat = model_chart(k, lam)
    pert = model_chart(k, lam, curvature)
    rho = model_rho(k, lam)
    ys = ball_samples(chart_radius, samples, seed) * unit

    err = 0.0
    for y in ys:
        H, _, g = hessian_rho(flat, rho, y)
        err = max(err, float(np.abs(H - g).max() / np.abs(g).max()))
    _, g0, _ = hessian_rho(pert, rho, np.zeros(4))

    def ratio_at(y):
        H, d, g = hessian_rho(pert, rho, y)
        return relative_eigenvalues(H, g).min(), float(np.sqrt(d @ np.linalg.solve(g, d)))

    min_ratio = min(ratio_at(y)[0] for y in ys)
    dirs = ys / np.maximum(np.linalg.norm(ys, axis=1, keepdims=True), 1e-300)
    threshold = 0.0
    for r in np.linspace(0.05, 2.0, 40):
        if all(ratio_at(r * unit * d)[0] >= 0.5 for d in dirs[:8]):
            threshold = float(r)
        else:
            break
    r_k = min(0.01, threshold) * unit
    max_grad = max(ratio_at(y)[1] for y in ys * (r_k / (chart_radius * unit)))
    return RhoReport(k, lam, chart_radius, err, float(np.abs(g0).max()), float(min_ratio), max_grad,
                     threshold, float(r_k), len(ys))


# ---------------------------------------------------------------------------
# the bump profile


def smoothstep5(s):
    """``6 s^5 - 15 s^4 + 10 s^3``: 0 at 0, 1 at 1, first two derivatives vanish at both ends."""
    return s * s * s * (10.0 + s * (-15.0 + 6.0 * s))


@dataclass(frozen=True)
class BumpProfile:
    """``eta(t) = t`` for ``t <= r``, 0 for ``t >= 2r``, a quintic blend between."""

    r: float
    eps: float

    def __post_init__(self):
        if not (self.r > 0 and self.eps >= 0):
            raise ValueError("need r > 0 and eps >= 0")

    def eta(self, t):
        tv = float(t) if not hasattr(t, "value") else t.value
        if tv <= self.r:
            return t
        if tv >= 2 * self.r:
            return 0.0 * t
        s = (t - self.r) / self.r
        return t * (1.0 - smoothstep5(s))

    def phi(self, rho):
        """``phi = eps * eta(rho)`` as a function of a point, given rho."""
        return lambda y: self.eps * self.eta(rho(y))

    def derivative_bounds(self, grid: int = 20001) -> tuple[float, float, float]:
        """(max |eta|, C1 = max |eta'|, C2 = r max |eta''|) on a fine grid."""
        t = np.linspace(0, 2.5 * self.r, grid)
        s = np.clip((t - self.r) / self.r, 0, 1)
        S = smoothstep5(s)
        dS = 30 * s**2 * (1 - s) ** 2 / self.r
        d2S = 60 * s * (1 - s) * (1 - 2 * s) / self.r**2
        eta = t * (1 - S)
        d1 = (1 - S) - t * dS
        d2 = -2 * dS - t * d2S
        return float(np.abs(eta).max()), float(np.abs(d1).max()), float(self.r * np.abs(d2).max())


# ---------------------------------------------------------------------------
# conformal perturbation


def conformal_perturbation_ricci(metric: ChartMetric, profile: BumpProfile, rho, y) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(Ric of ``exp(-2 phi) h``, Ric of h, h) at ``y`` with ``phi = eps eta(rho)``."""
    curv = curvature_at(metric, y)
    ric = conformal_ricci(metric, profile.phi(rho), y, curvature=curv)
    return ric, curv.ricci, curv.metric


@dataclass(frozen=True)
class PerturbationReport:
    k: int
    lam: float
    eps: float
    r_k: float  # threshold in units of rho
    inner_min: float  # min relative eigenvalue of Ric_g over rho <= r_k/2
    outer_min: float  # min relative eigenvalue of Ric_g over rho >= r_k/2
    ric_lower: float  # lower bound c used for Ric_h in the outer region
    c_measured: float  # sup |Ric_g - Ric_h|_h / eps over the outer region
    c_eta: tuple = field(default=())
    samples: int = 0

    @property
    def passed(self) -> bool:
        outer_ok = self.outer_min > 0 and self.ric_lower - self.c_measured * self.eps > 0
        return self.inner_min > 0 and outer_ok


def _region_samples(k, lam, r_rho, count, seed):
    """Coordinate samples split at ``rho = r/2`` and covering ``rho <= 2.5 r``."""
    to_coord = lambda rr: np.sqrt(2.0 * k * lam * rr)  # noqa: E731
    inner = ball_samples(to_coord(0.5 * r_rho), count, seed)
    outer = ball_samples(to_coord(2.5 * r_rho), 4 * count, seed + 1)
    outer = outer[np.sum(outer**2, axis=1) / (2 * k * lam) >= 0.5 * r_rho][:count]
    return inner, outer


def _measure(metric, profile, rho, pts):
    mins, pert = [], []
    for y in pts:
        ric_g, ric_h, g = conformal_perturbation_ricci(metric, profile, rho, y)
        mins.append(relative_eigenvalues(ric_g, g).min())
        pert.append(np.abs(relative_eigenvalues(ric_g - ric_h, g)).max())
    return np.array(mins), np.array(pert)


def perturbation_check(k: int, lam: float, eps: float | None = None, r_coord: float | None = None,
                       ric_lower: float | None = None, samples: int = 24, seed: int = 0,
                       curvature: np.ndarray | None = None, min_eps: float = 1e-8) -> PerturbationReport:
    """Positivity of the conformally perturbed model metric in both regions.

    With ``eps=None`` the size is chosen automatically: measure
    ``C = sup |Ric_g - Ric_h| / eps`` on the outer region at a trial size,
    take ``eps = c / (2 C)`` and halve until both regions are positive.
    ``ric_lower`` defaults to the smallest Ricci eigenvalue of the chart
    metric on the outer samples.
    """
    if curvature is None:
        curvature = model_curvature_tensor(seed=seed)
    metric = model_chart(k, lam, curvature)
    rho = model_rho(k, lam)
    if r_coord is None:
        r_coord = model_rho_check(k, lam, seed=seed, curvature=curvature, samples=8).r_k
    r_rho = r_coord**2 / (2.0 * k * lam)
    inner, outer = _region_samples(k, lam, r_rho, samples, seed)
    if ric_lower is None:
        ric_lower = min(relative_eigenvalues(curvature_at(metric, y).ricci, metric(y)).min() for y in outer)
    c_eta = BumpProfile(r_rho, 1.0).derivative_bounds()

    def evaluate(e):
        prof = BumpProfile(r_rho, e)
        imin, _ = _measure(metric, prof, rho, inner)
        omin, opert = _measure(metric, prof, rho, outer)
        C = float(opert.max() / e) if e > 0 else 0.0
        return PerturbationReport(k, lam, float(e), r_rho, float(imin.min()), float(omin.min()), float(ric_lower), C,
                                  c_eta, len(inner) + len(outer))

    if eps is not None:
        return evaluate(eps)
    trial = evaluate(1e-3)
    e = min(1.0, ric_lower / (2.0 * trial.c_measured)) if trial.c_measured > 0 else 1.0
    while e >= min_eps:
        rep = evaluate(e)
        if rep.passed:
            return rep
        e /= 2.0
    raise ProfileTooLarge("no eps >= %g keeps both regions positive" % min_eps)


# ---------------------------------------------------------------------------
# frame bundle


@dataclass(frozen=True)
class FrameBundleParams:
    d_k: float
    ric_lower: float
    rm_bound: float
    drm_bound: float

    def __post_init__(self):
        if self.d_k <= 0 or self.rm_bound < 0 or self.drm_bound < 0 or self.ric_lower < 0:
            raise ValueError("fibre scale must be positive and bounds non-negative")


@dataclass(frozen=True)
class FrameBundleRicci:
    vertical: float
    mixed_bound: float
    horizontal_lower: float
    positive: bool


def frame_bundle_ricci(p: FrameBundleParams, margin: float = 1.0) -> FrameBundleRicci:
    """Lower bounds for the Ricci form of the frame bundle with fibre scale ``d_k``.

    vertical ``>= d^-2``; ``|mixed| <= drm d``; horizontal
    ``>= ric_lower - 3/4 d^2 sum_{i<=3} |Rm(H, H_i)|^2 >= ric_lower - 9/4 rm^2 d^2``.
    Positivity is the 2 x 2 block test ``h > 0`` and ``v h > mixed^2``; with
    ``margin = m`` it requires ``h >= ric_lower / m`` and ``v h >= m mixed^2``.
    """
    if margin < 1:
        raise ValueError("margin must be at least 1")
    d = p.d_k
    v = d**-2
    mixed = p.drm_bound * d
    h = p.ric_lower - 2.25 * p.rm_bound**2 * d**2
    if margin == 1:
        ok = h > 0 and v * h > mixed**2
    else:
        ok = h > 0 and h >= p.ric_lower / margin and v * h >= margin * mixed**2
    return FrameBundleRicci(v, mixed, h, bool(ok))


def choose_dk(ric_lower: float, rm_bound: float, drm_bound: float, margin: float = 2.0,
              max_exponent: int = 20, min_exponent: int = -80) -> float:
    """Largest ``d = 2^j`` (j <= max_exponent) passing :func:`frame_bundle_ricci` with the margin."""
    if ric_lower <= 0:
        raise Unsatisfiable("the horizontal bound is never positive when ric_lower <= 0")
    for j in range(max_exponent, min_exponent - 1, -1):
        d = 2.0**j
        if frame_bundle_ricci(FrameBundleParams(d, ric_lower, rm_bound, drm_bound), margin).positive:
            return d
    raise Unsatisfiable(f"no d >= 2^{min_exponent} passes")


def sampled_curvature_bounds(metric: ChartMetric, points, h: float = 1e-4) -> tuple[float, float]:
    """(max |Rm|, max |grad Rm|) over chart points; the gradient is a finite difference of |Rm|.

    Norms are taken in the chart metric.  The gradient proxy underestimates
    ``|nabla Rm|`` in general; it is a sampled input, not a bound.
    """
    def rm_norm(y):
        c = curvature_at(metric, y)
        gi = np.linalg.inv(c.metric)
        Rl = c.riemann_lowered
        return float(np.sqrt(abs(np.einsum("abcd,ae,bf,cg,dh,efgh->", Rl, gi, gi, gi, gi, Rl))))

    rm, drm = 0.0, 0.0
    for y in np.atleast_2d(points):
        r0 = rm_norm(y)
        rm = max(rm, r0)
        g = np.array([(rm_norm(y + h * e) - rm_norm(y - h * e)) / (2 * h) for e in np.eye(len(y))])
        drm = max(drm, float(np.sqrt(g @ np.linalg.solve(metric(y), g))))
    return rm, drm
