"""Brute-force coordinate curvature.

Given a metric on a coordinate chart, compute Christoffel symbols, the
Riemann tensor, Ricci and scalar curvature at a point.  Metric derivatives
come from second-order jets by default (exact to rounding), or from central
finite differences with one Richardson step.

Conventions::

    R(X, Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z
    riemann[a, b, c, d] = dx^a(R(d_c, d_d) d_b)
    Ric(Y, Z) = trace(X -> R(X, Y)Z)

With these, the round unit n-sphere has ``Ric = (n - 1) g``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import SingularMetric
from .jets import Jet, unpack


@dataclass(frozen=True)
class ChartMetric:
    """A metric on a coordinate chart.

    ``evaluate`` maps a coordinate vector to the ``(n, n)`` matrix of metric
    components.  It must be written with numpy operations so that it accepts
    both float arrays and object arrays of jets.
    """

    dimension: int
    evaluate: Callable

    def __call__(self, y):
        return self.evaluate(y)


@dataclass(frozen=True)
class MetricJet:
    g: np.ndarray  # (n, n)
    dg: np.ndarray  # (n, n, m): dg[i, j, m] = d_m g_ij
    d2g: np.ndarray  # (n, n, m, l)


def metric_jet(metric: ChartMetric, x, scheme: str = "jet", h: float = 1e-3) -> MetricJet:
    x = np.asarray(x, dtype=float)
    if scheme == "jet":
        g, dg, d2g = unpack(metric(Jet.variables(x)))
        return MetricJet(g, dg, d2g)
    if scheme == "fd":
        return _fd_jet(metric, x, h)
    raise ValueError(f"unknown derivative scheme {scheme!r}")


def _fd_raw(metric, x, h):
    n = x.size
    E = np.eye(n) * h
    g0 = np.asarray(metric(x), dtype=float)
    dg = np.zeros(g0.shape + (n,))
    d2g = np.zeros(g0.shape + (n, n))
    plus = [np.asarray(metric(x + E[i]), dtype=float) for i in range(n)]
    minus = [np.asarray(metric(x - E[i]), dtype=float) for i in range(n)]
    for i in range(n):
        dg[..., i] = (plus[i] - minus[i]) / (2 * h)
        d2g[..., i, i] = (plus[i] - 2 * g0 + minus[i]) / h**2
        for j in range(i + 1, n):
            pp = np.asarray(metric(x + E[i] + E[j]), dtype=float)
            pm = np.asarray(metric(x + E[i] - E[j]), dtype=float)
            mp = np.asarray(metric(x - E[i] + E[j]), dtype=float)
            mm = np.asarray(metric(x - E[i] - E[j]), dtype=float)
            d2g[..., i, j] = d2g[..., j, i] = (pp - pm - mp + mm) / (4 * h * h)
    return g0, dg, d2g


def _fd_jet(metric, x, h):
    g, dg1, d2g1 = _fd_raw(metric, x, h)
    _, dg2, d2g2 = _fd_raw(metric, x, h / 2)
    # one Richardson step removes the h^2 term of the central stencils
    return MetricJet(g, (4 * dg2 - dg1) / 3, (4 * d2g2 - d2g1) / 3)


@dataclass(frozen=True)
class CurvatureBundle:
    metric: np.ndarray
    christoffel: np.ndarray  # christoffel[k, i, j] = Gamma^k_ij
    riemann: np.ndarray  # riemann[a, b, c, d] = R^a_bcd
    ricci: np.ndarray
    scalar: float

    @property
    def riemann_lowered(self) -> np.ndarray:
        return np.einsum("ae,ebcd->abcd", self.metric, self.riemann)

    def ricci_eigenvalues(self) -> np.ndarray:
        """Eigenvalues of Ric relative to the metric."""
        L = np.linalg.cholesky(self.metric)
        Li = np.linalg.inv(L)
        return np.linalg.eigvalsh(Li @ self.ricci @ Li.T)

    def symmetry_residuals(self) -> dict[str, float]:
        R = self.riemann_lowered
        return {
            "antisym_first": float(np.abs(R + R.transpose(1, 0, 2, 3)).max()),
            "antisym_last": float(np.abs(R + R.transpose(0, 1, 3, 2)).max()),
            "pair": float(np.abs(R - R.transpose(2, 3, 0, 1)).max()),
            "bianchi": float(np.abs(R + R.transpose(0, 2, 3, 1) + R.transpose(0, 3, 1, 2)).max()),
            "ricci_sym": float(np.abs(self.ricci - self.ricci.T).max()),
        }


def christoffel_from_jet(j: MetricJet):
    """Christoffel symbols and their first derivatives."""
    g, dg, d2g = j.g, j.dg, j.d2g
    if abs(np.linalg.det(g)) < 1e-14:
        raise SingularMetric("metric determinant below 1e-14")
    gi = np.linalg.inv(g)
    # Gamma_lij (first kind) = 1/2 (d_i g_lj + d_j g_li - d_l g_ij)
    first = 0.5 * (dg.transpose(0, 2, 1) + dg - dg.transpose(2, 0, 1))
    # first[l, i, j]: dg[l, j, i] = d_i g_lj ; dg[l, i, j] = d_j g_li ; dg[i, j, l] = d_l g_ij
    gamma = np.einsum("kl,lij->kij", gi, first)
    dfirst = 0.5 * (d2g.transpose(0, 2, 1, 3) + d2g - d2g.transpose(2, 0, 1, 3))
    dgi = -np.einsum("ka,abm,bl->klm", gi, dg, gi)
    dgamma = np.einsum("klm,lij->kijm", dgi, first) + np.einsum("kl,lijm->kijm", gi, dfirst)
    return gi, gamma, dgamma


def curvature_from_jet(j: MetricJet) -> CurvatureBundle:
    gi, gamma, dgamma = christoffel_from_jet(j)
    # R^a_bcd = d_c Gamma^a_db - d_d Gamma^a_cb + Gamma^a_ce Gamma^e_db - Gamma^a_de Gamma^e_cb
    # dgamma[a, d, b, c] = d_c Gamma^a_db
    term1 = np.einsum("adbc->abcd", dgamma)
    term2 = np.einsum("acbd->abcd", dgamma)
    quad = np.einsum("ace,edb->abcd", gamma, gamma)
    R = term1 - term2 + quad - quad.transpose(0, 1, 3, 2)
    ric = np.einsum("abad->bd", R)
    ric = 0.5 * (ric + ric.T)
    scalar = float(np.einsum("bd,bd->", gi, ric))
    return CurvatureBundle(j.g, gamma, R, ric, scalar)


def curvature_at(metric: ChartMetric, x, scheme: str = "jet", h: float = 1e-3) -> CurvatureBundle:
    """Levi-Civita curvature of ``metric`` at coordinates ``x``."""
    return curvature_from_jet(metric_jet(metric, x, scheme, h))


# ---------------------------------------------------------------------------
# scalar fields on a chart


@dataclass(frozen=True)
class ScalarJet:
    value: float
    grad: np.ndarray  # coordinate partials
    hess: np.ndarray  # coordinate second partials


def scalar_jet(phi: Callable, x) -> ScalarJet:
    out = phi(Jet.variables(np.asarray(x, dtype=float)))
    if not isinstance(out, Jet):
        n = np.asarray(x).size
        return ScalarJet(float(out), np.zeros(n), np.zeros((n, n)))
    return ScalarJet(out.value, out.grad, out.hess)


def covariant_hessian(gamma: np.ndarray, f: ScalarJet) -> np.ndarray:
    return f.hess - np.einsum("kij,k->ij", gamma, f.grad)


def conformal_ricci(metric: ChartMetric, phi: Callable, x, curvature: CurvatureBundle | None = None) -> np.ndarray:
    """Ricci tensor of ``exp(-2 phi) g`` from the curvature of ``g``.

    In dimension n::

        Ric' = Ric + (n-2)(Hess phi + dphi (x) dphi) + (Lap phi - (n-2)|dphi|^2) g

    which for n = 4 has coefficients (2, 2, 1, -2) with the squared norm.
    """
    if curvature is None:
        curvature = curvature_at(metric, x)
    g = curvature.metric
    n = g.shape[0]
    gi = np.linalg.inv(g)
    f = scalar_jet(phi, x)
    H = covariant_hessian(curvature.christoffel, f)
    lap = float(np.einsum("ij,ij->", gi, H))
    norm2 = float(f.grad @ gi @ f.grad)
    return (curvature.ricci + (n - 2) * (H + np.outer(f.grad, f.grad))
            + (lap - (n - 2) * norm2) * g)


def conformally_scaled(metric: ChartMetric, phi: Callable) -> ChartMetric:
    """The chart metric ``exp(-2 phi) g``."""
    return ChartMetric(metric.dimension, lambda y: np.exp(-2.0 * phi(y)) * metric(y))


def contracted_bianchi_residual(metric: ChartMetric, x, h: float = 1e-4) -> float:
    """max |div Ric - 1/2 dR| with the divergence built from finite differences of jet curvature."""
    x = np.asarray(x, dtype=float)
    n = x.size
    c0 = curvature_at(metric, x)
    gi = np.linalg.inv(c0.metric)
    dric = np.zeros((n, n, n))  # dric[a, b, c] = d_c Ric_ab
    dR = np.zeros(n)
    for c in range(n):
        e = np.zeros(n)
        e[c] = h
        cp, cm = curvature_at(metric, x + e), curvature_at(metric, x - e)
        dric[:, :, c] = (cp.ricci - cm.ricci) / (2 * h)
        dR[c] = (cp.scalar - cm.scalar) / (2 * h)
    G = c0.christoffel
    cov = dric - np.einsum("eca,eb->abc", G, c0.ricci) - np.einsum("ecb,ae->abc", G, c0.ricci)
    div = np.einsum("ac,abc->b", gi, cov)
    return float(np.abs(div - 0.5 * dR).max())


# ---------------------------------------------------------------------------
# standard charts


def flat_metric(n: int) -> ChartMetric:
    return ChartMetric(n, lambda y: np.eye(n) + 0.0 * np.sum(y) * np.eye(n))


def sphere_polar_metric(n: int = 3, radius: float = 1.0) -> ChartMetric:
    """Round n-sphere in hyperspherical coordinates (angles first to last)."""

    def ev(y):
        comps = []
        w = radius**2
        for i in range(n):
            comps.append(w)
            w = w * np.sin(y[i]) ** 2
        out = np.zeros((n, n), dtype=object if isinstance(y, np.ndarray) and y.dtype == object else float)
        for i in range(n):
            out[i, i] = comps[i]
        return out

    return ChartMetric(n, ev)


def sphere_gnomonic_metric() -> ChartMetric:
    """Round S^3 in the central-projection chart ``y -> (x0 + y)/sqrt(1 + |y|^2)``.

    At ``y = 0`` the components are the identity and their first derivatives
    vanish, so partial derivatives at the origin are covariant ones.
    """

    def ev(y):
        r2 = 1.0 + np.sum(y * y)
        return np.eye(3) / r2 - np.outer(y, y) / r2**2

    return ChartMetric(3, ev)


def gnomonic_point(x0, y):
    """Ambient S^3 point of gnomonic chart coordinates ``y`` about ``x0``.

    Works for float or jet coordinates; the frame is :func:`tangent_frame`.
    """
    from .s3core import tangent_frame

    e = tangent_frame(np.asarray(x0, dtype=float))
    amb = np.asarray(x0, dtype=float) + y[0] * e[0] + y[1] * e[1] + y[2] * e[2]
    return amb / np.sqrt(1.0 + np.sum(y * y))


def circle_bundle_chart(base: ChartMetric, fiber_coeff: Callable, connection: Callable) -> ChartMetric:
    """Local circle-bundle metric ``B + c (dt + A)^2`` on coordinates ``(y, t)``.

    ``fiber_coeff(y)`` is the scalar ``c`` (the squared fibre scale) and
    ``connection(y)`` the components of the 1-form ``A``.  Nothing depends on
    the fibre coordinate ``t``.
    """
    m = base.dimension

    def ev(z):
        y = z[:m]
        B = np.asarray(base(y))
        c = fiber_coeff(y)
        A = np.asarray(connection(y))
        obj = isinstance(z, np.ndarray) and z.dtype == object
        out = np.zeros((m + 1, m + 1), dtype=object if obj else float)
        out[:m, :m] = B + c * np.outer(A, A)
        out[:m, m] = out[m, :m] = c * A
        out[m, m] = c + 0.0 * z[m]
        return out

    return ChartMetric(m + 1, ev)


def sphere2_half_metric() -> ChartMetric:
    """Round 2-sphere of radius 1/2 as the Hopf base: ``d eta^2 + sin(2 eta)^2/4 d phi^2``."""

    def ev(y):
        obj = isinstance(y, np.ndarray) and y.dtype == object
        out = np.zeros((2, 2), dtype=object if obj else float)
        out[0, 0] = 1.0 + 0.0 * y[0]
        out[1, 1] = 0.25 * np.sin(2.0 * y[0]) ** 2
        return out

    return ChartMetric(2, ev)
