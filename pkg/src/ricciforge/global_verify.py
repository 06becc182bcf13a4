"""Global certificates on S^3 and M_k.

* integrals of the curvature form ``omega = *du`` over small spheres around
  the poles and over the Clifford torus;
* closeness of the conformal factor ``V_Lambda(u_k)`` to 1;
* the length of the explicit curves that leave the fibre F0;
* a graph upper estimate of the diameter of ``M_k``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, sparse
from scipy.sparse.csgraph import connected_components, dijkstra
from scipy.spatial import cKDTree
from scipy.special import roots_legendre

from .errors import DisconnectedGraph, NotFound, QuadratureOverlap
from .harmonic import Potential, grad_u, potential_u
from .metric import V
from .s3core import (DEFAULT_EXCLUSION, PoleConfiguration, as_points, geodesic_distance, normalize,
                     sample_grid, sphere2_quadrature, tube_distance, volume_form)

# ---------------------------------------------------------------------------
# the curvature form


@dataclass(frozen=True)
class TwoFormField:
    """``omega = *du``: ``omega_x(A, B) = vol(grad u, A, B) = det[x, grad u, A, B]``."""

    potential: Potential
    scaled: bool = False

    def __call__(self, x, A, B) -> np.ndarray:
        x = as_points(x)
        g = grad_u(self.potential.poles, x, self.scaled)
        return volume_form(x, g, A, B)

    def norm(self, x) -> np.ndarray:
        """Pointwise norm; equals |du| since the Hodge star is an isometry."""
        from .s3core import tangent_frame

        x = as_points(x)
        e = tangent_frame(x)
        total = 0.0
        for i, j in ((0, 1), (0, 2), (1, 2)):
            total = total + self(x, e[..., i, :], e[..., j, :]) ** 2
        return np.sqrt(total)


def chern_integral_sphere(cfg: PoleConfiguration, alpha: int, ell: int, r: float, m: int = 32) -> float:
    """Integral of omega over the geodesic sphere of radius r about ``p^alpha_ell``.

    The sphere is oriented by the normal pointing towards its centre, which
    makes the answer ``(-1)^alpha 2 pi``.
    """
    if not 0.05 <= r <= 0.3:
        raise ValueError("radius must lie in [0.05, 0.3]")
    center = cfg.pole(alpha, ell)
    others = np.array([p for p in cfg.poles if not np.allclose(p, center)]).reshape(-1, 4)
    if len(others) and geodesic_distance(others, center).min() <= r:
        raise QuadratureOverlap("sphere encloses a second pole")
    q = sphere2_quadrature(center, r, m)
    vals = TwoFormField(Potential(cfg))(q.points, q.tangents[:, 0], q.tangents[:, 1])
    # quadrature tangents are oriented by the outward normal; flip to the inward one
    return float(-np.sum(q.weights * vals))


def clifford_torus(m: int):
    """Nodes, tangent vectors and the (uniform) weight of the m x m torus rule."""
    xi = np.arange(m) * (2 * np.pi / m)
    X1, X2 = np.meshgrid(xi, xi, indexing="ij")
    s = 1.0 / np.sqrt(2.0)
    pts = s * np.stack([np.cos(X1), np.sin(X1), np.cos(X2), np.sin(X2)], axis=-1)
    zero = np.zeros_like(X1)
    d1 = s * np.stack([-np.sin(X1), np.cos(X1), zero, zero], axis=-1)
    d2 = s * np.stack([zero, zero, -np.sin(X2), np.cos(X2)], axis=-1)
    return pts.reshape(-1, 4), d1.reshape(-1, 4), d2.reshape(-1, 4), (2 * np.pi / m) ** 2


def chern_integral_clifford(cfg: PoleConfiguration, m: int = 64, orientation: int = 1) -> float:
    """Integral of omega over ``{|z1| = |z2| = 1/sqrt 2}`` by the product trapezoid rule.

    ``orientation=+1`` parametrizes by ``(arg z1, arg z2)``; the result is then ``2 pi k``.
    """
    if m < 32:
        raise ValueError("m must be at least 32")
    if orientation not in (1, -1):
        raise ValueError("orientation must be +1 or -1")
    pts, d1, d2, w = clifford_torus(m)
    vals = TwoFormField(Potential(cfg))(pts, d1, d2)
    return float(orientation * w * np.sum(vals))


def chern_table(cfg: PoleConfiguration, r: float, m: int = 32) -> np.ndarray:
    """Sphere integrals for every pole; row alpha, column ell."""
    return np.array([[chern_integral_sphere(cfg, a, l, r, m) for l in range(cfg.k)] for a in (0, 1)])


# ---------------------------------------------------------------------------
# closeness of V_Lambda to 1


@dataclass(frozen=True)
class ClosenessReport:
    k: int
    lam: float
    r: float
    delta: float
    samples: int
    outer_margin: float  # delta^3 - max |V_Lambda - 1| outside the tubes
    inner_margin: float  # min of delta^3 (1 + 1/|z1| + 1/|z2|) - |V_Lambda - 1| inside
    worst_point: np.ndarray = field(repr=False)
    worst_in_tube: bool = False

    @property
    def passed(self) -> bool:
        return self.outer_margin >= 0 and self.inner_margin >= 0


def vlambda_closeness(k: int, lam: float, r: float, delta: float, n: int = 10_000, seed: int = 0,
                      exclusion: float = DEFAULT_EXCLUSION) -> ClosenessReport:
    """Check ``|V_Lambda(u_k) - 1| <= delta^3`` off the r-tubes of F0, F1 and the weighted bound on them."""
    if not 0 < r < 0.5:
        raise ValueError("r must lie in (0, 0.5)")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    cfg = PoleConfiguration.roots_of_unity(k, exclusion)
    x = sample_grid(n, cfg, seed)
    dev = V(potential_u(cfg, x, scaled=True)) / lam
    t0, t1 = tube_distance(x)
    inside = (t0 < r) | (t1 < r)
    r1 = np.hypot(x[:, 0], x[:, 1])
    r2 = np.hypot(x[:, 2], x[:, 3])
    d3 = delta**3
    with np.errstate(divide="ignore"):
        weighted = d3 * (1.0 + 1.0 / r1 + 1.0 / r2)
    outer = d3 - dev[~inside].max() if np.any(~inside) else np.inf
    inner = (weighted - dev)[inside].min() if np.any(inside) else np.inf
    slack = np.where(inside, weighted - dev, d3 - dev)
    i = int(np.argmin(slack))
    return ClosenessReport(k, lam, r, delta, len(x), float(outer), float(inner), x[i], bool(inside[i]))


def certify_lambda_closeness(k: int, r: float, delta: float, n: int = 10_000, seed: int = 0,
                             max_exponent: int = 60) -> ClosenessReport:
    """Smallest power of two Lambda for which :func:`vlambda_closeness` passes."""
    for e in range(1, max_exponent + 1):
        rep = vlambda_closeness(k, 2.0**e, r, delta, n, seed)
        if rep.passed:
            return rep
    raise NotFound(f"closeness fails for every Lambda <= 2^{max_exponent}")


# ---------------------------------------------------------------------------
# the curves gamma_{z1}


def gamma_raw(z1: complex, t):
    """``(sqrt(1 - t^2) z1, t^2)`` and its t-derivative, as 4-vectors (not on S^3 for t > 0)."""
    t = np.asarray(t, dtype=float)
    z1 = complex(z1)
    s = np.sqrt(1.0 - t**2)
    zero = np.zeros_like(t)
    p = np.stack([s * z1.real, s * z1.imag, t**2, zero], axis=-1)
    dp = np.stack([-t / s * z1.real, -t / s * z1.imag, 2.0 * t, zero], axis=-1)
    return p, dp


def gamma_point(z1: complex, t):
    """Radial projection of the curve onto S^3 and the exact derivative of the projection."""
    p, dp = gamma_raw(z1, t)
    nrm = np.linalg.norm(p, axis=-1, keepdims=True)
    x = p / nrm
    dx = (dp - np.sum(dp * x, axis=-1, keepdims=True) * x) / nrm
    return x, dx


def gamma_speed(z1: complex, t, projected: bool = True):
    """Round-metric speed of the curve (projected to S^3 by default)."""
    if projected:
        return np.linalg.norm(gamma_point(z1, t)[1], axis=-1)
    return np.linalg.norm(gamma_raw(z1, t)[1], axis=-1)


def curve_length_gamma(k: int, lam: float, z1: complex, r: float, eps: float = 1e-6) -> float:
    """Length of the projected curve on ``t in (eps, 2 sqrt r)`` in the metric ``V_Lambda(u_k) g``.

    The curve starts on F0, possibly at a pole where ``u_k`` blows up; the
    integrand stays bounded there.  Below ``t = 1e-4`` the potential cannot be
    evaluated safely, so that piece is bounded by its length times the
    integrand at ``1e-4``, doubled.
    """
    if not 0 < r <= 0.2:
        raise ValueError("r must lie in (0, 0.2]")
    cfg = PoleConfiguration.roots_of_unity(k)
    z1 = complex(z1) / abs(z1)

    def integrand(t):
        x, dx = gamma_point(z1, t)
        vl = 1.0 + V(potential_u(cfg, x, scaled=True)) / lam
        return float(np.sqrt(vl) * np.linalg.norm(dx))

    t_min = max(eps, 1e-4)
    body, _ = integrate.quad(integrand, t_min, 2.0 * np.sqrt(r), limit=200, epsabs=1e-12, epsrel=1e-10)
    tail = 2.0 * (t_min - eps) * integrand(t_min)
    return body + tail


def curve_length_bound(r: float, delta: float) -> float:
    return 6.0 * r + 24.0 * delta**1.5 * np.sqrt(r)


# ---------------------------------------------------------------------------
# diameter


@dataclass(frozen=True)
class GeodesicGraph:
    """Sampled points plus pole super-nodes joined by conformal length estimates."""

    vertices: np.ndarray  # (n, 4) sample points; super-nodes follow with indices n, n+1, ...
    poles: np.ndarray  # (P, 4)
    adjacency: sparse.csr_matrix
    k: int
    lam: float | None
    neighbors: int

    @property
    def size(self) -> int:
        return self.adjacency.shape[0]


def _sqrt_vlambda(cfg, lam, x):
    if lam is None:
        return np.ones(x.shape[:-1])
    return np.sqrt(1.0 + V(potential_u(cfg, x, scaled=True)) / lam)


def _slerp(a, b, t):
    return normalize((1.0 - t)[..., None] * a + t[..., None] * b)


def _edge_costs(cfg, lam, a, b, near):
    d = geodesic_distance(a, b)
    cost = _sqrt_vlambda(cfg, lam, _slerp(a, b, np.full(len(a), 0.5))) * d
    if np.any(near):
        an, bn = a[near], b[near]
        acc = 0.0
        for s in (0.125, 0.375, 0.625, 0.875):
            acc = acc + _sqrt_vlambda(cfg, lam, _slerp(an, bn, np.full(len(an), s)))
        cost[near] = acc / 4.0 * d[near]
    return cost


def _radial_costs(cfg, lam, pole, pts, order: int = 16):
    """Length of the geodesic from ``pole`` to each point; ``s = d tau^2`` removes the singularity."""
    d = geodesic_distance(pts, pole)
    tau, w = roots_legendre(order)
    tau = 0.5 * (tau + 1.0)
    w = 0.5 * w
    # unit initial direction at the pole
    v = pts - np.cos(d)[:, None] * pole
    v /= np.linalg.norm(v, axis=-1, keepdims=True)
    s = d[:, None] * tau[None, :] ** 2
    x = np.cos(s)[..., None] * pole + np.sin(s)[..., None] * v[:, None, :]
    f = _sqrt_vlambda(cfg, lam, x)
    return np.sum(f * (2.0 * d[:, None] * tau[None, :]) * w[None, :], axis=1)


def build_geodesic_graph(k: int, lam: float | None, n: int = 5000, neighbors: int = 48, seed: int = 0,
                         exclusion: float = DEFAULT_EXCLUSION, pole_radius: float = 0.25,
                         tube_radius: float = 0.3) -> GeodesicGraph:
    """kNN graph of a Sobol sample with conformal edge lengths.

    ``lam=None`` gives the round metric (``V_Lambda = 1``).  Points within
    ``exclusion`` of a pole are not sampled; instead each pole is a
    super-node joined radially to all samples within ``pole_radius``.
    """
    if n < 2000:
        raise ValueError("n must be at least 2000")
    cfg = PoleConfiguration.roots_of_unity(k, exclusion)
    x = sample_grid(n, cfg, seed)
    m = len(x)
    tree = cKDTree(x)
    _, idx = tree.query(x, neighbors + 1)
    rows = np.repeat(np.arange(m), neighbors)
    cols = idx[:, 1:].reshape(-1)
    pairs = np.unique(np.sort(np.stack([rows, cols], 1), axis=1), axis=0)
    a, b = x[pairs[:, 0]], x[pairs[:, 1]]
    t0a, t1a = tube_distance(a)
    t0b, t1b = tube_distance(b)
    near = (np.minimum(t0a, t1a) < tube_radius) | (np.minimum(t0b, t1b) < tube_radius)
    cost = _edge_costs(cfg, lam, a, b, near)
    R, C, D = [pairs[:, 0]], [pairs[:, 1]], [cost]
    poles = cfg.poles
    for j, p in enumerate(poles):
        close = np.nonzero(geodesic_distance(x, p) < pole_radius)[0]
        if len(close):
            R.append(np.full(len(close), m + j))
            C.append(close)
            D.append(_radial_costs(cfg, lam, p, x[close]))
    R, C, D = np.concatenate(R), np.concatenate(C), np.concatenate(D)
    N = m + len(poles)
    adj = sparse.coo_matrix((np.concatenate([D, D]), (np.concatenate([R, C]), np.concatenate([C, R]))),
                            shape=(N, N)).tocsr()
    ncomp, _ = connected_components(adj, directed=False)
    if ncomp != 1:
        raise DisconnectedGraph(f"graph has {ncomp} components; raise n or the neighbour count")
    return GeodesicGraph(x, poles, adj, k, lam, neighbors)


def farthest_point_sources(x: np.ndarray, count: int, start: int = 0) -> np.ndarray:
    """Greedy farthest-point sample (round metric) of ``count`` indices."""
    chosen = [start]
    dist = geodesic_distance(x, x[start])
    for _ in range(count - 1):
        j = int(np.argmax(dist))
        chosen.append(j)
        dist = np.minimum(dist, geodesic_distance(x, x[j]))
    return np.array(chosen)


@dataclass(frozen=True)
class DiameterReport:
    k: int
    lam: float | None
    nodes: int
    base_estimate: float
    fiber_slack: float
    sources: int

    @property
    def estimate(self) -> float:
        return self.base_estimate + self.fiber_slack


def diameter_estimate(k: int, lam: float | None, n: int = 5000, neighbors: int = 48,
                      fiber_slack: float | None = None, sources: int = 32, seed: int = 0) -> DiameterReport:
    """Largest graph eccentricity over farthest-point sources, plus half a fibre.

    The default slack ``pi / (k Lambda)`` is half the longest fibre of
    ``h_k``; it is zero for the round control (``lam=None``).
    """
    graph = build_geodesic_graph(k, lam, n, neighbors, seed)
    src = farthest_point_sources(graph.vertices, sources)
    dist = dijkstra(graph.adjacency, directed=False, indices=src)
    ecc = float(dist[:, : len(graph.vertices)].max())
    if fiber_slack is None:
        fiber_slack = 0.0 if lam is None else np.pi / (k * lam)
    return DiameterReport(k, lam, len(graph.vertices), ecc, float(fiber_slack), len(src))


__all__ = [
    "TwoFormField", "chern_integral_sphere", "chern_integral_clifford", "chern_table", "clifford_torus",
    "ClosenessReport", "vlambda_closeness", "certify_lambda_closeness", "gamma_raw", "gamma_point",
    "gamma_speed", "curve_length_gamma", "curve_length_bound", "GeodesicGraph", "build_geodesic_graph",
    "farthest_point_sources", "DiameterReport", "diameter_estimate",
]
