"""Round geometry of the unit 3-sphere in C^2 = R^4.

Points are unit 4-vectors ``(Re z1, Im z1, Re z2, Im z2)``.  Every function
accepts a single point of shape ``(4,)`` or a batch of shape ``(..., 4)`` and
broadcasts over the leading axes.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.special import roots_legendre
from scipy.stats import qmc

from .errors import EmptySample, PoleCoincidence

NORM_TOL = 1e-12
POLE_GUARD = 1e-9
DEFAULT_EXCLUSION = 0.05


def to_vec(z1, z2) -> np.ndarray:
    z1 = np.asarray(z1, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    v = np.stack([z1.real, z1.imag, z2.real, z2.imag], axis=-1)
    return normalize(v)


def to_complex(x) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float)
    return x[..., 0] + 1j * x[..., 1], x[..., 2] + 1j * x[..., 3]


def normalize(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return x / np.linalg.norm(x, axis=-1, keepdims=True)


@dataclass(frozen=True)
class SpherePoint:
    """A point of S^3 viewed as a pair of complex numbers."""

    z1: complex
    z2: complex

    def __post_init__(self):
        r = np.hypot(abs(self.z1), abs(self.z2))
        if r == 0:
            raise ValueError("cannot normalize the zero vector")
        object.__setattr__(self, "z1", complex(self.z1) / r)
        object.__setattr__(self, "z2", complex(self.z2) / r)

    @classmethod
    def from_vec(cls, v) -> "SpherePoint":
        v = np.asarray(v, dtype=float)
        return cls(complex(v[0], v[1]), complex(v[2], v[3]))

    @property
    def vec(self) -> np.ndarray:
        return np.array([self.z1.real, self.z1.imag, self.z2.real, self.z2.imag])

    def __array__(self, dtype=None, copy=None):
        return self.vec if dtype is None else self.vec.astype(dtype)


def as_points(x) -> np.ndarray:
    """Coerce SpherePoints, lists of them, or raw arrays to a float array."""
    if isinstance(x, SpherePoint):
        return x.vec
    if isinstance(x, (list, tuple)) and x and isinstance(x[0], SpherePoint):
        return np.stack([p.vec for p in x])
    arr = np.asarray(x, dtype=float)
    if arr.shape[-1] != 4:
        raise ValueError(f"expected trailing dimension 4, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class TangentVector:
    base: np.ndarray
    components: np.ndarray

    def __post_init__(self):
        base = as_points(self.base)
        comp = np.asarray(self.components, dtype=float)
        if np.any(np.abs(np.sum(base * comp, axis=-1)) > 1e-10 * np.maximum(1.0, np.linalg.norm(comp, axis=-1))):
            raise ValueError("tangent vector is not orthogonal to its base point")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "components", comp)

    @property
    def norm(self):
        return np.linalg.norm(self.components, axis=-1)


def inner(a, b):
    return np.sum(np.asarray(a) * np.asarray(b), axis=-1)


def geodesic_distance(a, b) -> np.ndarray:
    """Great-circle distance, in [0, pi]."""
    c = np.clip(inner(as_points(a), as_points(b)), -1.0, 1.0)
    return np.arccos(c)


def tangent_project(x, v) -> np.ndarray:
    x = as_points(x)
    v = np.asarray(v, dtype=float)
    return v - inner(x, v)[..., None] * x


def grad_distance(a, p) -> np.ndarray:
    """Unit gradient at ``a`` of ``d(., p)``, pointing away from ``p``."""
    a, p = as_points(a), as_points(p)
    c = np.clip(inner(a, p), -1.0, 1.0)
    theta = np.arccos(c)
    if np.any(theta < POLE_GUARD) or np.any(theta > np.pi - POLE_GUARD):
        raise PoleCoincidence("gradient of distance undefined at the point or its antipode")
    g = (a * c[..., None] - p) / np.sin(theta)[..., None]
    return tangent_project(a, g)


def exp_map(x, v) -> np.ndarray:
    x = as_points(x)
    v = np.asarray(v, dtype=float)
    t = np.linalg.norm(v, axis=-1, keepdims=True)
    safe = np.where(t > 0, t, 1.0)
    return normalize(x * np.cos(t) + v * np.sin(t) / safe)


def tangent_frame(x) -> np.ndarray:
    """Oriented orthonormal frame of T_x S^3, shape ``(..., 3, 4)``.

    Uses quaternion multiplication, so the frame is global and smooth.  The
    first vector is the Hopf direction ``i * (z1, z2)``.  Orientation:
    ``det[x, e1, e2, e3] = +1``.
    """
    x = as_points(x)
    a, b, c, d = x[..., 0], x[..., 1], x[..., 2], x[..., 3]
    e1 = np.stack([-b, a, -d, c], axis=-1)
    e2 = np.stack([-c, d, a, -b], axis=-1)
    e3 = np.stack([-d, -c, b, a], axis=-1)
    return np.stack([e1, e2, e3], axis=-2)


def volume_form(x, u, v, w) -> np.ndarray:
    """Standard volume form of S^3 (outward-normal-first orientation)."""
    m = np.stack(np.broadcast_arrays(as_points(x), u, v, w), axis=-2)
    return np.linalg.det(m)


# ---------------------------------------------------------------------------
# symmetries


@dataclass(frozen=True)
class TorusActionElement:
    """``(l, l')`` in Z/k x Z/k acting by ``(e^{2 pi i l/k} z1, e^{2 pi i l'/k} z2)``."""

    ell: int
    ell_prime: int
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be positive")
        object.__setattr__(self, "ell", self.ell % self.k)
        object.__setattr__(self, "ell_prime", self.ell_prime % self.k)

    def __mul__(self, other: "TorusActionElement") -> "TorusActionElement":
        if self.k != other.k:
            raise ValueError("torus elements have different k")
        return TorusActionElement(self.ell + other.ell, self.ell_prime + other.ell_prime, self.k)

    def inverse(self) -> "TorusActionElement":
        return TorusActionElement(-self.ell, -self.ell_prime, self.k)


def torus_act(g: TorusActionElement, x) -> np.ndarray:
    z1, z2 = to_complex(as_points(x))
    w1 = np.exp(2j * np.pi * g.ell / g.k)
    w2 = np.exp(2j * np.pi * g.ell_prime / g.k)
    return to_vec(w1 * z1, w2 * z2)


def torus_act_tangent(g: TorusActionElement, v) -> np.ndarray:
    """Differential of the torus action (it is linear on R^4)."""
    z1, z2 = to_complex(v)
    w1 = np.exp(2j * np.pi * g.ell / g.k)
    w2 = np.exp(2j * np.pi * g.ell_prime / g.k)
    w1z, w2z = w1 * z1, w2 * z2
    return np.stack([w1z.real, w1z.imag, w2z.real, w2z.imag], axis=-1)


def involution(x) -> np.ndarray:
    """``(z1, z2) -> (z2, z1)``."""
    x = as_points(x)
    return x[..., [2, 3, 0, 1]]


# ---------------------------------------------------------------------------
# poles


@dataclass(frozen=True)
class PoleConfiguration:
    """k-th roots of unity on the Hopf fibres F0 = {z2 = 0} and F1 = {z1 = 0}."""

    k: int
    positive_poles: np.ndarray = field(repr=False)
    negative_poles: np.ndarray = field(repr=False)
    exclusion_radius: float = DEFAULT_EXCLUSION

    @classmethod
    def roots_of_unity(cls, k: int, exclusion_radius: float = DEFAULT_EXCLUSION) -> "PoleConfiguration":
        if k < 1:
            raise ValueError("k must be a positive integer")
        if exclusion_radius < 0:
            raise ValueError("exclusion radius must be non-negative")
        roots = np.exp(2j * np.pi * np.arange(k) / k)
        zeros = np.zeros(k)
        pos = to_vec(roots, zeros)
        neg = to_vec(zeros, roots)
        pos.setflags(write=False)
        neg.setflags(write=False)
        return cls(k, pos, neg, float(exclusion_radius))

    def with_exclusion(self, radius: float) -> "PoleConfiguration":
        return PoleConfiguration(self.k, self.positive_poles, self.negative_poles, float(radius))

    @property
    def poles(self) -> np.ndarray:
        return np.concatenate([self.positive_poles, self.negative_poles])

    @property
    def signs(self) -> np.ndarray:
        return np.concatenate([np.ones(self.k), -np.ones(self.k)])

    def distance_to_poles(self, x) -> np.ndarray:
        """Distance from each point to the nearest pole."""
        c = as_points(x) @ self.poles.T
        return np.arccos(np.clip(c.max(axis=-1), -1.0, 1.0))

    def pole(self, alpha: int, ell: int) -> np.ndarray:
        poles = self.positive_poles if alpha == 0 else self.negative_poles
        return poles[ell % self.k]

    def min_separation(self) -> float:
        P = self.poles
        d = geodesic_distance(P[:, None, :], P[None, :, :])
        d[np.diag_indices_from(d)] = np.inf
        return float(d.min())


def tube_distance(x) -> tuple[np.ndarray, np.ndarray]:
    """Distances to the fibres F0 and F1: ``(arccos|z1|, arccos|z2|)``."""
    x = as_points(x)
    r1 = np.hypot(x[..., 0], x[..., 1])
    r2 = np.hypot(x[..., 2], x[..., 3])
    return np.arccos(np.clip(r1, 0, 1)), np.arccos(np.clip(r2, 0, 1))


# ---------------------------------------------------------------------------
# sampling and quadrature


def hopf_points(w, xi1, xi2) -> np.ndarray:
    """Map ``|z1|^2 = w`` and two phases to S^3; uniform (w, xi) give uniform points."""
    w = np.asarray(w, dtype=float)
    z1 = np.sqrt(w) * np.exp(1j * np.asarray(xi1))
    z2 = np.sqrt(1.0 - w) * np.exp(1j * np.asarray(xi2))
    return to_vec(z1, z2)


def sample_grid(n: int, exclusion: PoleConfiguration | None = None, seed: int = 0) -> np.ndarray:
    """Deterministic low-discrepancy sample of S^3.

    A scrambled Sobol sequence in (|z1|^2, arg z1, arg z2) is pushed through
    :func:`hopf_points`, which is volume preserving up to a constant.  Points
    within ``exclusion.exclusion_radius`` of a pole are dropped, so the
    returned count can be smaller than ``n``.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    sobol = qmc.Sobol(d=3, scramble=True, seed=seed)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        u = sobol.random(n)
    pts = hopf_points(u[:, 0], 2 * np.pi * u[:, 1], 2 * np.pi * u[:, 2])
    if exclusion is not None and exclusion.exclusion_radius > 0:
        pts = pts[exclusion.distance_to_poles(pts) > exclusion.exclusion_radius]
    if len(pts) == 0:
        raise EmptySample("exclusion removed every sample point")
    return pts


class Sphere2Quadrature(NamedTuple):
    points: np.ndarray  # (M, 4)
    weights: np.ndarray  # (M,)
    normals: np.ndarray  # (M, 4) unit normal pointing away from the centre
    tangents: np.ndarray  # (M, 2, 4) orthonormal, det[x, normal, t1, t2] = +1


def sphere2_quadrature(center, r: float, m: int) -> Sphere2Quadrature:
    """Product Gauss-Legendre x trapezoid rule on the geodesic sphere of radius r.

    ``m`` Gauss nodes in cos(polar angle) and ``2m`` equally spaced azimuths.
    Weights integrate the induced area, so they sum to ``4 pi sin(r)^2``.
    """
    if not 0 < r < np.pi / 4:
        raise ValueError("radius must lie in (0, pi/4)")
    if m < 8:
        raise ValueError("m must be at least 8")
    c = as_points(center)
    e = tangent_frame(c)
    t, wt = roots_legendre(m)
    phi = np.arange(2 * m) * (np.pi / m)
    T, P = np.meshgrid(t, phi, indexing="ij")
    W = np.outer(wt, np.full(2 * m, np.pi / m))
    st = np.sqrt(1.0 - T**2)
    n_hat = (st * np.cos(P))[..., None] * e[0] + (st * np.sin(P))[..., None] * e[1] + T[..., None] * e[2]
    d_polar = (T * np.cos(P))[..., None] * e[0] + (T * np.sin(P))[..., None] * e[1] - st[..., None] * e[2]
    d_azim = -np.sin(P)[..., None] * e[0] + np.cos(P)[..., None] * e[1]
    pts = np.cos(r) * c + np.sin(r) * n_hat
    normal = -np.sin(r) * c + np.cos(r) * n_hat
    tangents = np.stack([d_polar, d_azim], axis=-2)
    pts = pts.reshape(-1, 4)
    normal = normal.reshape(-1, 4)
    tangents = tangents.reshape(-1, 2, 4)
    orient = np.sign(volume_form(pts, normal, tangents[:, 0], tangents[:, 1]))
    tangents[:, 1] *= orient[:, None]
    weights = (W * np.sin(r) ** 2).reshape(-1)
    return Sphere2Quadrature(pts, weights, normal, tangents)
