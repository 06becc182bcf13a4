"""The balanced Green's function of S^3 and the dipole-ring potential u.

``G(s) = (pi - s) cot(s) / (2 pi)`` solves ``-Delta G = 2 pi delta - 1/pi`` on
the unit 3-sphere, is smooth at the antipode and behaves like ``1/(2s)`` at
the pole.  The potential is

    u(x) = sum_l G(d(x, p0_l)) - G(d(x, p1_l)),

with poles at the k-th roots of unity on the two Hopf fibres.  The constant
backgrounds cancel because there are as many positive as negative poles, and
``G(pi/2) = 0`` makes ``u`` odd under the coordinate swap.

Functions here accept float arrays of shape ``(..., 4)`` and, for the
automatic-differentiation oracle, object arrays of :class:`~ricciforge.jets.Jet`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PoleCoincidence
from .jets import value_of
from .s3core import POLE_GUARD, PoleConfiguration, as_points, tangent_frame

TWO_PI = 2.0 * np.pi


def _check_open_interval(s):
    v = np.asarray(value_of(s), dtype=float)
    if np.any(~(v > 0)) or np.any(~(v < np.pi)):
        raise DomainError("radial argument must lie in (0, pi)")


def green_radial(s):
    """G(s) for s in (0, pi)."""
    _check_open_interval(s)
    return (np.pi - s) * np.cos(s) / (np.sin(s) * TWO_PI)


def green_radial_d1(s):
    _check_open_interval(s)
    sn, cs = np.sin(s), np.cos(s)
    return -(cs / sn + (np.pi - s) / sn**2) / TWO_PI


def green_radial_d2(s):
    _check_open_interval(s)
    sn, cs = np.sin(s), np.cos(s)
    return (1.0 + (np.pi - s) * cs / sn) / (np.pi * sn**2)


def radial_laplacian(f1, f2, s):
    """Laplacian of a radial function on S^3 from its first two derivatives."""
    return f2 + 2.0 * np.cos(s) / np.sin(s) * f1


# ---------------------------------------------------------------------------
# the potential


def _pole_cosines(cfg: PoleConfiguration, x):
    return x @ cfg.poles.T


def _pole_distances(cfg, x):
    """Float distances to every pole via the chord, accurate down to ~1e-16."""
    chord = np.linalg.norm(x[..., None, :] - cfg.poles, axis=-1)
    return 2.0 * np.arcsin(np.minimum(chord / 2.0, 1.0))


def _green_closed(s):
    """G on (0, pi], written through sinc so the antipode s = pi is regular."""
    return np.cos(s) / (TWO_PI * np.sinc((np.pi - s) / np.pi))


def _guard(cfg, x, antipodes=True):
    if isinstance(x, np.ndarray) and x.dtype == object:
        d = np.arccos(np.clip(np.asarray(value_of(_pole_cosines(cfg, x)), dtype=float), -1, 1))
    else:
        d = _pole_distances(cfg, x)
    if np.any(d < POLE_GUARD):
        raise PoleCoincidence("point coincides with a pole")
    if antipodes and np.any(d > np.pi - POLE_GUARD):
        raise PoleCoincidence("derivatives are evaluated pole by pole and need distance < pi")


def _prep(x):
    if isinstance(x, np.ndarray) and x.dtype == object:
        return x
    return as_points(x)


def potential_u(cfg: PoleConfiguration, x, scaled: bool = False):
    """u(x), or u_k = u/k when ``scaled``."""
    x = _prep(x)
    _guard(cfg, x, antipodes=x.dtype == object)
    if x.dtype == object:
        c = np.minimum(np.maximum(_pole_cosines(cfg, x), -1.0), 1.0)
        g = green_radial(np.arccos(c))
    else:
        g = _green_closed(_pole_distances(cfg, x))
    k = cfg.k
    u = np.sum(g[..., :k], axis=-1) - np.sum(g[..., k:], axis=-1)
    return u / k if scaled else u


def _radial_pieces(cfg, x):
    """Distances, unit gradients and G', G'' to every pole, pole axis second to last."""
    x = as_points(x)
    _guard(cfg, x)
    s = _pole_distances(cfg, x)  # (..., 2k)
    c = np.cos(s)
    sn = np.sin(s)
    grad = (x[..., None, :] * c[..., None] - cfg.poles) / sn[..., None]
    grad = grad - np.sum(grad * x[..., None, :], axis=-1, keepdims=True) * x[..., None, :]
    return s, grad, green_radial_d1(s), green_radial_d2(s)


def grad_u(cfg: PoleConfiguration, x, scaled: bool = False) -> np.ndarray:
    """Ambient representation (..., 4) of the gradient of u on S^3."""
    _, grad, d1, _ = _radial_pieces(cfg, x)
    w = d1 * cfg.signs
    g = np.sum(w[..., None] * grad, axis=-2)
    return g / cfg.k if scaled else g


def hess_u(cfg: PoleConfiguration, x, scaled: bool = False) -> np.ndarray:
    """Covariant Hessian of u as a symmetric (..., 4, 4) form on the tangent space.

    For a radial function f(d), ``Hess f = f'' dd (x) dd + f' cot(d) (g - dd (x) dd)``.
    """
    x = as_points(x)
    s, grad, d1, d2 = _radial_pieces(cfg, x)
    P = np.eye(4) - x[..., :, None] * x[..., None, :]
    gg = grad[..., :, None] * grad[..., None, :]
    cot = np.cos(s) / np.sin(s)
    a = (d2 * cfg.signs)[..., None, None]
    b = (d1 * cot * cfg.signs)[..., None, None]
    H = np.sum(a * gg + b * (P[..., None, :, :] - gg), axis=-3)
    return H / cfg.k if scaled else H


def laplacian_u(cfg: PoleConfiguration, x, scaled: bool = False) -> np.ndarray:
    return np.trace(hess_u(cfg, x, scaled), axis1=-2, axis2=-1)


def frame_components(x, vec=None, mat=None):
    """Components of an ambient tangent vector / form in :func:`tangent_frame`."""
    e = tangent_frame(x)
    out = []
    if vec is not None:
        out.append(np.einsum("...ia,...a->...i", e, vec))
    if mat is not None:
        out.append(np.einsum("...ia,...ab,...jb->...ij", e, mat, e))
    return out[0] if len(out) == 1 else tuple(out)


@dataclass(frozen=True)
class Potential:
    """The potential attached to a pole configuration."""

    poles: PoleConfiguration

    @classmethod
    def for_k(cls, k: int) -> "Potential":
        return cls(PoleConfiguration.roots_of_unity(k))

    def __call__(self, x, scaled: bool = False):
        return potential_u(self.poles, x, scaled)

    def grad(self, x, scaled: bool = False):
        return grad_u(self.poles, x, scaled)

    def hess(self, x, scaled: bool = False):
        return hess_u(self.poles, x, scaled)

    def laplacian(self, x, scaled: bool = False):
        return laplacian_u(self.poles, x, scaled)


def discrete_laplacian(cfg: PoleConfiguration, x, h: float) -> np.ndarray:
    """Six-point geodesic stencil: sum over +-h along an orthonormal frame."""
    x = as_points(x)
    e = tangent_frame(x)
    u0 = potential_u(cfg, x)
    acc = np.zeros_like(u0)
    for i in range(3):
        for sgn in (1.0, -1.0):
            y = np.cos(h) * x + sgn * np.sin(h) * e[..., i, :]
            acc = acc + potential_u(cfg, y)
    return (acc - 6.0 * u0) / h**2


@dataclass(frozen=True)
class BoundReport:
    k: int
    samples: int
    c_star: float
    worst_point: np.ndarray


def bound_check_u(cfg: PoleConfiguration, samples) -> BoundReport:
    """Empirical constant in ``|u_k| <= C + 1/|z1| + 1/|z2|`` over ``samples``."""
    x = as_points(samples)
    uk = potential_u(cfg, x, scaled=True)
    r1 = np.hypot(x[:, 0], x[:, 1])
    r2 = np.hypot(x[:, 2], x[:, 3])
    with np.errstate(divide="ignore"):
        excess = np.abs(uk) - 1.0 / r1 - 1.0 / r2
    i = int(np.argmax(excess))
    return BoundReport(cfg.k, len(x), float(excess[i]), x[i])
