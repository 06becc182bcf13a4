"""Profile functions and closed-form Ricci curvature of the bundle metrics.

Four formula layers are implemented, from most general to most specialised:

``ricci_bundle_standard``
    circle bundle with fibre scale ``f`` over an arbitrary base, in terms of
    the base Laplacian and Hessian of ``f`` and the base Ricci tensor;
``ricci_bundle_general``
    the metric ``W g_S3 + W^{-1} theta^2`` for an arbitrary positive ``W``
    and curvature form ``omega``;
``ricci_bundle_potential``
    the same with ``omega = *du`` for harmonic ``u`` and ``W = W(u)``;
``ricci_closed_form``
    the metric ``h_k`` written through the profile ``V`` and ``u_k = u/k``.

All of them return a :class:`RicciForm` in an orthonormal frame
``{U, X1, X2, X3}``: one unit vertical vector and the horizontal lifts of an
orthonormal frame of the base.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NonpositiveF, NonpositiveW, NotFound
from .harmonic import grad_u, hess_u, potential_u
from .s3core import DEFAULT_EXCLUSION, PoleConfiguration, as_points, sample_grid, tangent_frame, volume_form

FOUR_PI = 4.0 * np.pi

# 3D Levi-Civita symbol
EPS3 = np.zeros((3, 3, 3))
EPS3[0, 1, 2] = EPS3[1, 2, 0] = EPS3[2, 0, 1] = 1.0
EPS3[0, 2, 1] = EPS3[2, 1, 0] = EPS3[1, 0, 2] = -1.0


# ---------------------------------------------------------------------------
# the profile V


def V(x):
    """``log(e^{4 pi x} + e^{-4 pi x} + 2) / (4 pi)``, evaluated without overflow."""
    a = np.abs(x)
    return a + np.log1p(np.exp(-FOUR_PI * a)) / (2.0 * np.pi)


def V_literal(x):
    """The defining expression verbatim; overflows for |x| above ~56."""
    return np.log(np.exp(FOUR_PI * x) + np.exp(-FOUR_PI * x) + 2.0) / FOUR_PI


def V1(x):
    """V'(x) = tanh(2 pi x)."""
    return np.tanh(2.0 * np.pi * x)


def sech2(x):
    """``1 - V'(x)^2 = sech^2(2 pi x) = 4 / (e^{4 pi x} + e^{-4 pi x} + 2)``."""
    t = np.exp(-FOUR_PI * np.abs(x))
    return 4.0 * t / (1.0 + t) ** 2


def V2(x):
    """V''(x) = 2 pi sech^2(2 pi x)."""
    return 2.0 * np.pi * sech2(x)


@dataclass(frozen=True)
class MetricParams:
    k: int
    lam: float

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be a positive integer")
        if not self.lam > 1:
            raise ValueError("Lambda must exceed 1")

    @property
    def poles(self) -> PoleConfiguration:
        return PoleConfiguration.roots_of_unity(self.k)

    def V_lambda(self, x):
        return V(x) / self.lam + 1.0

    def W(self, x):
        """W_k(x) = k (V(x/k) + Lambda), with its first two derivatives."""
        y = x / self.k
        return self.k * (V(y) + self.lam), V1(y), V2(y) / self.k

    def one_minus_W1sq(self, x):
        return sech2(x / self.k)


# ---------------------------------------------------------------------------
# Ricci forms


@dataclass(frozen=True)
class RicciForm:
    """Symmetric form in the frame ``{U, X1, X2, X3}``; leading axes are batch axes."""

    vertical: np.ndarray
    mixed: np.ndarray
    horizontal: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        v = np.asarray(self.vertical, dtype=float)
        mx = np.asarray(self.mixed, dtype=float)
        hz = np.asarray(self.horizontal, dtype=float)
        m = hz.shape[-1]
        out = np.zeros(v.shape + (m + 1, m + 1))
        out[..., 0, 0] = v
        out[..., 0, 1:] = mx
        out[..., 1:, 0] = mx
        out[..., 1:, 1:] = hz
        return out

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def scaled(self, c) -> "RicciForm":
        c = np.asarray(c, dtype=float)
        return RicciForm(self.vertical * c, self.mixed * c[..., None], self.horizontal * c[..., None, None])

    def evaluate(self, coeffs) -> np.ndarray:
        """Ric(Y, Y) for ``Y = coeffs[0] U + sum coeffs[i] X_i``."""
        c = np.asarray(coeffs, dtype=float)
        return np.einsum("...i,...ij,...j->...", c, self.matrix, c)


def relative_deviation(a: RicciForm, b: RicciForm) -> np.ndarray:
    """Frobenius distance relative to the size of ``b``, per batch entry."""
    ma, mb = a.matrix, b.matrix
    num = np.linalg.norm(ma - mb, axis=(-2, -1))
    den = np.linalg.norm(mb, axis=(-2, -1))
    return num / den


# ---------------------------------------------------------------------------
# layer 1: circle bundle over an arbitrary base


def ricci_bundle_standard(f, df, hess_f, omega, delta_omega, ric_base) -> RicciForm:
    """Ricci form of ``g_B + f^2 theta^2`` with ``d theta = omega``.

    Every input is a component array in a ``g_B``-orthonormal frame of the
    base: ``df`` and ``delta_omega`` are (..., m), ``hess_f``, ``omega`` and
    ``ric_base`` are (..., m, m).  ``delta`` is the codifferential,
    ``(delta omega)_j = -nabla^i omega_ij``.
    """
    f = np.asarray(f, dtype=float)
    if np.any(f <= 0):
        raise NonpositiveF("fibre scale must be positive")
    fe = f[..., None]
    fee = f[..., None, None]
    lap_f = np.trace(hess_f, axis1=-2, axis2=-1)
    norm2 = 0.5 * np.sum(omega**2, axis=(-2, -1))
    vertical = -lap_f / f + 0.5 * f**2 * norm2
    mixed = 0.5 * (fe * delta_omega + 3.0 * np.einsum("...ij,...j->...i", omega, df))
    horizontal = ric_base - 0.5 * fee**2 * np.einsum("...il,...jl->...ij", omega, omega) - hess_f / fee
    return RicciForm(vertical, mixed, horizontal)


# ---------------------------------------------------------------------------
# data of a W-bundle over the round S^3


@dataclass(frozen=True)
class BundleData:
    """Pointwise data of ``W g_S3 + W^{-1} theta^2`` in an orthonormal frame of T S^3."""

    W: np.ndarray
    dW: np.ndarray
    hessW: np.ndarray
    omega: np.ndarray
    delta_omega: np.ndarray

    @property
    def lapW(self):
        return np.trace(self.hessW, axis1=-2, axis2=-1)


def hodge_1form(alpha) -> np.ndarray:
    """``*alpha`` as an antisymmetric matrix: ``(*alpha)_ij = eps_ijk alpha_k``."""
    return np.einsum("ijk,...k->...ij", EPS3, alpha)


def hodge_codifferential(nabla_alpha) -> np.ndarray:
    """``delta(*alpha)`` from the covariant derivative ``nabla_i alpha_k``."""
    return -np.einsum("ijk,...ik->...j", EPS3, nabla_alpha)


def standard_inputs(data: BundleData):
    """Translate W-bundle data into the inputs of :func:`ricci_bundle_standard`.

    The base is ``B = W g`` (a conformal change in dimension 3) and the fibre
    scale is ``f = W^{-1/2}``.  Outputs are in the B-orthonormal frame
    ``W^{-1/2} e_i``.
    """
    W = np.asarray(data.W, dtype=float)
    if np.any(W <= 0):
        raise NonpositiveW("W must be positive")
    We, Wee = W[..., None], W[..., None, None]
    dW, HW = data.dW, data.hessW
    I = np.eye(3)
    dWdW = dW[..., :, None] * dW[..., None, :]
    f = W**-0.5
    df = -0.5 * We**-1.5 * dW
    dw = dW / (2.0 * We)
    hess_f_g = -0.5 * Wee**-1.5 * HW + 0.75 * Wee**-2.5 * dWdW
    hess_f_B = (hess_f_g - dw[..., :, None] * df[..., None, :] - df[..., :, None] * dw[..., None, :]
                + np.sum(dw * df, axis=-1)[..., None, None] * I)
    hess_w = HW / (2.0 * Wee) - dWdW / (2.0 * Wee**2)
    lap_w = np.trace(hess_w, axis1=-2, axis2=-1)
    ric_B = (2.0 * I - (hess_w - dw[..., :, None] * dw[..., None, :])
             - (lap_w + np.sum(dw * dw, axis=-1))[..., None, None] * I)
    delta_B = (data.delta_omega + 0.5 / We * np.einsum("...l,...lj->...j", dW, data.omega)) / We
    return dict(
        f=f,
        df=df / np.sqrt(We),
        hess_f=hess_f_B / Wee,
        omega=data.omega / Wee,
        delta_omega=delta_B / np.sqrt(We),
        ric_base=ric_B / Wee,
    )


def ricci_from_standard(data: BundleData) -> RicciForm:
    return ricci_bundle_standard(**standard_inputs(data))


# ---------------------------------------------------------------------------
# layer 2: general W


def ricci_bundle_general(data: BundleData) -> RicciForm:
    """Ricci form of ``W g_S3 + W^{-1} theta^2`` with curvature ``omega``.

    Evaluated in the frame ``{U, W^{-1/2} e_i}`` where ``e_i`` is the
    orthonormal frame the data are expressed in.
    """
    W = np.asarray(data.W, dtype=float)
    if np.any(W <= 0):
        raise NonpositiveW("W must be positive")
    We, Wee = W[..., None], W[..., None, None]
    dW, om = data.dW, data.omega
    lapW = data.lapW
    norm_om = 0.5 * np.sum(om**2, axis=(-2, -1))
    norm_dW = np.sum(dW**2, axis=-1)
    vertical = 0.5 * lapW / W**2 + 0.5 * (norm_om - norm_dW) / W**3
    om_dW = np.einsum("...l,...lj->...j", dW, om)  # omega(grad W, e_j)
    mixed = 0.5 * data.delta_omega / We**2 + om_dW / We**3
    I = np.eye(3)
    wedge = norm_dW[..., None, None] * I - dW[..., :, None] * dW[..., None, :]
    contr = np.einsum("...il,...jl->...ij", om, om)
    horizontal = (2.0 * I - 0.5 * (lapW / W)[..., None, None] * I - 0.5 * (contr - wedge) / Wee**2) / Wee
    return RicciForm(vertical, mixed, horizontal)


# ---------------------------------------------------------------------------
# layer 3: W = W(u), omega = *du


def ricci_bundle_potential(W, W1, W2, du, one_minus_W1sq=None) -> RicciForm:
    """Ricci form for ``W = W(u)``, ``omega = *du`` and harmonic ``u``.

    ``W1`` and ``W2`` are the first two derivatives of the profile at ``u``
    and ``du`` the gradient components in an orthonormal frame.  The frame
    of the result is ``{U, W^{-1/2} e_i}``.
    """
    W = np.asarray(W, dtype=float)
    if np.any(W <= 0):
        raise NonpositiveW("W must be positive")
    omw = 1.0 - W1**2 if one_minus_W1sq is None else one_minus_W1sq
    du2 = np.sum(du**2, axis=-1)
    bracket = W2 / W + omw / W**2
    vertical = 0.5 * du2 / W * bracket
    mixed = np.zeros(np.shape(du))
    I = np.eye(3)
    horizontal = (2.0 * I + (omw / (2.0 * W**2))[..., None, None] * du[..., :, None] * du[..., None, :]
                  - (0.5 * bracket * du2)[..., None, None] * I) / W[..., None, None]
    return RicciForm(vertical, mixed, horizontal)


# ---------------------------------------------------------------------------
# the metric h_k


def adapted_frame(cfg: PoleConfiguration, x) -> np.ndarray:
    """Oriented orthonormal frame (..., 3, 4) of T_x S^3 with e1 along grad u.

    Where ``|du| <= 1e-12`` the global quaternion frame is used instead.
    """
    x = as_points(x)
    base = tangent_frame(x)
    g = grad_u(cfg, x)
    norm = np.linalg.norm(g, axis=-1)
    ok = norm > 1e-12
    n = np.where(ok[..., None], g / np.where(ok, norm, 1.0)[..., None], base[..., 0, :])
    # Gram-Schmidt the two quaternion directions least aligned with n
    align = np.abs(np.einsum("...ia,...a->...i", base, n))
    order = np.argsort(align, axis=-1)
    b1 = np.take_along_axis(base, order[..., 0, None, None], axis=-2)[..., 0, :]
    e2 = b1 - np.sum(b1 * n, axis=-1, keepdims=True) * n
    e2 /= np.linalg.norm(e2, axis=-1, keepdims=True)
    b2 = np.take_along_axis(base, order[..., 1, None, None], axis=-2)[..., 0, :]
    e3 = b2 - np.sum(b2 * n, axis=-1, keepdims=True) * n - np.sum(b2 * e2, axis=-1, keepdims=True) * e2
    e3 /= np.linalg.norm(e3, axis=-1, keepdims=True)
    sign = np.sign(volume_form(x, n, e2, e3))
    e3 = e3 * sign[..., None]
    frame = np.stack([n, e2, e3], axis=-2)
    return np.where(ok[..., None, None], frame, base)


def potential_frame_data(cfg: PoleConfiguration, x, frame=None):
    """u, du and Hess u in an orthonormal frame (default: :func:`adapted_frame`)."""
    x = as_points(x)
    if frame is None:
        frame = adapted_frame(cfg, x)
    u = potential_u(cfg, x)
    du = np.einsum("...ia,...a->...i", frame, grad_u(cfg, x))
    H = np.einsum("...ia,...ab,...jb->...ij", frame, hess_u(cfg, x), frame)
    return u, du, H


def bundle_data_hk(params: MetricParams, x, frame=None) -> BundleData:
    """W-bundle data of ``k Lambda h_k`` (that is W = W_k(u), omega = *du)."""
    u, du, H = potential_frame_data(params.poles, x, frame)
    W, W1, W2 = params.W(u)
    hessW = W2[..., None, None] * du[..., :, None] * du[..., None, :] + W1[..., None, None] * H
    return BundleData(W, W1[..., None] * du, hessW, hodge_1form(du), hodge_codifferential(H))


def fiber_length(params: MetricParams, x) -> np.ndarray:
    """``(k Lambda sqrt(V_Lambda(u_k)))^{-1}``."""
    uk = potential_u(params.poles, x, scaled=True)
    return 1.0 / (params.k * params.lam * np.sqrt(params.V_lambda(uk)))


def ricci_closed_form(params: MetricParams, x, basefin_power: int = 2) -> RicciForm:
    """Ricci form of ``h_k`` in the frame adapted to ``grad u``.

    The horizontal block is diagonal: the first direction carries the
    ``(du_k(X))^2 = |du_k|^2`` term, the other two carry none.  ``|du_k|``
    is the round-sphere norm.  ``basefin_power`` selects the power of
    ``V + Lambda`` in the denominator of that term; 2 is the value that
    agrees with the general formulas (see tests), 1 is kept for comparison.
    """
    cfg = params.poles
    x = as_points(x)
    uk = potential_u(cfg, x, scaled=True)
    du2 = np.sum(grad_u(cfg, x, scaled=True) ** 2, axis=-1)
    lam = params.lam
    D = V(uk) + lam
    s2 = sech2(uk)
    bracket = V2(uk) / D + s2 / D**2
    a = lam / D
    vertical = 0.5 * du2 * a * bracket
    B = 0.5 * du2 * bracket
    h = np.zeros(np.shape(uk) + (3, 3))
    h[..., 0, 0] = a * (2.0 + s2 / (2.0 * D**basefin_power) * du2 - B)
    h[..., 1, 1] = a * (2.0 - B)
    h[..., 2, 2] = a * (2.0 - B)
    return RicciForm(vertical, np.zeros(np.shape(uk) + (3,)), h)


def ricci_layers(params: MetricParams, x) -> dict[str, RicciForm]:
    """All four formula layers for ``h_k``, in the same h_k-orthonormal frame."""
    x = as_points(x)
    frame = adapted_frame(params.poles, x)
    data = bundle_data_hk(params, x, frame)
    u, du, _ = potential_frame_data(params.poles, x, frame)
    W, W1, W2 = params.W(u)
    scale = params.k * params.lam * np.ones(np.shape(W))
    return {
        "standard": ricci_from_standard(data).scaled(scale),
        "general": ricci_bundle_general(data).scaled(scale),
        "potential": ricci_bundle_potential(W, W1, W2, du, params.one_minus_W1sq(u)).scaled(scale),
        "closed_form": ricci_closed_form(params, x),
    }


# ---------------------------------------------------------------------------
# choosing Lambda


@dataclass(frozen=True)
class LambdaMargins:
    lam: float
    curvature_term: float  # max |du_k|^2 V''(u_k) / (V + Lambda)
    gradient_term: float  # max |du_k|^2 (1 - V'^2) / (V + Lambda)
    min_eigenvalue: float
    max_eigenvalue: float
    max_vertical: float

    def satisfied(self, delta: float) -> bool:
        return (self.curvature_term <= delta and self.gradient_term <= delta
                and self.min_eigenvalue > 0 and self.max_eigenvalue <= 2.0 + 10.0 * delta)


def lambda_margins(params: MetricParams, x) -> LambdaMargins:
    cfg = params.poles
    uk = potential_u(cfg, x, scaled=True)
    du2 = np.sum(grad_u(cfg, x, scaled=True) ** 2, axis=-1)
    D = V(uk) + params.lam
    form = ricci_closed_form(params, x)
    # the form is diagonal in the adapted frame
    diag = np.concatenate([form.vertical[..., None], np.diagonal(form.horizontal, axis1=-2, axis2=-1)], axis=-1)
    return LambdaMargins(
        params.lam,
        float(np.max(du2 * V2(uk) / D)),
        float(np.max(du2 * sech2(uk) / D)),
        float(diag.min()),
        float(diag.max()),
        float(form.vertical.max()),
    )


def standard_grid(k: int, n: int = 10_000, seed: int = 0, exclusion: float = DEFAULT_EXCLUSION) -> np.ndarray:
    return sample_grid(n, PoleConfiguration.roots_of_unity(k, exclusion), seed)


def choose_lambda(k: int, delta: float = 0.05, n: int = 10_000, seed: int = 0,
                  exclusion: float = DEFAULT_EXCLUSION, max_exponent: int = 40) -> float:
    """Smallest power of two Lambda > 1 meeting the three margin conditions on the grid."""
    if not 0 < delta <= 0.1:
        raise ValueError("delta must lie in (0, 0.1]")
    x = standard_grid(k, n, seed, exclusion)
    for e in range(1, max_exponent + 1):
        lam = 2.0**e
        if lambda_margins(MetricParams(k, lam), x).satisfied(delta):
            return lam
    raise NotFound(f"no Lambda <= 2^{max_exponent} satisfies the margins for k={k}, delta={delta}")


# ---------------------------------------------------------------------------
# conformal identity on S^3


def w_of_potential(params: MetricParams) -> Callable:
    """``x -> W_k(u(x))`` on ambient points; accepts jets."""
    cfg = params.poles

    def W(x):
        u = potential_u(cfg, x)
        return params.k * (V(u / params.k) + params.lam)

    return W


def conformal_ricci_identity(W_func: Callable, x, scheme: str = "jet", h: float = 1e-3,
                             gradient_coefficient: float = 0.5):
    """Residual of the identity for ``Ric_{Wg} - Hess_{Wg}(W^{-1/2}) / W^{-1/2}``.

    The left side is computed by brute force on the gnomonic chart centred at
    ``x`` (jets or finite differences).  The right side is the closed form::

        2 g - 1/2 (Lap W / W - |dW|^2 / W^2) g - c dW (x) dW / W^2

    with ``c = gradient_coefficient``.  Returns ``(residual, lhs, rhs)`` with
    both sides in the orthonormal frame :func:`tangent_frame` at ``x``.
    """
    from .curvature_oracle import (ChartMetric, covariant_hessian, curvature_at, gnomonic_point, scalar_jet,
                                   sphere_gnomonic_metric)

    x0 = as_points(x)
    gn = sphere_gnomonic_metric()

    def Wc(y):
        return W_func(gnomonic_point(x0, y))

    chart = ChartMetric(3, lambda y: Wc(y) * gn(y))
    origin = np.zeros(3)
    curv = curvature_at(chart, origin, scheme=scheme, h=h)
    F = lambda y: Wc(y) ** -0.5  # noqa: E731
    if scheme == "jet":
        Fj = scalar_jet(F, origin)
    else:
        Fj = _fd_scalar(F, origin, h)
    hessF = covariant_hessian(curv.christoffel, Fj)
    lhs = curv.ricci - hessF / Fj.value

    Wj = scalar_jet(Wc, origin)
    W0, dW, HW = Wj.value, Wj.grad, Wj.hess
    lap = np.trace(HW)
    I = np.eye(3)
    rhs = 2 * I - 0.5 * (lap / W0 - dW @ dW / W0**2) * I - gradient_coefficient * np.outer(dW, dW) / W0**2
    return float(np.abs(lhs - rhs).max()), lhs, rhs


def _fd_scalar(F, x, h):
    from .curvature_oracle import ScalarJet

    def raw(step):
        n = x.size
        E = np.eye(n) * step
        f0 = float(F(x))
        g = np.zeros(n)
        H = np.zeros((n, n))
        for i in range(n):
            fp, fm = float(F(x + E[i])), float(F(x - E[i]))
            g[i] = (fp - fm) / (2 * step)
            H[i, i] = (fp - 2 * f0 + fm) / step**2
            for j in range(i + 1, n):
                v = (float(F(x + E[i] + E[j])) - float(F(x + E[i] - E[j]))
                     - float(F(x - E[i] + E[j])) + float(F(x - E[i] - E[j]))) / (4 * step**2)
                H[i, j] = H[j, i] = v
        return f0, g, H

    f0, g1, H1 = raw(h)
    _, g2, H2 = raw(h / 2)
    return ScalarJet(f0, (4 * g2 - g1) / 3, (4 * H2 - H1) / 3)
