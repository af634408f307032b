"""Multiport network model of a SISO link steered by 1-bit programmable loads.

The environment (transmitter, receiver and ``n_s`` programmable scatterers) is
described by the scattering sub-blocks ``h0`` (direct path), ``a`` (scatterer
to receiver), ``b`` (transmitter to scatterer) and ``gamma`` (mutual coupling
between scatterers).  Each scatterer is terminated by one of two reflection
coefficients ``alpha``/``beta`` selected by a binary control word, and the
end-to-end channel is obtained by eliminating the scatterer ports:

    h(r) = h0 + a^T (I - diag(r) gamma)^{-1} diag(r) b.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np
import scipy.linalg as sla
from scipy.linalg import lapack

from .errors import InvalidNoise, SingularResolvent, SingularUpdate

__all__ = [
    "ModelParameters",
    "BaselineFactorization",
    "encode_loads",
    "channel_gain",
    "channel_gain_full",
    "channel_gain_batch",
    "prepare_baseline",
    "woodbury_channel",
    "reduce_model",
    "shannon_capacity",
    "capacity_from_gain",
]

#: Reciprocal-condition threshold below which linear systems are rejected.
RCOND_FLOOR = 1e-12


def _as_complex_vector(x, name, n=None):
    arr = np.asarray(x, dtype=np.complex128)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be a 1-d array, got shape {arr.shape}")
    if n is not None and arr.shape[0] != n:
        raise ValueError(f"{name} has length {arr.shape[0]}, expected {n}")
    if not np.all(np.isfinite(arr.view(np.float64))):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


@dataclasses.dataclass(frozen=True)
class ModelParameters:
    """Immutable parameter set of one scenario.

    Parameters
    ----------
    alpha, beta : complex
        Reflection coefficients of the two load states (control bit 0 / 1).
    h0 : complex
        Direct transmitter-to-receiver path.
    a : ndarray of shape (n_s,)
        Coupling from each scatterer port to the receiver.
    b : ndarray of shape (n_s,)
        Coupling from the transmitter to each scatterer port.
    gamma : ndarray of shape (n_s, n_s)
        Mutual coupling between scatterer ports.
    """

    alpha: complex
    beta: complex
    h0: complex
    a: np.ndarray
    b: np.ndarray
    gamma: np.ndarray

    def __post_init__(self):
        a = _as_complex_vector(self.a, "a")
        n = a.shape[0]
        if n < 1:
            raise ValueError("model needs at least one programmable element")
        b = _as_complex_vector(self.b, "b", n)
        gamma = np.asarray(self.gamma, dtype=np.complex128)
        if gamma.shape != (n, n):
            raise ValueError(f"gamma has shape {gamma.shape}, expected {(n, n)}")
        if not np.all(np.isfinite(gamma.view(np.float64))):
            raise ValueError("gamma contains non-finite entries")
        for name in ("alpha", "beta", "h0"):
            z = complex(getattr(self, name))
            if not (math.isfinite(z.real) and math.isfinite(z.imag)):
                raise ValueError(f"{name} is not finite")
            object.__setattr__(self, name, z)
        for name, arr in (("a", a), ("b", b), ("gamma", gamma)):
            arr = arr.copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def n_s(self) -> int:
        return self.a.shape[0]


def encode_loads(v, alpha, beta) -> np.ndarray:
    """Map a binary control vector onto per-element reflection coefficients.

    Entry ``i`` equals ``alpha`` exactly when ``v[i] == 0`` and ``beta``
    exactly when ``v[i] == 1``.
    """
    v = np.asarray(v)
    if v.ndim != 1:
        raise ValueError("control vector must be 1-d")
    if not np.isin(v, (0, 1)).all():
        raise ValueError("control vector entries must be 0 or 1")
    return np.where(v.astype(bool), complex(beta), complex(alpha))


def _factor_resolvent(model, r):
    """LU-factorize I - diag(r) gamma with a conditioning guard."""
    n = model.n_s
    A = np.eye(n, dtype=np.complex128) - r[:, None] * model.gamma
    anorm = np.linalg.norm(A, 1)
    try:
        lu, piv = sla.lu_factor(A)
    except (sla.LinAlgError, ValueError) as exc:
        raise SingularResolvent(f"load-terminated system is singular: {exc}") from exc
    rcond, info = lapack.zgecon(lu, anorm, norm="1")
    if info != 0 or not np.isfinite(rcond) or rcond < RCOND_FLOOR:
        raise SingularResolvent(
            f"load-terminated system too ill-conditioned (rcond={rcond:.3e})"
        )
    return lu, piv


def channel_gain(model: ModelParameters, r) -> complex:
    """End-to-end channel for one load vector ``r`` (diagonal terminations).

    Solves ``(I - diag(r) gamma) x = diag(r) b`` by dense LU and returns
    ``h0 + a @ x``.  Raises :class:`SingularResolvent` when the system is
    singular or its estimated condition number exceeds ``1/RCOND_FLOOR``.
    """
    r = _as_complex_vector(r, "r", model.n_s)
    lu_piv = _factor_resolvent(model, r)
    x = sla.lu_solve(lu_piv, r * model.b)
    return complex(model.h0 + model.a @ x)


def channel_gain_full(model: ModelParameters, phi) -> complex:
    """End-to-end channel for a full (not necessarily diagonal) termination.

    ``phi`` is the n_s x n_s scattering matrix presented to the scatterer
    ports; diagonal ``phi`` reproduces :func:`channel_gain`.
    """
    n = model.n_s
    phi = np.asarray(phi, dtype=np.complex128)
    if phi.shape != (n, n):
        raise ValueError(f"phi has shape {phi.shape}, expected {(n, n)}")
    A = np.eye(n, dtype=np.complex128) - phi @ model.gamma
    anorm = np.linalg.norm(A, 1)
    try:
        lu, piv = sla.lu_factor(A)
    except (sla.LinAlgError, ValueError) as exc:
        raise SingularResolvent(f"terminated system is singular: {exc}") from exc
    rcond, info = lapack.zgecon(lu, anorm, norm="1")
    if info != 0 or not np.isfinite(rcond) or rcond < RCOND_FLOOR:
        raise SingularResolvent(
            f"terminated system too ill-conditioned (rcond={rcond:.3e})"
        )
    x = sla.lu_solve((lu, piv), phi @ model.b)
    return complex(model.h0 + model.a @ x)


def channel_gain_batch(model: ModelParameters, v_batch) -> np.ndarray:
    """Channels for a batch of binary control vectors, shape (batch, n_s).

    Vectorized direct solves without conditioning checks; intended for
    optimizer internals where candidate configurations are re-validated
    before being reported.  Singular configurations yield ``nan``.
    """
    V = np.asarray(v_batch)
    if V.ndim != 2 or V.shape[1] != model.n_s:
        raise ValueError("v_batch must have shape (batch, n_s)")
    R = np.where(V.astype(bool), model.beta, model.alpha)
    A = np.eye(model.n_s, dtype=np.complex128)[None] - R[:, :, None] * model.gamma[None]
    rhs = R * model.b
    try:
        x = np.linalg.solve(A, rhs[..., None])[..., 0]
        h = model.h0 + x @ model.a
    except np.linalg.LinAlgError:
        h = np.empty(V.shape[0], dtype=np.complex128)
        for k in range(V.shape[0]):
            try:
                h[k] = np.linalg.solve(A[k], rhs[k]) @ model.a + model.h0
            except np.linalg.LinAlgError:
                h[k] = np.nan
    return h


@dataclasses.dataclass(frozen=True)
class BaselineFactorization:
    """Cached state of one reference configuration for fast re-termination.

    With ``W = (I - diag(r_ref) gamma)^{-1}``, the fields hold

    - ``s``      : W^T a        (receive couplings through the reference),
    - ``x_ref``  : W diag(r_ref) b,
    - ``gx_ref`` : gamma @ x_ref,
    - ``gw``     : gamma @ W,
    - ``delta``  : per-element load change when the corresponding bit flips.
    """

    v_ref: np.ndarray
    h_ref: complex
    s: np.ndarray
    x_ref: np.ndarray
    gx_ref: np.ndarray
    gw: np.ndarray
    delta: np.ndarray
    b: np.ndarray
    h0: complex

    @property
    def n_s(self) -> int:
        return self.s.shape[0]


def prepare_baseline(model: ModelParameters, v_ref) -> BaselineFactorization:
    """Factor the reference configuration ``v_ref`` for low-rank updates."""
    v_ref = np.asarray(v_ref)
    if v_ref.shape != (model.n_s,):
        raise ValueError("v_ref must have shape (n_s,)")
    r_ref = encode_loads(v_ref, model.alpha, model.beta)
    lu_piv = _factor_resolvent(model, r_ref)
    s = sla.lu_solve(lu_piv, model.a, trans=1)
    x_ref = sla.lu_solve(lu_piv, r_ref * model.b)
    gw = sla.lu_solve(lu_piv, model.gamma.T.copy(), trans=1).T
    delta = np.where(
        v_ref.astype(bool), model.alpha - model.beta, model.beta - model.alpha
    )
    h_ref = complex(model.h0 + model.a @ x_ref)
    arrays = dict(
        v_ref=v_ref.astype(np.uint8),
        s=s,
        x_ref=x_ref,
        gx_ref=model.gamma @ x_ref,
        gw=gw,
        delta=delta,
        b=model.b.copy(),
    )
    for arr in arrays.values():
        arr.flags.writeable = False
    return BaselineFactorization(h_ref=h_ref, h0=model.h0, **arrays)


def woodbury_channel(base: BaselineFactorization, flips) -> complex:
    """Channel after flipping the control bits in ``flips`` (0-based indices).

    Uses a rank-k update of the reference factorization, so the cost is
    O(k^3 + k n_s) instead of a fresh O(n_s^3) solve.  Raises
    :class:`SingularUpdate` when the k x k capacitance system is singular;
    the caller should then evaluate the configuration directly.
    """
    F = np.unique(np.asarray(list(flips), dtype=np.intp))
    if F.size == 0:
        return base.h_ref
    if F.min() < 0 or F.max() >= base.n_s:
        raise ValueError("flip indices out of range")
    dF = base.delta[F]
    bF = base.b[F]
    psub = base.gw[np.ix_(F, F)]
    K = np.eye(F.size, dtype=np.complex128) - psub * dF[None, :]
    rhs = base.gx_ref[F] + psub @ (dF * bF)
    try:
        y = np.linalg.solve(K, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularUpdate(f"rank-{F.size} update is singular") from exc
    if F.size <= 64 and np.linalg.cond(K) > 1e12:
        raise SingularUpdate(f"rank-{F.size} update too ill-conditioned")
    sd = base.s[F] * dF
    return complex(base.h_ref + sd @ bF + sd @ y)


def reduce_model(model: ModelParameters, active, fixed_state="alpha") -> ModelParameters:
    """Absorb the non-selected elements, frozen at one load state.

    The elements not listed in ``active`` are terminated with
    ``alpha`` (``fixed_state="alpha"``) or ``beta`` and eliminated, giving an
    exactly equivalent model over the remaining elements.
    """
    if fixed_state not in ("alpha", "beta"):
        raise ValueError("fixed_state must be 'alpha' or 'beta'")
    active = np.unique(np.asarray(list(active), dtype=np.intp))
    if active.size == 0:
        raise ValueError("active set must not be empty")
    if active.min() < 0 or active.max() >= model.n_s:
        raise ValueError("active indices out of range")
    inactive = np.setdiff1d(np.arange(model.n_s), active)
    if inactive.size == 0:
        return ModelParameters(
            model.alpha, model.beta, model.h0, model.a, model.b, model.gamma
        )
    rho_f = model.alpha if fixed_state == "alpha" else model.beta
    g11 = model.gamma[np.ix_(active, active)]
    g12 = model.gamma[np.ix_(active, inactive)]
    g21 = model.gamma[np.ix_(inactive, active)]
    g22 = model.gamma[np.ix_(inactive, inactive)]
    A = np.eye(inactive.size, dtype=np.complex128) - rho_f * g22
    anorm = np.linalg.norm(A, 1)
    try:
        lu, piv = sla.lu_factor(A)
    except (sla.LinAlgError, ValueError) as exc:
        raise SingularResolvent("fixed-element subsystem is singular") from exc
    rcond, info = lapack.zgecon(lu, anorm, norm="1")
    if info != 0 or not np.isfinite(rcond) or rcond < RCOND_FLOOR:
        raise SingularResolvent(
            f"fixed-element subsystem too ill-conditioned (rcond={rcond:.3e})"
        )
    # T = rho_f (I - rho_f g22)^{-1} applied to [g21 | b2].
    t_g21 = rho_f * sla.lu_solve((lu, piv), g21)
    t_b2 = rho_f * sla.lu_solve((lu, piv), model.b[inactive])
    a2 = model.a[inactive]
    return ModelParameters(
        alpha=model.alpha,
        beta=model.beta,
        h0=model.h0 + a2 @ t_b2,
        a=model.a[active] + t_g21.T @ a2,
        b=model.b[active] + g12 @ t_b2,
        gamma=g11 + g12 @ t_g21,
    )


def capacity_from_gain(gain: float, p_t_mw: float, sigma2_mw: float) -> float:
    """Shannon capacity in bit/s/Hz for a given channel power gain |h|^2."""
    if sigma2_mw <= 0 or not math.isfinite(sigma2_mw):
        raise InvalidNoise(f"noise power must be positive, got {sigma2_mw}")
    if p_t_mw <= 0 or not math.isfinite(p_t_mw):
        raise ValueError(f"transmit power must be positive, got {p_t_mw}")
    if gain < 0:
        raise ValueError("channel power gain must be non-negative")
    return math.log2(1.0 + (p_t_mw / sigma2_mw) * gain)


def shannon_capacity(h: complex, p_t_mw: float, sigma2_mw: float) -> float:
    """Shannon capacity of a scalar channel ``h`` under SNR ``p_t/sigma2``."""
    return capacity_from_gain(abs(complex(h)) ** 2, p_t_mw, sigma2_mw)
