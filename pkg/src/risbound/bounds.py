"""Analytic upper bounds on the programmable channel gain.

Three bounds of increasing cost:

* ``ni_bound``   -- norm-inequality bound from the triangle inequality and a
  Neumann-series argument; closed form, valid when ``gamma * ||Gamma||_2 < 1``.
* ``nio_bound``  -- the same bound minimized over admissible reparametrizations
  (diagonal similarity plus a scalar Moebius map of the loads) by multi-start
  local descent; any admissible iterate is itself a valid bound, so an inexact
  minimum is still correct.
* ``ibd_bound``  -- exact global optimum over *all* unitary (lossless) load
  networks, from the ellipsoid geometry of the feasible auxiliary vectors;
  ``ibd_achiever`` constructs a unitary network attaining it.
"""

from __future__ import annotations

import dataclasses
import math
import warnings

import numpy as np

from .errors import (
    DegenerateAchieverWarning,
    GaugeError,
    NotContractive,
    NotUnitModulusLoads,
)
from .gauges import GaugeParameters, apply_gauge
from .model import ModelParameters

__all__ = [
    "BoundReport",
    "NioOptions",
    "IbdIntermediates",
    "ni_bound",
    "nio_bound",
    "ibd_bound",
    "ibd_achiever",
]

UNIT_MODULUS_TOL = 1e-9
CONTRACTIVITY_MARGIN = 1e-12


@dataclasses.dataclass
class BoundReport:
    """One computed bound: ``value`` upper-bounds ``|h(v)|^2`` when ``valid``."""

    kind: str  # "NI" | "NIO" | "IBD" | "SDR"
    value: float
    valid: bool
    diagnostics: dict = dataclasses.field(default_factory=dict)


@dataclasses.dataclass
class IbdIntermediates:
    q: np.ndarray  # Hermitian unitarity deficit I - Gamma^H Gamma
    x0: np.ndarray  # ellipsoid center
    p2: float  # squared ellipsoid radius
    h_c: complex  # channel at the center


def _load_magnitude(theta: ModelParameters) -> float:
    return max(abs(theta.alpha), abs(theta.beta))


def _spectral_norm(mat: np.ndarray) -> float:
    if mat.size == 0:
        return 0.0
    return float(np.linalg.norm(mat, 2))


def _ni_value(theta: ModelParameters):
    """Return (value or None, gamma, gamma * ||Gamma||_2)."""
    gamma = _load_magnitude(theta)
    contraction = gamma * _spectral_norm(theta.gamma)
    if contraction >= 1.0:
        return None, gamma, contraction
    norm_a = float(np.linalg.norm(theta.a))
    norm_b = float(np.linalg.norm(theta.b))
    amplified = norm_a * gamma / (1.0 - contraction) * norm_b
    return (abs(theta.h0) + amplified) ** 2, gamma, contraction


def ni_bound(theta: ModelParameters) -> BoundReport:
    """Triangle-inequality bound ``(|h0| + ||a|| g/(1-g||Gamma||) ||b||)^2``.

    ``g = max(|alpha|, |beta|)``.  Invalid (no finite statement) when the
    Neumann condition ``g * ||Gamma||_2 < 1`` fails; the report then carries
    ``valid=False`` and a NaN value rather than raising.
    """
    value, gamma, contraction = _ni_value(theta)
    diag = {"gamma": gamma, "contraction": contraction}
    if value is None:
        diag["violated"] = "gamma * ||Gamma||_2 >= 1"
        return BoundReport("NI", math.nan, False, diag)
    return BoundReport("NI", value, True, diag)


@dataclasses.dataclass
class NioOptions:
    restarts: int = 8  # identity start plus randomized perturbations
    max_iters: int = 500
    grad_step: float = 1e-6  # relative central-difference step
    tol: float = 1e-10
    barrier: float = 1e-4  # log-barrier weight, relative to the identity value
    init_spread: float = 0.3
    seed: int = 0


def nio_bound(theta: ModelParameters, opts: NioOptions | None = None) -> BoundReport:
    """Minimize the norm-inequality bound over admissible reparametrizations.

    Searches jointly over a diagonal similarity ``d`` and a scalar Moebius
    parameter ``m`` (the complex-scaling direction cannot change the bound's
    validity region and is left at 1).  Multi-start descent on
    ``(Re d, Im d, Re m, Im m)`` with central-difference gradients and a
    log-barrier keeping ``1 - g~ * ||Gamma~||_2 > 0``.  Every admissible
    evaluation is a valid bound, so the best value seen anywhere in the
    search is returned; the identity gauge is always in the search set.
    """
    opts = opts or NioOptions()
    identity = ni_bound(theta)
    if not identity.valid:
        diag = dict(identity.diagnostics)
        diag["violated"] = "identity gauge infeasible: " + diag.get("violated", "")
        return BoundReport("NIO", math.nan, False, diag)

    n = theta.n_s
    mu = opts.barrier * max(identity.value, 1.0)
    evaluations = 0
    best = {
        "value": identity.value,
        "d": np.ones(n, dtype=complex),
        "m": 0j,
        "contraction": identity.diagnostics["contraction"],
    }

    def objective(p):
        nonlocal evaluations
        evaluations += 1
        d = p[:n] + 1j * p[n : 2 * n]
        m = complex(p[2 * n], p[2 * n + 1])
        try:
            gauged = apply_gauge(theta, GaugeParameters(d=d, c=1.0 + 0j, m=m))
        except GaugeError:
            return math.inf
        value, _, contraction = _ni_value(gauged)
        if value is None:
            return math.inf
        if value < best["value"]:
            best.update(value=value, d=d.copy(), m=m, contraction=contraction)
        return value - mu * math.log1p(-contraction)

    rng = np.random.default_rng(opts.seed)
    dim = 2 * n + 2
    starts = [np.concatenate([np.ones(n), np.zeros(n + 2)])]
    for _ in range(max(opts.restarts - 1, 0)):
        p = starts[0] + opts.init_spread * rng.standard_normal(dim)
        p[-2:] = np.clip(p[-2:], -0.5, 0.5)
        starts.append(p)

    for p in starts:
        f = objective(p)
        if not math.isfinite(f):
            continue
        for _ in range(opts.max_iters):
            grad = np.zeros(dim)
            for j in range(dim):
                h = opts.grad_step * max(1.0, abs(p[j]))
                e = np.zeros(dim)
                e[j] = h
                grad[j] = (objective(p + e) - objective(p - e)) / (2.0 * h)
            gnorm = float(np.linalg.norm(grad))
            if not math.isfinite(gnorm) or gnorm == 0.0:
                break
            step = 0.25 * (1.0 + float(np.linalg.norm(p))) / gnorm
            improved = False
            for _ in range(25):
                f_new = objective(p - step * grad)
                if f_new < f:
                    p = p - step * grad
                    decrease = f - f_new
                    f = f_new
                    improved = True
                    break
                step *= 0.5
            if not improved or decrease <= opts.tol * (1.0 + abs(f)):
                break

    diag = {
        "ni_identity": identity.value,
        "gauge_d": best["d"],
        "gauge_m": best["m"],
        "contraction": best["contraction"],
        "evaluations": evaluations,
        "restarts": len(starts),
    }
    return BoundReport("NIO", best["value"], True, diag)


def _ibd_preconditions(theta: ModelParameters) -> float:
    for name, value in (("alpha", theta.alpha), ("beta", theta.beta)):
        if abs(abs(value) - 1.0) > UNIT_MODULUS_TOL:
            raise NotUnitModulusLoads(
                f"|{name}| = {abs(value):.12g} is not 1 within {UNIT_MODULUS_TOL:g}"
            )
    sigma_max = _spectral_norm(theta.gamma)
    if sigma_max >= 1.0 - CONTRACTIVITY_MARGIN:
        raise NotContractive(
            f"largest singular value of Gamma is {sigma_max:.12g}; "
            "the lossless-network bound needs it strictly below 1"
        )
    return sigma_max


def _ibd_core(theta: ModelParameters):
    sigma_max = _ibd_preconditions(theta)
    n = theta.n_s
    gh = theta.gamma.conj().T
    q = np.eye(n) - gh @ theta.gamma
    q = 0.5 * (q + q.conj().T)
    x0 = np.linalg.solve(q, gh @ theta.b)
    p2 = float((theta.b.conj() @ theta.b).real + (theta.b.conj() @ (theta.gamma @ x0)).real)
    p2 = max(p2, 0.0)
    h_c = complex(theta.h0 + theta.a @ x0)
    return IbdIntermediates(q=q, x0=x0, p2=p2, h_c=h_c), sigma_max


def ibd_bound(theta: ModelParameters):
    """Exact gain bound over all unitary load networks, with intermediates.

    Feasible auxiliary vectors form the ellipsoid
    ``(x - x0)^H Q (x - x0) = p^2`` with ``Q = I - Gamma^H Gamma``; maximizing
    ``|h0 + a^T x|`` over it is a Cauchy-Schwarz computation.  Requires
    unit-modulus loads and strictly contractive ``Gamma``.
    """
    inter, sigma_max = _ibd_core(theta)
    w = np.linalg.solve(inter.q, np.conj(theta.a))
    radius_sq = float((theta.a @ w).real)
    radius_sq = max(radius_sq, 0.0)
    reach = math.sqrt(inter.p2) * math.sqrt(radius_sq)
    value = (abs(inter.h_c) + reach) ** 2
    diag = {
        "sigma_max": sigma_max,
        "p2": inter.p2,
        "h_c": inter.h_c,
        "reach": reach,
    }
    return BoundReport("IBD", value, True, diag), inter


def _orthonormal_completion(u: np.ndarray) -> np.ndarray:
    """Unitary matrix whose first column is the unit vector ``u``."""
    n = u.shape[0]
    q = np.linalg.qr(np.concatenate([u[:, None], np.eye(n, dtype=complex)], axis=1))[0]
    # QR fixes the first column only up to phase; pin it to u exactly.
    return np.concatenate([u[:, None], q[:, 1:n]], axis=1)


def ibd_achiever(theta: ModelParameters) -> np.ndarray:
    """Unitary load network attaining the lossless-network bound.

    Builds the bound-attaining point on the feasibility ellipsoid and maps it
    to a unitary ``Phi`` with ``Phi^H x = z`` (equivalently ``Phi z = x``,
    the two vectors having equal norm) via orthonormal completions of
    ``x/||x||`` and ``z/||z||``.
    """
    inter, _ = _ibd_core(theta)
    n = theta.n_s
    w, v = np.linalg.eigh(inter.q)
    q_isqrt = (v / np.sqrt(np.maximum(w, 1e-14))) @ v.conj().T
    g = q_isqrt @ np.conj(theta.a)
    ng = float(np.linalg.norm(g))
    phase = np.exp(1j * (np.angle(inter.h_c) if inter.h_c != 0 else 0.0))
    if ng > 0.0:
        y = (math.sqrt(inter.p2) / ng) * phase * g
    else:
        # a = 0: every boundary point gives the same |h|; pick an axis.
        y = math.sqrt(inter.p2) * phase * np.eye(n, dtype=complex)[:, 0]
    x = inter.x0 + q_isqrt @ y
    z = theta.b + theta.gamma @ x
    nx = float(np.linalg.norm(x))
    if nx == 0.0:
        warnings.warn(
            "bound-attaining auxiliary vector is zero (b must be zero); "
            "returning the identity network",
            DegenerateAchieverWarning,
        )
        return np.eye(n, dtype=complex)
    qx = _orthonormal_completion(x / nx)
    qz = _orthonormal_completion(z / float(np.linalg.norm(z)))
    return qx @ qz.conj().T
