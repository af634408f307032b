"""Reparametrizations that leave every realizable channel value unchanged.

Three families are supported and composed in a fixed order:

1. diagonal similarity  ``d``   (per-element rescaling of the scatterer ports),
2. complex scaling      ``c``   (moves magnitude between loads and couplings),
3. disc automorphism    ``m``   (a Moebius map of the load plane, |m| < 1).

Each stage maps a model onto an operationally equivalent one: the channel of
every control vector is preserved, while the parameters (and therefore any
parameter-dependent bound) change.
"""

from __future__ import annotations

import cmath
import dataclasses

import numpy as np
import scipy.linalg as sla

from .errors import (
    ForbiddenPole,
    GaugeError,
    IllConditionedMobius,
    NonContractiveM,
    ZeroGaugeEntry,
)
from .model import ModelParameters

__all__ = [
    "GaugeParameters",
    "GaugeDiagnostics",
    "apply_diagonal_similarity",
    "apply_complex_scaling",
    "apply_mobius",
    "apply_gauge",
    "gauge_admissible",
    "random_admissible_gauge",
]

#: Condition-number cap for the disc-automorphism system I - m*Gamma.
MOBIUS_COND_CAP = 1e10


@dataclasses.dataclass(frozen=True)
class GaugeParameters:
    """One composite reparametrization: diagonal ``d``, scale ``c``, shift ``m``."""

    d: np.ndarray
    c: complex
    m: complex

    def __post_init__(self):
        d = np.asarray(self.d, dtype=np.complex128).copy()
        if d.ndim != 1:
            raise ValueError("d must be a 1-d array")
        d.flags.writeable = False
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "c", complex(self.c))
        object.__setattr__(self, "m", complex(self.m))

    @classmethod
    def identity(cls, n_s: int) -> "GaugeParameters":
        return cls(d=np.ones(n_s, dtype=np.complex128), c=1.0 + 0j, m=0.0 + 0j)


def apply_diagonal_similarity(theta: ModelParameters, d) -> ModelParameters:
    """Rescale scatterer port i by d_i: a <- a/d, b <- d b, gamma <- D gamma D^-1."""
    d = np.asarray(d, dtype=np.complex128)
    if d.shape != (theta.n_s,):
        raise ValueError(f"d must have shape ({theta.n_s},)")
    if np.any(d == 0):
        raise ZeroGaugeEntry("diagonal similarity requires all d_i != 0")
    return ModelParameters(
        alpha=theta.alpha,
        beta=theta.beta,
        h0=theta.h0,
        a=theta.a / d,
        b=d * theta.b,
        gamma=(d[:, None] * theta.gamma) / d[None, :],
    )


def apply_complex_scaling(theta: ModelParameters, c) -> ModelParameters:
    """Move a common factor c onto the loads: loads <- c*loads, a <- a/c, gamma <- gamma/c."""
    c = complex(c)
    if c == 0:
        raise ZeroGaugeEntry("complex scaling requires c != 0")
    return ModelParameters(
        alpha=c * theta.alpha,
        beta=c * theta.beta,
        h0=theta.h0,
        a=theta.a / c,
        b=theta.b,
        gamma=theta.gamma / c,
    )


def _mobius_load(rho: complex, m: complex) -> complex:
    return (rho - m) / (1.0 - m.conjugate() * rho)


def apply_mobius(theta: ModelParameters, m) -> ModelParameters:
    """Shift the load plane by the disc automorphism rho -> (rho - m)/(1 - conj(m) rho).

    Requires |m| < 1, load values away from the pole 1/conj(m), and a
    well-conditioned I - m gamma.
    """
    m = complex(m)
    if abs(m) >= 1:
        raise NonContractiveM(f"|m| = {abs(m):.6g} must be < 1")
    for name in ("alpha", "beta"):
        rho = getattr(theta, name)
        denom = 1.0 - m.conjugate() * rho
        if abs(denom) <= 1e-12 * (1.0 + abs(m) * abs(rho)):
            raise ForbiddenPole(f"{name} lies at the automorphism pole 1/conj(m)")
    n = theta.n_s
    A = np.eye(n, dtype=np.complex128) - m * theta.gamma
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > MOBIUS_COND_CAP:
        raise IllConditionedMobius(f"cond(I - m gamma) = {cond:.3e} exceeds cap")
    k = np.sqrt(1.0 - abs(m) ** 2)
    # F = (I - m gamma)^{-1}; all uses are solves against A or A^T.
    fb = sla.solve(A, theta.b)
    fa = sla.solve(A.T, theta.a)  # F^T a, i.e. a^T F as a column
    gshift = theta.gamma - m.conjugate() * np.eye(n, dtype=np.complex128)
    gamma_new = sla.solve(A.T, gshift.T).T  # (gamma - conj(m) I) F
    return ModelParameters(
        alpha=_mobius_load(theta.alpha, m),
        beta=_mobius_load(theta.beta, m),
        h0=theta.h0 + m * (theta.a @ fb),
        a=k * fa,
        b=k * fb,
        gamma=gamma_new,
    )


_STAGES = (
    ("diagonal-similarity", lambda th, g: apply_diagonal_similarity(th, g.d)),
    ("complex-scaling", lambda th, g: apply_complex_scaling(th, g.c)),
    ("mobius", lambda th, g: apply_mobius(th, g.m)),
)


def apply_gauge(theta: ModelParameters, phi: GaugeParameters) -> ModelParameters:
    """Apply the composite reparametrization, diagonal -> scaling -> automorphism.

    Admissibility of each stage is checked on that stage's input (the output
    of the previous one).  Stage errors propagate with the failing stage named
    in the message.
    """
    if phi.d.shape != (theta.n_s,):
        raise ValueError(f"gauge dimension {phi.d.shape[0]} != n_s {theta.n_s}")
    for name, fn in _STAGES:
        try:
            theta = fn(theta, phi)
        except GaugeError as exc:
            raise type(exc)(f"{name} stage: {exc}") from exc
    return theta


@dataclasses.dataclass(frozen=True)
class GaugeDiagnostics:
    """Outcome of the stage-wise admissibility checks (no exceptions raised)."""

    ok: bool
    failed: tuple
    d_nonzero: bool
    c_nonzero: bool
    m_contractive: bool
    pole_alpha_ok: bool
    pole_beta_ok: bool
    mobius_condition: float
    notes: tuple


def gauge_admissible(theta: ModelParameters, phi: GaugeParameters) -> GaugeDiagnostics:
    """Evaluate every admissibility condition stage by stage, without raising.

    Later stages are checked on the output of earlier ones, so e.g. the pole
    conditions are evaluated on the rescaled loads ``c*alpha``/``c*beta``.
    Checks that cannot be reached (because an earlier stage already failed)
    are reported as passed-vacuously with a note.
    """
    failed = []
    notes = []
    d_nonzero = not np.any(phi.d == 0)
    if not d_nonzero:
        failed.append("ZeroGaugeEntry")
    c_nonzero = phi.c != 0
    if not c_nonzero:
        failed.append("ZeroGaugeEntry")
    m_contractive = abs(phi.m) < 1
    if not m_contractive:
        failed.append("NonContractiveM")
    pole_alpha_ok = pole_beta_ok = True
    mobius_condition = float("nan")
    if d_nonzero and c_nonzero:
        staged = apply_diagonal_similarity(theta, phi.d)
        staged = apply_complex_scaling(staged, phi.c)
        for name, flag in (("alpha", True), ("beta", False)):
            rho = getattr(staged, name)
            denom = 1.0 - phi.m.conjugate() * rho
            ok = abs(denom) > 1e-12 * (1.0 + abs(phi.m) * abs(rho))
            if flag:
                pole_alpha_ok = ok
            else:
                pole_beta_ok = ok
            if not ok:
                failed.append("ForbiddenPole")
        A = np.eye(theta.n_s, dtype=np.complex128) - phi.m * staged.gamma
        mobius_condition = float(np.linalg.cond(A))
        if not np.isfinite(mobius_condition) or mobius_condition > MOBIUS_COND_CAP:
            failed.append("IllConditionedMobius")
    else:
        notes.append("automorphism checks skipped: earlier stage inadmissible")
    return GaugeDiagnostics(
        ok=not failed,
        failed=tuple(failed),
        d_nonzero=d_nonzero,
        c_nonzero=c_nonzero,
        m_contractive=m_contractive,
        pole_alpha_ok=pole_alpha_ok,
        pole_beta_ok=pole_beta_ok,
        mobius_condition=mobius_condition,
        notes=tuple(notes),
    )


def random_admissible_gauge(theta: ModelParameters, rng, scale=0.25) -> GaugeParameters:
    """Draw a random gauge near the identity, rejecting inadmissible draws."""
    for _ in range(64):
        d = 1.0 + scale * (rng.standard_normal(theta.n_s) + 1j * rng.standard_normal(theta.n_s))
        c = cmath.exp(1j * rng.uniform(0, 2 * np.pi)) * (1.0 + scale * rng.uniform(-0.5, 0.5))
        radius = scale * rng.uniform(0, 1)
        m = radius * cmath.exp(1j * rng.uniform(0, 2 * np.pi))
        phi = GaugeParameters(d=d, c=c, m=m)
        if gauge_admissible(theta, phi).ok:
            return phi
    raise GaugeError("could not draw an admissible gauge in 64 attempts")
