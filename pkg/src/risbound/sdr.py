"""Semidefinite relaxation of the binary load-selection problem.

The gain maximization over binary configurations is first written as a QCQP
in the auxiliary vector ``x``: the objective ``|h0 + a^T x|^2`` is a
Hermitian quadratic form, and membership of each element's implied reflection
coefficient in ``{alpha, beta}`` is one complex quadratic equality

    conj((G_a x - alpha b)_i) * ((G_b x - beta b)_i) = 0,
    G_a = I - alpha Gamma,  G_b = I - beta Gamma.

Lifting ``M = [x; 1][x; 1]^H`` and dropping the rank-one condition yields a
complex SDP, solved here through a real symmetric embedding.  The optimal
value upper-bounds the exhaustive-search gain; the relaxed solution feeds the
rounding heuristic and the effective-rank diagnostic.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .errors import NumericalFailure, SolverNotConverged, ZeroMatrix
from .gauges import GaugeParameters, apply_gauge
from .model import ModelParameters, encode_loads
from .sdp import ConicProgram, ConicSolution, SolverOptions, solve_sdp

__all__ = [
    "QcqpData",
    "SdpProblem",
    "SdrSolution",
    "build_qcqp",
    "auxiliary_vector",
    "constraint_residuals",
    "g_matrices",
    "build_sdp",
    "embed_hermitian",
    "unembed_hermitian",
    "sdr_bound",
    "effective_rank",
    "gauge_identity_check",
]


@dataclasses.dataclass
class QcqpData:
    """Objective and per-element constraint data of the auxiliary-vector QCQP.

    Objective: ``x^H r0 x + 2 Re(q0^T x) + t0`` equals ``|h0 + a^T x|^2``.
    Constraint i: ``x^H r_i x + q2_i^T x + x^H q1_i + t_i = 0``.
    """

    r0: np.ndarray  # Hermitian PSD (n_s, n_s) = conj(a) a^T
    q0: np.ndarray  # (n_s,) = conj(h0) * a
    t0: float  # |h0|^2
    r: np.ndarray  # (n_s, n_s, n_s), r[i] = conj(g_a[i]) outer g_b[i]
    q1: np.ndarray  # (n_s, n_s), q1[i] = -beta * b_i * conj(g_a[i])
    q2: np.ndarray  # (n_s, n_s), q2[i] = -conj(alpha) * conj(b_i) * g_b[i]
    t: np.ndarray  # (n_s,), t[i] = conj(alpha) * beta * |b_i|^2

    @property
    def n_s(self) -> int:
        return self.q0.shape[0]


def build_qcqp(theta: ModelParameters) -> QcqpData:
    n = theta.n_s
    eye = np.eye(n, dtype=complex)
    g_a = eye - theta.alpha * theta.gamma  # row i is g_{a,i}^T
    g_b = eye - theta.beta * theta.gamma
    r = np.einsum("ij,ik->ijk", np.conj(g_a), g_b)
    q1 = -theta.beta * theta.b[:, None] * np.conj(g_a)
    q2 = -np.conj(theta.alpha) * np.conj(theta.b)[:, None] * g_b
    t = np.conj(theta.alpha) * theta.beta * np.abs(theta.b) ** 2
    return QcqpData(
        r0=np.outer(np.conj(theta.a), theta.a),
        q0=np.conj(theta.h0) * theta.a,
        t0=abs(theta.h0) ** 2,
        r=r,
        q1=q1,
        q2=q2,
        t=t.astype(complex),
    )


def auxiliary_vector(theta: ModelParameters, v) -> np.ndarray:
    """Auxiliary solution ``x = (I - Phi Gamma)^{-1} Phi b`` for a binary v."""
    loads = encode_loads(v, theta.alpha, theta.beta)
    mat = np.eye(theta.n_s, dtype=complex) - loads[:, None] * theta.gamma
    return np.linalg.solve(mat, loads * theta.b)


def constraint_residuals(qcqp: QcqpData, x) -> np.ndarray:
    """Complex residual of each element's quadratic equality at ``x``."""
    x = np.asarray(x, dtype=complex)
    quad = np.einsum("j,ijk,k->i", np.conj(x), qcqp.r, x)
    return quad + qcqp.q2 @ x + qcqp.q1 @ np.conj(x) + qcqp.t


def g_matrices(qcqp: QcqpData):
    """Lifted-space matrices: objective ``g0`` and one ``g[i]`` per element.

    ``tr(g0 M)`` reproduces the objective and ``tr(g[i] M)`` the i-th
    constraint at ``M = [x; 1][x; 1]^H``; ``g0`` is Hermitian, the ``g[i]``
    generally are not.
    """
    n = qcqp.n_s
    g0 = np.zeros((n + 1, n + 1), dtype=complex)
    g0[:n, :n] = qcqp.r0
    g0[:n, n] = np.conj(qcqp.q0)
    g0[n, :n] = qcqp.q0
    g0[n, n] = qcqp.t0
    g = np.zeros((n, n + 1, n + 1), dtype=complex)
    g[:, :n, :n] = qcqp.r
    g[:, :n, n] = qcqp.q1
    g[:, n, :n] = qcqp.q2
    g[:, n, n] = qcqp.t
    return g0, g


def embed_hermitian(h: np.ndarray) -> np.ndarray:
    """Real symmetric embedding ``[[Re H, -Im H], [Im H, Re H]]``."""
    re, im = h.real, h.imag
    return np.block([[re, -im], [im, re]])


def unembed_hermitian(n_mat: np.ndarray, n: int) -> np.ndarray:
    """Hermitian matrix recovered from a real symmetric embedded one.

    Averaging the two real blocks is loss-free: it preserves positive
    semidefiniteness, the embedded objective, and all embedded constraints.
    """
    m = (n_mat[:n, :n] + n_mat[n:, n:]) / 2.0 + 1j * (n_mat[n:, :n] - n_mat[:n, n:]) / 2.0
    return 0.5 * (m + m.conj().T)


@dataclasses.dataclass
class SdpProblem:
    """Real-embedded SDP data plus the complex-side matrices it came from."""

    g0: np.ndarray  # complex Hermitian objective on the lifted variable
    constraints_h: np.ndarray  # Hermitian parts of the g[i]
    constraints_a: np.ndarray  # anti-Hermitian parts (as Hermitian matrices)
    program: ConicProgram  # embedded real problem, ready to solve
    n_complex: int  # lifted complex dimension n_s + 1


def build_sdp(qcqp: QcqpData, options: SolverOptions | None = None) -> SdpProblem:
    """Lift the QCQP: split each complex equality into two Hermitian ones,
    append the corner normalization, and embed everything real-symmetrically.

    The embedding doubles traces (``tr(E(A) E(B)) = 2 tr(A B)``), so every
    embedded matrix carries a factor 1/2 to keep objective and right-hand
    sides in the complex-domain scale.
    """
    n = qcqp.n_s + 1
    g0, g = g_matrices(qcqp)
    herm = 0.5 * (g + g.conj().transpose(0, 2, 1))
    anti = (g - g.conj().transpose(0, 2, 1)) / 2j
    corner = np.zeros((n, n), dtype=complex)
    corner[n - 1, n - 1] = 1.0
    a_stack = np.empty((2 * qcqp.n_s + 1, 2 * n, 2 * n))
    for i in range(qcqp.n_s):
        a_stack[2 * i] = embed_hermitian(herm[i]) / 2.0
        a_stack[2 * i + 1] = embed_hermitian(anti[i]) / 2.0
    a_stack[-1] = embed_hermitian(corner) / 2.0
    b = np.zeros(2 * qcqp.n_s + 1)
    b[-1] = 1.0
    program = ConicProgram(
        embed_hermitian(g0) / 2.0,
        a_stack,
        b,
        options if options is not None else SolverOptions(),
    )
    return SdpProblem(
        g0=g0,
        constraints_h=herm,
        constraints_a=anti,
        program=program,
        n_complex=n,
    )


@dataclasses.dataclass
class SdrSolution:
    bound: float
    x_check: np.ndarray  # relaxed auxiliary vector
    x_mat: np.ndarray  # relaxed Gram block (Hermitian PSD to tolerance)
    effective_rank: float
    certified: bool  # solver met all tolerances
    status: str
    residuals: dict
    iterations: int


def sdr_bound(theta: ModelParameters, options: SolverOptions | None = None) -> SdrSolution:
    """Solve the relaxation and extract the bound and relaxed optimizer.

    A solve that stops at the iteration cap still returns its best iterate,
    flagged ``certified=False``; numerical breakdown (non-finite iterates)
    raises :class:`SolverNotConverged`.
    """
    sdp = build_sdp(build_qcqp(theta), options)
    try:
        sol: ConicSolution = solve_sdp(sdp.program)
    except NumericalFailure as exc:
        raise SolverNotConverged(f"relaxation solve broke down: {exc}") from exc
    n = sdp.n_complex
    m = unembed_hermitian(sol.m_matrix, n)
    x_mat = m[: n - 1, : n - 1]
    x_check = m[: n - 1, n - 1].copy()
    return SdrSolution(
        bound=float(sol.objective),
        x_check=x_check,
        x_mat=x_mat,
        effective_rank=effective_rank(x_mat),
        certified=sol.status == "Optimal",
        status=sol.status,
        residuals=sol.residuals,
        iterations=sol.iterations,
    )


def effective_rank(x_mat: np.ndarray) -> float:
    """``exp`` of the spectral Shannon entropy; 1 for rank one, n for identity."""
    w = np.linalg.eigvalsh(0.5 * (x_mat + x_mat.conj().T)).real
    w = np.maximum(w, 0.0)
    total = float(w.sum())
    if total == 0.0:
        raise ZeroMatrix("effective rank of the zero matrix is undefined")
    p = w[w > 0.0] / total
    return float(np.exp(-np.sum(p * np.log(p))))


def _gauge_transfer(theta: ModelParameters, phi: GaugeParameters):
    """Active stage name, transfer matrix T and per-element multipliers eta.

    At most one stage of ``phi`` may differ from the identity; T maps lifted
    vectors ``[x; 1]`` of the original model to those of the reparametrized
    one, and ``eta[i]`` rescales the i-th constraint matrix.
    """
    n = theta.n_s
    d_active = not np.allclose(phi.d, 1.0)
    c_active = phi.c != 1.0
    m_active = phi.m != 0.0
    if sum((d_active, c_active, m_active)) > 1:
        raise ValueError("at most one reparametrization stage may be active")
    t = np.eye(n + 1, dtype=complex)
    if not (d_active or c_active or m_active):
        return "identity", t, np.ones(n, dtype=complex)
    if d_active:
        t[:n, :n] = np.diag(phi.d)
        eta = np.abs(phi.d) ** 2
        return "diagonal-similarity", t, eta.astype(complex)
    if c_active:
        t[:n, :n] = phi.c * np.eye(n)
        eta = np.full(n, abs(phi.c) ** 2, dtype=complex)
        return "complex-scaling", t, eta
    m = phi.m
    k = np.sqrt(1.0 - abs(m) ** 2)
    t[:n, :n] = (np.eye(n) - m * theta.gamma) / k
    t[:n, n] = -m * theta.b / k
    factor = np.conj(k / (1.0 - np.conj(m) * theta.alpha)) * (
        k / (1.0 - np.conj(m) * theta.beta)
    )
    eta = np.full(n, factor, dtype=complex)
    return "moebius", t, eta


def gauge_identity_check(theta: ModelParameters, phi: GaugeParameters, seed: int = 0) -> dict:
    """Residuals of the constraint-matrix transfer identities under ``phi``.

    Checks ``g_i(theta~) = eta_i T^{-H} g_i(theta) T^{-1}`` for every
    element, the same identity with ``eta = 1`` for the objective matrix, and
    the trace form ``tr(g_i(theta~) T M T^H) = eta_i tr(g_i(theta) M)`` on a
    random Hermitian probe.  All residuals are relative Frobenius norms.
    """
    name, t, eta = _gauge_transfer(theta, phi)
    gauged = apply_gauge(theta, phi)
    g0_old, g_old = g_matrices(build_qcqp(theta))
    g0_new, g_new = g_matrices(build_qcqp(gauged))
    t_inv = np.linalg.inv(t)

    def transported(mat):
        return t_inv.conj().T @ mat @ t_inv

    def rel(err, ref):
        return float(np.linalg.norm(err) / max(np.linalg.norm(ref), 1e-300))

    g0_residual = rel(g0_new - transported(g0_old), g0_new)
    gi_residuals = np.array(
        [rel(g_new[i] - eta[i] * transported(g_old[i]), g_new[i]) for i in range(theta.n_s)]
    )
    rng = np.random.default_rng(seed)
    probe = rng.standard_normal((theta.n_s + 1,) * 2) + 1j * rng.standard_normal(
        (theta.n_s + 1,) * 2
    )
    probe = 0.5 * (probe + probe.conj().T)
    probe_new = t @ probe @ t.conj().T
    trace_residuals = np.array(
        [
            abs(np.trace(g_new[i] @ probe_new) - eta[i] * np.trace(g_old[i] @ probe))
            / max(abs(np.trace(g_old[i] @ probe)), 1.0)
            for i in range(theta.n_s)
        ]
    )
    return {
        "gauge": name,
        "eta": eta,
        "g0_residual": g0_residual,
        "gi_residuals": gi_residuals,
        "trace_residuals": trace_residuals,
    }
