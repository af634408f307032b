"""Small dense semidefinite-programming solver (equality form, maximization).

Solves
    maximize    tr(C M)
    subject to  tr(A_k M) = b_k,   k = 1..m,
                M >= 0  (symmetric PSD),

by operator splitting (ADMM) between the affine subspace and the PSD cone,
with over-relaxation, norm equilibration of the constraint data, and a
rank-restricted polish step that solves the KKT system on the active
eigenspace to reach tight tolerances early.

All data are real symmetric; complex problems are handled upstream through a
real embedding.  The solver is deterministic.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .errors import NumericalFailure

__all__ = ["SolverOptions", "ConicProgram", "ConicSolution", "solve_sdp", "psd_project"]


@dataclasses.dataclass
class SolverOptions:
    eps_abs: float = 1e-8
    eps_rel: float = 1e-7
    max_iters: int = 50000
    rho: float = 1.0
    over_relax: float = 1.5
    check_every: int = 25
    adaptive_rho: bool = True
    polish: bool = True
    rank_tol: float = 1e-6


@dataclasses.dataclass
class ConicProgram:
    """Problem data: objective ``c``, constraint matrices ``a`` (m, n, n), rhs ``b``."""

    c: np.ndarray
    a: np.ndarray
    b: np.ndarray
    options: SolverOptions = dataclasses.field(default_factory=SolverOptions)

    def __post_init__(self):
        self.c = np.ascontiguousarray(self.c, dtype=np.float64)
        self.a = np.ascontiguousarray(self.a, dtype=np.float64)
        self.b = np.ascontiguousarray(self.b, dtype=np.float64)
        n = self.c.shape[0]
        if self.c.shape != (n, n):
            raise ValueError("objective must be square")
        if self.a.ndim != 3 or self.a.shape[1:] != (n, n):
            raise ValueError("constraint stack must have shape (m, n, n)")
        if self.b.shape != (self.a.shape[0],):
            raise ValueError("rhs length must match the constraint count")
        for name, mats in (("objective", self.c[None]), ("constraint", self.a)):
            sym_err = np.abs(mats - mats.transpose(0, 2, 1)).max() if mats.size else 0.0
            scale = max(1.0, np.abs(mats).max() if mats.size else 0.0)
            if sym_err > 1e-14 * scale:
                raise ValueError(f"{name} matrices must be symmetric (err={sym_err:.2e})")

    @property
    def dim(self) -> int:
        return self.c.shape[0]


@dataclasses.dataclass
class ConicSolution:
    m_matrix: np.ndarray
    objective: float
    y: np.ndarray
    residuals: dict
    status: str
    iterations: int


def psd_project(s) -> np.ndarray:
    """Nearest (Frobenius) PSD matrix: symmetrize, clamp negative eigenvalues."""
    s = np.asarray(s, dtype=np.float64)
    s = 0.5 * (s + s.T)
    w, v = np.linalg.eigh(s)
    if w[0] >= 0.0:
        return s
    w = np.maximum(w, 0.0)
    out = (v * w) @ v.T
    return 0.5 * (out + out.T)


def _svec_factory(r):
    iu = np.triu_indices(r)
    w = np.where(iu[0] == iu[1], 1.0, np.sqrt(2.0))

    def svec(S):
        return S[iu] * w

    def unsvec(x):
        S = np.zeros((r, r))
        S[iu] = x / w
        S = S + S.T
        S[np.diag_indices(r)] *= 0.5
        return S

    return svec, unsvec


def _residuals(prog: ConicProgram, M, y):
    """All convergence metrics, in the original (unscaled) problem data."""
    eq = np.einsum("kij,ij->k", prog.a, M) - prog.b
    eq_inf = float(np.abs(eq).max()) if eq.size else 0.0
    pobj = float(np.sum(prog.c * M))
    dobj = float(prog.b @ y)
    gap = abs(pobj - dobj)
    S = np.einsum("k,kij->ij", y, prog.a) - prog.c
    w_s = np.linalg.eigvalsh(0.5 * (S + S.T))
    w_m = np.linalg.eigvalsh(0.5 * (M + M.T))
    dual_inf = float(max(0.0, -w_s[0]))
    min_eig = float(w_m[0])
    return {
        "objective": pobj,
        "dual_objective": dobj,
        "duality_gap": gap,
        "equality": eq_inf,
        "min_eigenvalue": min_eig,
        "primal_infeasibility": max(eq_inf, max(0.0, -min_eig)),
        "dual_infeasibility": dual_inf,
        "trace": float(np.trace(M)),
    }


def _converged(res, opts, c_norm):
    eps_gap = opts.eps_abs + opts.eps_rel * abs(res["objective"])
    eps_dual = 10.0 * opts.eps_abs * max(1.0, c_norm)
    # The dual objective only certifies up to dual_inf * tr(M), so fold that
    # slack into the gap test.
    gap_cert = res["duality_gap"] + res["dual_infeasibility"] * max(res["trace"], 0.0)
    return (
        res["equality"] <= opts.eps_abs
        and res["min_eigenvalue"] >= -opts.eps_abs
        and gap_cert <= eps_gap
        and res["dual_infeasibility"] <= eps_dual
    )


def _rank_cuts(w, rank_tol):
    """Candidate active-space sizes: the tolerance cut plus big spectral gaps."""
    wd = w[::-1]
    wmax = max(wd[0], 0.0)
    if wmax <= 0.0:
        return [1]
    r_max = int(np.sum(wd > max(wmax * 1e-9, 1e-14)))
    cuts = {int(np.sum(wd > wmax * rank_tol))}
    for i in range(1, r_max):
        if wd[i] < 1e-2 * wd[i - 1]:
            cuts.add(i)
    cuts.add(r_max)
    cuts.discard(0)
    return sorted(cuts)[:5]


def _polish_candidates(prog: ConicProgram, Z, y_est, rank_tol, rounds=16, budget=None):
    """KKT refinements restricted to candidate active eigenspaces of ``Z``.

    For each candidate rank r the full KKT system

        tr(A_k U T U^T) = b_k,   (sum_k y_k A_k - C) U = 0,

    is solved by Gauss-Newton jointly in the face-restricted primal block T,
    the multipliers y and a perturbation U <- orth(U + U_perp K) of the face.
    Near a strictly complementary solution this converges quadratically.
    Yields (M, y) candidates; the caller accepts one only if the full
    residual check passes.

    ``budget``, when given, is a single-element list holding a flop allowance
    that each Gauss-Newton least-squares round draws down; refinement stops
    once it is exhausted (a deterministic cost cap, unlike wall time).
    """
    n = prog.dim
    m = prog.a.shape[0]
    w, v = np.linalg.eigh(0.5 * (Z + Z.T))
    eye_full = np.eye(n)

    def charge(flops):
        if budget is None:
            return True
        budget[0] -= flops
        return budget[0] > 0.0

    def kkt_state(U, theta, y):
        M = U @ theta @ U.T
        M = 0.5 * (M + M.T)
        S = np.einsum("k,kij->ij", y, prog.a) - prog.c
        S = 0.5 * (S + S.T)
        f1 = np.einsum("kij,ij->k", prog.a, M) - prog.b
        f2 = S @ U
        res = float(np.sqrt(np.linalg.norm(f1) ** 2 + np.linalg.norm(f2) ** 2))
        return M, S, f1, f2, res

    for r in _rank_cuts(w, rank_tol):
        dim_s = r * (r + 1) // 2
        n_cols = dim_s + m + (n - r) * r
        round_cost = float(m + n * r) * n_cols**2
        if not charge(float(n * r) * m**2 + round_cost):
            return
        U = v[:, ::-1][:, :r]
        svec, unsvec = _svec_factory(r)
        AU = prog.a @ U  # (m, n, r)
        jac_y = AU.reshape(m, n * r).T
        P = np.array([svec(0.5 * (U.T @ auk + auk.T @ U)) for auk in AU])
        y, *_ = np.linalg.lstsq(jac_y, (prog.c @ U).ravel(), rcond=None)
        th_s = svec(U.T @ Z @ U)
        corr, *_ = np.linalg.lstsq(P, prog.b - P @ th_s, rcond=None)
        theta = unsvec(th_s + corr)
        if not (np.isfinite(theta).all() and np.isfinite(y).all()):
            continue
        M, S, f1, f2, res_norm = kkt_state(U, theta, y)
        for round_idx in range(rounds):
            tw, tv = np.linalg.eigh(theta)
            th_pos = (tv * np.maximum(tw, 0.0)) @ tv.T
            Mc = U @ th_pos @ U.T
            yield 0.5 * (Mc + Mc.T), y.copy()
            scale = max(1.0, float(np.linalg.norm(S)), float(np.linalg.norm(M)))
            if not np.isfinite(res_norm) or res_norm <= 1e-14 * scale:
                break
            if round_idx > 0 and not charge(round_cost):
                return
            u_perp = np.linalg.qr(np.hstack([U, eye_full]), mode="reduced")[0][:, r:n]
            # d f1 / dK: 2 (U_perp^T A_k U theta), raveled row-major over (q, j).
            t_k = np.einsum("pq,kpr,rs->kqs", u_perp, AU, theta)
            j1k = 2.0 * t_k.reshape(m, (n - r) * r)
            j2k = np.kron(S @ u_perp, np.eye(r))
            top = np.hstack([P, np.zeros((m, m)), j1k])
            bot = np.hstack([np.zeros((n * r, dim_s)), jac_y, j2k])
            # Degenerate faces make this Jacobian rank-deficient (the real
            # embedding alone contributes an exact rotational null direction),
            # so truncate instead of letting near-null directions blow up.
            step, *_ = np.linalg.lstsq(
                np.vstack([top, bot]),
                -np.concatenate([f1, f2.ravel()]),
                rcond=1e-12,
            )
            if not np.isfinite(step).all():
                break
            d_th = unsvec(step[:dim_s])
            d_y = step[dim_s : dim_s + m]
            dK = step[dim_s + m :].reshape(n - r, r)
            accepted = False
            for t in (1.0, 0.5, 0.25, 0.125):
                u_new, r_rot = np.linalg.qr(U + t * (u_perp @ dK), mode="reduced")
                # Re-express theta in the rotated basis: U theta U^T is kept.
                th_new = r_rot @ (theta + t * d_th) @ r_rot.T
                th_new = 0.5 * (th_new + th_new.T)
                y_new = y + t * d_y
                M2, S2, f1_2, f2_2, res2 = kkt_state(u_new, th_new, y_new)
                if np.isfinite(res2) and res2 < res_norm:
                    U, theta, y = u_new, th_new, y_new
                    M, S, f1, f2, res_norm = M2, S2, f1_2, f2_2, res2
                    AU = prog.a @ U
                    jac_y = AU.reshape(m, n * r).T
                    P = np.array([svec(0.5 * (U.T @ auk + auk.T @ U)) for auk in AU])
                    accepted = True
                    break
            if not accepted:
                break


def solve_sdp(prog: ConicProgram) -> ConicSolution:
    """Run the splitting iteration until the tolerance targets are met.

    Returns status ``"Optimal"`` when the equality, cone and gap conditions
    all hold, ``"MaxIters"`` otherwise (with the best iterate seen).  Raises
    :class:`NumericalFailure` if non-finite values appear.
    """
    opts = prog.options
    n = prog.dim
    m = prog.a.shape[0]
    c_norm = float(np.linalg.norm(prog.c))

    # Equilibrate: unit Frobenius norm per constraint and for the objective.
    s_k = np.maximum(np.linalg.norm(prog.a.reshape(m, -1), axis=1), 1e-12)
    As = prog.a / s_k[:, None, None]
    bs = prog.b / s_k
    c_scale = max(c_norm, 1e-12)
    Cs = prog.c / c_scale

    Amat = As.reshape(m, n * n)
    G = Amat @ Amat.T
    gw, gv = np.linalg.eigh(G)
    keep = gw > max(gw[-1] if m else 0.0, 1.0) * 1e-13
    gv_k = gv[:, keep]
    gw_k = gw[keep]

    def gram_solve(r):
        return gv_k @ ((gv_k.T @ r) / gw_k)

    rho = opts.rho
    sigma = opts.over_relax
    Z = np.zeros((n, n))
    U = np.zeros((n, n))
    best = None
    last_polish = -10**9
    polish_gap0 = 4 * opts.check_every
    polish_gap = polish_gap0
    eq_at_last_polish = np.inf
    # Polish may spend at most this multiple of the (estimated) splitting
    # work done so far; a flop-style count keeps the cap deterministic.
    admm_round_work = 30.0 * float(n) ** 3
    polish_spent = 0.0
    it = 0

    def candidate_metrics(Mc, nu):
        y = (rho * nu) * (c_scale / s_k)
        res = _residuals(prog, Mc, y)
        return y, res

    while it < opts.max_iters:
        V0 = Z - U + Cs / rho
        nu = gram_solve(Amat @ V0.ravel() - bs)
        M = V0 - (Amat.T @ nu).reshape(n, n)
        Mhat = sigma * M + (1.0 - sigma) * Z
        Z_new = psd_project(Mhat + U)
        U = U + Mhat - Z_new
        r_cons = float(np.linalg.norm(M - Z_new))
        r_dual = float(rho * np.linalg.norm(Z_new - Z))
        Z = Z_new
        it += 1

        if it % opts.check_every == 0 or it == opts.max_iters:
            if not (np.isfinite(Z).all() and np.isfinite(U).all()):
                raise NumericalFailure(f"non-finite iterate at iteration {it}")
            y, res = candidate_metrics(Z, nu)
            score = max(
                res["equality"],
                res["dual_infeasibility"],
                res["duality_gap"] / (1.0 + abs(res["objective"])),
            )
            if best is None or score < best[0]:
                best = (score, Z.copy(), y.copy(), res)
            if _converged(res, opts, c_norm):
                return ConicSolution(Z, res["objective"], y, res, "Optimal", it)
            # Failed polishes back off exponentially; a decade of equality
            # improvement re-arms them early.
            due = it - last_polish >= polish_gap or (
                it - last_polish >= polish_gap0 and res["equality"] <= 0.1 * eq_at_last_polish
            )
            want_polish = (
                opts.polish
                and due
                and res["equality"] <= 1e-3 * (1.0 + float(np.abs(prog.b).max(initial=0.0)))
                and r_cons <= 1e-2 * (1.0 + float(np.linalg.norm(Z)))
            )
            if want_polish:
                last_polish = it
                eq_at_last_polish = res["equality"]
                polish_won = False
                # Generous early (most instances polish out within a few
                # hundred iterations), frugal on long slogs where repeated
                # full-rank refinements would otherwise dominate runtime.
                earned = 6.0 * min(it, 600) + 1.0 * max(it - 600, 0)
                allowance = max(
                    admm_round_work * earned - polish_spent,
                    admm_round_work * opts.check_every,
                )
                pool = [allowance]
                for Mp, yp in _polish_candidates(prog, Z, y, opts.rank_tol, budget=pool):
                    if not (np.isfinite(Mp).all() and np.isfinite(yp).all()):
                        continue
                    res_p = _residuals(prog, Mp, yp)
                    if _converged(res_p, opts, c_norm):
                        return ConicSolution(Mp, res_p["objective"], yp, res_p, "Optimal", it)
                    score_p = max(
                        res_p["equality"],
                        res_p["dual_infeasibility"],
                        res_p["duality_gap"] / (1.0 + abs(res_p["objective"])),
                    )
                    if res_p["min_eigenvalue"] >= -opts.eps_abs and score_p < best[0]:
                        best = (score_p, Mp, yp, res_p)
                        polish_won = True
                polish_spent += allowance - pool[0]
                polish_gap = polish_gap0 if polish_won else min(2 * polish_gap, 64 * polish_gap0)
            if opts.adaptive_rho and it < opts.max_iters and r_dual > 0.0 and r_cons > 0.0:
                factor = np.sqrt(r_cons / r_dual)
                if factor > 5.0 or factor < 0.2:
                    factor = float(np.clip(factor, 0.1, 10.0))
                    new_rho = float(np.clip(rho * factor, 1e-6, 1e6))
                    # U is the rho-scaled multiplier, so rescale it with rho.
                    U *= rho / new_rho
                    rho = new_rho

    _, Mb, yb, resb = best
    return ConicSolution(Mb, resb["objective"], yb, resb, "MaxIters", it)
