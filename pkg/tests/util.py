"""Independent oracles used by the tests.

Everything here is deliberately written against the mathematical definitions
(dense inverses, explicit enumeration, planted primal/dual pairs) rather
than reusing the package's optimized code paths, so agreement is evidence.
"""

import itertools

import numpy as np

from risbound.sdp import ConicProgram


def naive_channel(theta, v):
    """h(v) from the defining formula with an explicit dense inverse."""
    r = np.where(np.asarray(v, dtype=bool), theta.beta, theta.alpha)
    res = np.linalg.inv(np.eye(theta.n_s) - np.diag(r) @ theta.gamma)
    return theta.h0 + theta.a @ res @ (r * theta.b)


def naive_es(theta):
    """First-maximum exhaustive search by direct per-configuration solves."""
    best_v, best_gain = None, -np.inf
    for bits in itertools.product((0, 1), repeat=theta.n_s):
        gain = abs(naive_channel(theta, bits)) ** 2
        if gain > best_gain:
            best_v, best_gain = np.array(bits, dtype=np.uint8), gain
    return best_v, best_gain


def _random_symmetric(rng, n):
    s = rng.standard_normal((n, n))
    return 0.5 * (s + s.T)


def planted_sdp_literal(n, m, seed):
    """Instance whose objective is constant on the feasible set.

    With C = sum_k y_k A_k the dual slack is exactly zero, so every feasible
    M attains tr(C M) = b @ y; returns (program, optimal value, witness M*).
    """
    rng = np.random.default_rng(seed)
    q = np.linalg.qr(rng.standard_normal((n, n)))[0]
    m_star = (q * rng.uniform(0.5, 2.0, size=n)) @ q.T
    m_star = 0.5 * (m_star + m_star.T)
    a = np.stack([np.eye(n)] + [_random_symmetric(rng, n) for _ in range(m - 1)])
    b = np.einsum("kij,ij->k", a, m_star)
    y = rng.standard_normal(m)
    c = np.einsum("k,kij->ij", y, a)
    return ConicProgram(c=c, a=a, b=b), float(b @ y), m_star


def planted_sdp_strict(n, m, r, seed):
    """Strictly complementary pair: rank-r optimum, rank-(n-r) dual slack.

    M* = V V^T and S* = W W^T with V ⟂ W, C = sum_k y_k A_k - S*; then
    (M*, y, S*) satisfies the KKT system and tr(C M*) = b @ y.
    """
    rng = np.random.default_rng(seed)
    q = np.linalg.qr(rng.standard_normal((n, n)))[0]
    v = q[:, :r] * np.sqrt(rng.uniform(0.5, 2.0, size=r))
    w = q[:, r:] * np.sqrt(rng.uniform(0.5, 2.0, size=n - r))
    m_star = v @ v.T
    s_star = w @ w.T
    a = np.stack([np.eye(n)] + [_random_symmetric(rng, n) for _ in range(m - 1)])
    b = np.einsum("kij,ij->k", a, m_star)
    y = rng.standard_normal(m)
    c = np.einsum("k,kij->ij", y, a) - s_star
    return ConicProgram(c=c, a=a, b=b), float(b @ y), m_star


def toy_model(**overrides):
    """Single-element short/open model h(r) = h0 + a r b / (1 - r g)."""
    from risbound import ModelParameters

    fields = dict(alpha=-1.0, beta=1.0, h0=0.0, a=[1.0], b=[1.0], gamma=[[0.0]])
    fields.update(overrides)
    return ModelParameters(**fields)


def random_model(n, seed, loads=(-1.0, 1.0), gamma_scale=0.3, h0_scale=0.3):
    """Ad-hoc dense random model (not necessarily passive)."""
    rng = np.random.default_rng(seed)

    def cplx(*shape):
        return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)

    from risbound import ModelParameters

    gamma = gamma_scale * cplx(n, n) / np.sqrt(n)
    sv = np.linalg.svd(gamma, compute_uv=False)[0]
    if sv >= 0.95:
        gamma *= 0.9 / sv
    return ModelParameters(
        alpha=loads[0],
        beta=loads[1],
        h0=h0_scale * complex(cplx()),
        a=cplx(n),
        b=cplx(n),
        gamma=gamma,
    )
