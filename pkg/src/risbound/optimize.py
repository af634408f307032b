"""Discrete configuration optimizers: exhaustive, local, genetic, rounding.

All of them return an :class:`OptimizerResult` whose ``gain`` is re-evaluated
through the exact dense solve at the reported configuration, so a result can
never silently drift from the incremental arithmetic that found it.
"""

from __future__ import annotations

import dataclasses
import warnings

import numpy as np

from ._es import gain_table
from .errors import DegenerateDenominatorWarning, SingularUpdate, TooLarge
from .model import (
    ModelParameters,
    channel_gain,
    channel_gain_batch,
    encode_loads,
    prepare_baseline,
    woodbury_channel,
)

__all__ = [
    "OptimizerResult",
    "GaParams",
    "exhaustive_search",
    "coordinate_descent",
    "genetic_algorithm",
    "project_sdr",
]

ES_DEFAULT_CAP = 24


@dataclasses.dataclass
class OptimizerResult:
    v: np.ndarray  # binary control vector
    gain: float  # |h(v)|^2, re-evaluated exactly
    evaluations: int
    trace: list | None = None  # best gain after each sweep/generation
    rng_seed: int | None = None


def _exact_gain(theta: ModelParameters, v: np.ndarray) -> float:
    return abs(channel_gain(theta, encode_loads(v, theta.alpha, theta.beta))) ** 2


def _bits_of(index: int, n: int) -> np.ndarray:
    return ((index >> (n - 1 - np.arange(n))) & 1).astype(np.uint8)


def exhaustive_search(theta: ModelParameters, cap: int = ES_DEFAULT_CAP) -> OptimizerResult:
    """Global argmax over all ``2**n_s`` configurations.

    Enumerates through the dense gain table (compiled Gray-code kernel or the
    batched numpy fallback); ties break toward the lexicographically smallest
    control vector because the table is indexed by big-endian ``v``.
    """
    n = theta.n_s
    if n > cap:
        raise TooLarge(f"exhaustive search over 2^{n} configurations exceeds cap {cap}")
    gains = gain_table(theta)
    finite = np.isfinite(gains)
    if not finite.all():
        gains = np.where(finite, gains, -np.inf)
    best = int(np.argmax(gains))
    v = _bits_of(best, n)
    return OptimizerResult(v=v, gain=_exact_gain(theta, v), evaluations=1 << n)


def _flip_gain(theta, base, v, i, direct_fallbacks):
    """Gain after flipping bit ``i`` from the baseline at ``v``."""
    try:
        return abs(woodbury_channel(base, [i])) ** 2
    except SingularUpdate:
        direct_fallbacks.append(i)
        w = v.copy()
        w[i] ^= 1
        return _exact_gain(theta, w)


def coordinate_descent(theta: ModelParameters, seed: int = 0) -> OptimizerResult:
    """Single-bit local search from the best of 100 random configurations.

    Sweeps elements in ascending order, re-basing the incremental
    factorization after each accepted flip; stops once ``n_s`` consecutive
    flip attempts fail to improve, which makes the result 1-flip optimal.
    """
    n = theta.n_s
    rng = np.random.default_rng(seed)
    pool = rng.integers(0, 2, size=(100, n)).astype(np.uint8)
    pool_gains = np.abs(channel_gain_batch(theta, pool)) ** 2
    pool_gains = np.where(np.isfinite(pool_gains), pool_gains, -np.inf)
    start = int(np.argmax(pool_gains))
    v = pool[start].copy()
    gain = _exact_gain(theta, v)
    evaluations = pool.shape[0]
    trace = [gain]
    base = prepare_baseline(theta, v)
    stale = 0
    i = 0
    fallbacks: list[int] = []
    while stale < n:
        candidate = _flip_gain(theta, base, v, i, fallbacks)
        evaluations += 1
        if candidate > gain:
            v[i] ^= 1
            gain = candidate
            base = prepare_baseline(theta, v)
            trace.append(gain)
            stale = 0
        else:
            stale += 1
        i = (i + 1) % n
    return OptimizerResult(
        v=v, gain=_exact_gain(theta, v), evaluations=evaluations, trace=trace, rng_seed=seed
    )


@dataclasses.dataclass
class GaParams:
    population: int = 200
    max_generations_per_element: int = 100  # cap = this * n_s
    stagnation_limit: int = 50
    improvement_tol: float = 1e-6
    tournament: int = 3
    crossover_rate: float = 0.9
    elitism: int = 2


def genetic_algorithm(
    theta: ModelParameters, seed: int = 0, params: GaParams | None = None
) -> OptimizerResult:
    """Binary GA: tournament selection, uniform crossover, bit-flip mutation.

    Runs at most ``100 * n_s`` generations and stops early after 50
    generations without improvement or when the improvement over the
    previous best drops below 1e-6; returns the best individual ever seen.
    """
    p = params or GaParams()
    n = theta.n_s
    rng = np.random.default_rng(seed)
    pop = rng.integers(0, 2, size=(p.population, n)).astype(np.uint8)
    fitness = np.abs(channel_gain_batch(theta, pop)) ** 2
    fitness = np.where(np.isfinite(fitness), fitness, -np.inf)
    evaluations = p.population
    best_idx = int(np.argmax(fitness))
    best_v = pop[best_idx].copy()
    best_gain = float(fitness[best_idx])
    trace = [best_gain]
    mutation_rate = 1.0 / n
    stagnant = 0
    for _ in range(p.max_generations_per_element * n):
        order = np.argsort(-fitness, kind="stable")
        elite = pop[order[: p.elitism]].copy()
        # Tournament selection for two parent pools at once.
        draws = rng.integers(0, p.population, size=(2, p.population - p.elitism, p.tournament))
        parents_a = pop[draws[0][np.arange(draws.shape[1]), np.argmax(fitness[draws[0]], axis=1)]]
        parents_b = pop[draws[1][np.arange(draws.shape[1]), np.argmax(fitness[draws[1]], axis=1)]]
        cross = rng.random(draws.shape[1]) < p.crossover_rate
        mask = rng.integers(0, 2, size=parents_a.shape).astype(bool)
        children = np.where(mask, parents_a, parents_b)
        children[~cross] = parents_a[~cross]
        flip = rng.random(children.shape) < mutation_rate
        children = children ^ flip.astype(np.uint8)
        pop = np.concatenate([elite, children])
        fitness = np.abs(channel_gain_batch(theta, pop)) ** 2
        fitness = np.where(np.isfinite(fitness), fitness, -np.inf)
        evaluations += pop.shape[0]
        gen_best = int(np.argmax(fitness))
        improvement = float(fitness[gen_best]) - best_gain
        if improvement > 0.0:
            best_gain = float(fitness[gen_best])
            best_v = pop[gen_best].copy()
        trace.append(best_gain)
        if improvement <= 0.0:
            stagnant += 1
            if stagnant >= p.stagnation_limit:
                break
        else:
            stagnant = 0
            if improvement < p.improvement_tol:
                break
    return OptimizerResult(
        v=best_v,
        gain=_exact_gain(theta, best_v),
        evaluations=evaluations,
        trace=trace,
        rng_seed=seed,
    )


def project_sdr(theta: ModelParameters, x_check) -> OptimizerResult:
    """Round a relaxed auxiliary vector to the nearest binary configuration.

    Each element's implied reflection coefficient
    ``rho_i = x_i / (b_i + (Gamma x)_i)`` is quantized to whichever of
    ``alpha``/``beta`` is closer in the complex plane (ties and degenerate
    zero denominators both fall back to state 0).
    """
    x = np.asarray(x_check, dtype=np.complex128)
    if x.shape != (theta.n_s,):
        raise ValueError("relaxed vector has the wrong length")
    den = theta.b + theta.gamma @ x
    v = np.zeros(theta.n_s, dtype=np.uint8)
    degenerate = den == 0.0
    if degenerate.any():
        warnings.warn(
            f"zero denominator for element(s) {np.flatnonzero(degenerate).tolist()}; "
            "falling back to load state 0 there",
            DegenerateDenominatorWarning,
        )
    ok = ~degenerate
    rho = x[ok] / den[ok]
    v[ok] = (np.abs(rho - theta.beta) < np.abs(rho - theta.alpha)).astype(np.uint8)
    return OptimizerResult(v=v, gain=_exact_gain(theta, v), evaluations=1)
