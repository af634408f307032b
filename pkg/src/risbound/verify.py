"""Self-contained property suite over freshly generated random scenarios.

Checks, per scenario: every bound dominates the exhaustive optimum, the
gauge-optimized bound never exceeds its identity-gauge parent, the relaxation
value is invariant under an admissible random reparametrization, the
lossless-network achiever is unitary and attains its bound, the lifted
constraint matrices satisfy the per-gauge transfer identities, and the
channel map itself is unchanged configuration-by-configuration under the
composite reparametrization.  Deterministic in (seed, count).
"""

from __future__ import annotations

import dataclasses
import itertools

import numpy as np

from .bounds import NioOptions, ibd_achiever, ibd_bound, ni_bound, nio_bound
from .gauges import GaugeError, GaugeParameters, apply_gauge, random_admissible_gauge
from .model import capacity_from_gain, channel_gain_batch, channel_gain_full
from .optimize import exhaustive_search
from .reports import ResultRow
from .scenarios import LOAD_SETS, ScenarioSpec, generate_scenario, with_loads
from .sdr import gauge_identity_check, sdr_bound

__all__ = ["VerificationOutcome", "run_verification"]

REL_SDR = 1e-6
ABS_SDR = 1e-9
REL_GAUGE = 1e-5
REL_IDENTITY = 1e-9
ACHIEVER_REL = 1e-8
CHANNEL_EQ = 1e-10

DEFAULT_PT_MW = 10.0
DEFAULT_SIGMA2_MW = 1e-5


@dataclasses.dataclass
class VerificationOutcome:
    passed: bool
    rows: list
    failures: list
    checks: int


def _scenario_ns(index: int) -> int:
    return 4 + (index % 5)


def _all_configs(n: int) -> np.ndarray:
    return np.array(list(itertools.product((0, 1), repeat=n)), dtype=np.uint8)


def _check_scenario(index: int, seed: int):
    rows: list[ResultRow] = []
    failures: list[str] = []
    checks = 0
    n_s = _scenario_ns(index)
    spec = ScenarioSpec(n_s=n_s, seed=seed, direct_path="random")
    base = generate_scenario(spec)
    label = f"scenario-{index}"

    def fail(msg):
        failures.append(f"{label}: {msg}")

    def note(load_name, method, kind, value, valid):
        value = float(value)
        if np.isfinite(value) and value >= 0:
            capacity = capacity_from_gain(value, DEFAULT_PT_MW, DEFAULT_SIGMA2_MW)
        else:
            capacity = float("nan")
        rows.append(
            ResultRow(
                scenario=label,
                n_s=n_s,
                load_set=load_name,
                method=method,
                kind=kind,
                value=value,
                capacity=capacity,
                valid=valid,
                seed=seed,
            )
        )

    for name in sorted(LOAD_SETS):
        theta = with_loads(base, name)
        es = exhaustive_search(theta)
        note(name, "es", "gain", es.gain, True)

        sdr = sdr_bound(theta)
        note(name, "sdr", "bound", sdr.bound, sdr.certified)
        checks += 1
        if es.gain > sdr.bound * (1.0 + REL_SDR) + ABS_SDR:
            fail(f"{name}: exhaustive gain {es.gain:.12g} exceeds relaxation {sdr.bound:.12g}")

        ni = ni_bound(theta)
        note(name, "ni", "bound", ni.value, ni.valid)
        if ni.valid:
            checks += 1
            if es.gain > ni.value * (1.0 + 1e-12) + ABS_SDR:
                fail(f"{name}: exhaustive gain exceeds norm-inequality bound")
            nio = nio_bound(theta, NioOptions(restarts=2, max_iters=40))
            note(name, "nio", "bound", nio.value, nio.valid)
            checks += 2
            if nio.value > ni.value * (1.0 + 1e-12):
                fail(f"{name}: gauge-optimized bound exceeds its identity parent")
            if es.gain > nio.value * (1.0 + 1e-9) + ABS_SDR:
                fail(f"{name}: exhaustive gain exceeds gauge-optimized bound")

        if name == "PM":
            ibd, _ = ibd_bound(theta)
            note(name, "ibd", "bound", ibd.value, ibd.valid)
            checks += 1
            if es.gain > ibd.value * (1.0 + 1e-8):
                fail(f"{name}: exhaustive gain exceeds lossless-network bound")
            phi = ibd_achiever(theta)
            unit_res = float(np.linalg.norm(phi.conj().T @ phi - np.eye(n_s)))
            checks += 1
            if unit_res > 1e-10 * n_s:
                fail(f"{name}: achiever unitarity residual {unit_res:.2e}")
            attained = abs(channel_gain_full(theta, phi)) ** 2
            checks += 1
            if abs(attained - ibd.value) > ACHIEVER_REL * max(ibd.value, 1e-30):
                fail(f"{name}: achiever misses bound by {abs(attained - ibd.value):.3e}")

        if name == "PM":
            rng = np.random.default_rng(seed + 1)
            try:
                gauge = random_admissible_gauge(theta, rng)
            except GaugeError:
                gauge = None
            if gauge is not None:
                gauged = apply_gauge(theta, gauge)
                sdr_g = sdr_bound(gauged)
                checks += 1
                if abs(sdr_g.bound - sdr.bound) > REL_GAUGE * max(1.0, sdr.bound):
                    fail(
                        f"relaxation value moved under reparametrization: "
                        f"{sdr.bound:.10g} -> {sdr_g.bound:.10g}"
                    )
                configs = _all_configs(n_s)
                h_old = channel_gain_batch(theta, configs)
                h_new = channel_gain_batch(gauged, configs)
                checks += 1
                dev = float(np.abs(h_old - h_new).max())
                if dev > CHANNEL_EQ:
                    fail(f"channel map changed under reparametrization (max dev {dev:.2e})")

                for single in (
                    GaugeParameters(d=gauge.d, c=1.0 + 0j, m=0j),
                    GaugeParameters(d=np.ones(n_s, complex), c=gauge.c, m=0j),
                    GaugeParameters(d=np.ones(n_s, complex), c=1.0 + 0j, m=gauge.m),
                ):
                    try:
                        record = gauge_identity_check(theta, single, seed=seed)
                    except GaugeError:
                        continue
                    checks += 1
                    worst = max(
                        record["g0_residual"], float(record["gi_residuals"].max(initial=0.0))
                    )
                    if worst > REL_IDENTITY:
                        fail(
                            f"constraint-matrix transfer identity residual {worst:.2e} "
                            f"({record['gauge']})"
                        )
    return rows, failures, checks


def run_verification(seed: int = 0, count: int = 20, jobs: int = 1) -> VerificationOutcome:
    """Run the property suite on ``count`` scenarios derived from ``seed``."""
    tasks = [(i, seed + 7919 * i) for i in range(count)]
    results = {}
    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = {idx: pool.submit(_check_scenario, idx, s) for idx, s in tasks}
        for idx, fut in futures.items():
            results[idx] = fut.result()
    else:
        for idx, s in tasks:
            results[idx] = _check_scenario(idx, s)
    rows: list[ResultRow] = []
    failures: list[str] = []
    checks = 0
    for idx in sorted(results):
        r, f, c = results[idx]
        rows.extend(r)
        failures.extend(f)
        checks += c
    return VerificationOutcome(passed=not failures, rows=rows, failures=failures, checks=checks)
