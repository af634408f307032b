"""Synthetic passive scenarios, standard load sets, and model (de)serialization.

Scenario generation draws a random strictly passive scattering matrix for the
two antenna ports plus the tunable elements (all singular values capped below
one), then reads the channel parameters off its blocks.  The on-disk model
format is a single JSON document with complex numbers as ``[re, im]`` pairs.
"""

from __future__ import annotations

import dataclasses
import json
import math

import numpy as np

from .errors import ParseError
from .model import ModelParameters

__all__ = [
    "ScenarioSpec",
    "LoadSet",
    "LOAD_SETS",
    "load_set",
    "generate_scenario",
    "with_loads",
    "save_model",
    "load_model",
]


@dataclasses.dataclass(frozen=True)
class LoadSet:
    name: str
    alpha: complex
    beta: complex


LOAD_SETS = {
    # short/open terminations; unit modulus, so the lossless bound applies
    "PM": LoadSet("PM", -1.0 + 0.0j, 1.0 + 0.0j),
    # reflection coefficients of a commercial PIN diode's two states
    "PIN": LoadSet("PIN", 0.6366 - 0.7712j, -0.8116 + 0.0j),
    # matched load / open circuit
    "01": LoadSet("01", 0.0 + 0.0j, 1.0 + 0.0j),
}


def load_set(name: str) -> LoadSet:
    key = str(name).upper()
    if key not in LOAD_SETS:
        raise ValueError(f"unknown load set {name!r}; choose from {sorted(LOAD_SETS)}")
    return LOAD_SETS[key]


@dataclasses.dataclass(frozen=True)
class ScenarioSpec:
    n_s: int
    seed: int
    max_singular_value: float = 0.95  # strict passivity margin for the full S
    reciprocal: bool = False
    coupling_scale: float = 1.0  # multiplies inter-element off-diagonal coupling
    direct_path: str = "zero"  # h0 policy: "zero" or "random"

    def __post_init__(self):
        if self.n_s < 1:
            raise ValueError("n_s must be positive")
        if not 0.0 < self.max_singular_value < 1.0:
            raise ValueError("max_singular_value must lie strictly in (0, 1)")
        if self.coupling_scale < 0.0:
            raise ValueError("coupling_scale must be nonnegative")
        if self.direct_path not in ("zero", "random"):
            raise ValueError("direct_path must be 'zero' or 'random'")


def _draw_scattering(spec: ScenarioSpec, rng: np.random.Generator) -> np.ndarray:
    """Random (2 + n_s)-port scattering matrix with all singular values
    <= ``max_singular_value``; exactly symmetric when ``reciprocal``."""
    n = spec.n_s + 2
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    u, sv, vh = np.linalg.svd(g)
    sv = sv * (spec.max_singular_value / sv.max())
    if spec.reciprocal:
        # u diag(sv) u^T is symmetric with exactly these singular values.
        s = (u * sv) @ u.T
    else:
        s = (u * sv) @ vh
    if spec.coupling_scale != 1.0:
        off = ~np.eye(spec.n_s, dtype=bool)
        s[2:, 2:][off] *= spec.coupling_scale
        top = float(np.linalg.norm(s, 2))
        if top > spec.max_singular_value:
            s *= spec.max_singular_value / top
    return s


def generate_scenario(spec: ScenarioSpec) -> ModelParameters:
    """Deterministic random passive scenario with short/open (PM) loads.

    Port 0 is the transmitter, port 1 the receiver, ports 2.. the tunable
    elements, so ``h0 = S[1, 0]``, ``a = S[1, 2:]``, ``b = S[2:, 0]`` and
    ``gamma = S[2:, 2:]`` (contractive as a submatrix of a contractive S).
    Swap in other terminations with :func:`with_loads`.
    """
    rng = np.random.default_rng(spec.seed)
    s = _draw_scattering(spec, rng)
    h0 = 0.0j if spec.direct_path == "zero" else complex(s[1, 0])
    pm = LOAD_SETS["PM"]
    return ModelParameters(
        alpha=pm.alpha,
        beta=pm.beta,
        h0=h0,
        a=s[1, 2:].copy(),
        b=s[2:, 0].copy(),
        gamma=s[2:, 2:].copy(),
    )


def with_loads(theta: ModelParameters, loads: LoadSet | str) -> ModelParameters:
    """The same passive environment terminated with a different load set."""
    if isinstance(loads, str):
        loads = load_set(loads)
    return ModelParameters(
        alpha=loads.alpha,
        beta=loads.beta,
        h0=theta.h0,
        a=theta.a,
        b=theta.b,
        gamma=theta.gamma,
    )


def _pair(z: complex) -> list:
    return [float(np.real(z)), float(np.imag(z))]


def save_model(theta: ModelParameters, path) -> None:
    doc = {
        "n_s": theta.n_s,
        "alpha": _pair(theta.alpha),
        "beta": _pair(theta.beta),
        "h0": _pair(theta.h0),
        "a": [_pair(z) for z in theta.a],
        "b": [_pair(z) for z in theta.b],
        "gamma": [[_pair(z) for z in row] for row in theta.gamma],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def _parse_complex(node, field: str) -> complex:
    if (
        not isinstance(node, (list, tuple))
        or len(node) != 2
        or not all(isinstance(x, (int, float)) for x in node)
    ):
        raise ParseError(f"field {field!r}: expected a [re, im] pair, got {node!r}")
    z = complex(float(node[0]), float(node[1]))
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ParseError(f"field {field!r}: non-finite entry {node!r}")
    return z


def load_model(path) -> ModelParameters:
    """Parse a model document; raises :class:`ParseError` with the offending
    field on malformed, inconsistent, or non-finite input."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ParseError("top-level document must be an object")
    missing = [k for k in ("n_s", "alpha", "beta", "h0", "a", "b", "gamma") if k not in doc]
    if missing:
        raise ParseError(f"missing field(s): {', '.join(missing)}")
    n = doc["n_s"]
    if not isinstance(n, int) or n < 1:
        raise ParseError(f"field 'n_s': expected a positive integer, got {n!r}")
    alpha = _parse_complex(doc["alpha"], "alpha")
    beta = _parse_complex(doc["beta"], "beta")
    h0 = _parse_complex(doc["h0"], "h0")

    def vector(field):
        node = doc[field]
        if not isinstance(node, list) or len(node) != n:
            raise ParseError(f"field {field!r}: expected {n} entries")
        return np.array(
            [_parse_complex(z, f"{field}[{i}]") for i, z in enumerate(node)],
            dtype=np.complex128,
        )

    a = vector("a")
    b = vector("b")
    gnode = doc["gamma"]
    if not isinstance(gnode, list) or len(gnode) != n:
        raise ParseError(f"field 'gamma': expected {n} rows")
    rows = []
    for i, row in enumerate(gnode):
        if not isinstance(row, list) or len(row) != n:
            raise ParseError(f"field 'gamma[{i}]': expected {n} entries")
        rows.append([_parse_complex(z, f"gamma[{i}][{j}]") for j, z in enumerate(row)])
    gamma = np.array(rows, dtype=np.complex128)
    return ModelParameters(alpha=alpha, beta=beta, h0=h0, a=a, b=b, gamma=gamma)
