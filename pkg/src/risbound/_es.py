"""Gain-table backend selection: compiled kernel if importable, numpy otherwise.

Set ``RISBOUND_PURE=1`` to force the numpy backend even when the extension is
built.  Either backend fills the same dense table, so downstream tie-breaking
(first maximum = lexicographically smallest control vector) is identical.
"""

from __future__ import annotations

import os

import numpy as np

from .errors import SingularResolvent
from .model import ModelParameters
from ._es_numpy import dense_gains, dense_gains_direct

_kernel = None
if not os.environ.get("RISBOUND_PURE"):
    try:
        from . import _es_kernel as _kernel  # type: ignore[no-redef]
    except ImportError:
        _kernel = None

__all__ = ["backend_name", "gain_table"]


def backend_name() -> str:
    return "compiled" if _kernel is not None else "numpy"


def gain_table(theta: ModelParameters, reseed_every: int = 4096) -> np.ndarray:
    """``|h(v)|^2`` for every configuration, indexed by big-endian ``v``.

    Falls back from the compiled kernel to the numpy path (and from there to
    direct solves) if an exactly singular configuration interrupts the
    incremental sweep; non-finite entries may remain only when individual
    configurations are themselves singular.
    """
    if _kernel is not None:
        gains = np.empty(1 << theta.n_s, dtype=np.float64)
        try:
            # Model arrays are frozen read-only; the kernel wants writable
            # buffers, so hand it private copies.
            _kernel.fill_gains(
                np.array(theta.gamma, dtype=np.complex128, order="C"),
                np.array(theta.a, dtype=np.complex128),
                np.array(theta.b, dtype=np.complex128),
                theta.alpha,
                theta.beta,
                theta.h0,
                gains,
                reseed_every,
            )
            return gains
        except ArithmeticError:
            pass
    try:
        return dense_gains(theta)
    except SingularResolvent:
        # The all-alpha baseline itself is singular; enumerate directly.
        return dense_gains_direct(theta)
