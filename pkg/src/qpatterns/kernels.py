"""Hot loop: apply a batch of (possibly controlled) 2×2 pair transforms to a
dense statevector in place.

A batch is three arrays describing K lowered operations:

    targets : int64[K]          target qubit of each op
    cmasks  : int64[K]          OR of 1 << c over the op's control qubits
    mats    : complex128[K,2,2] coefficients [[c00, c01], [c10, c11]]

Two interchangeable backends implement it. ``"numba"`` walks only the index
pairs whose control bits are set (bit insertion); ``"numpy"`` slices a
(2,)*n tensor view. Set ``QPATTERNS_DISABLE_NUMBA=1`` to force the numpy
path, e.g. when numba is unavailable or while debugging.
"""
from __future__ import annotations

import os

import numpy as np

__all__ = ["BACKEND", "HAVE_NUMBA", "apply_ops", "available_backends"]


def _env_disabled() -> bool:
    return os.environ.get("QPATTERNS_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}


try:
    if _env_disabled():
        raise ImportError("numba disabled by QPATTERNS_DISABLE_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

BACKEND = "numba" if HAVE_NUMBA else "numpy"


def available_backends() -> list[str]:
    return ["numba", "numpy"] if HAVE_NUMBA else ["numpy"]


def _apply_ops_numpy(psi: np.ndarray, n: int, targets, cmasks, mats) -> None:
    view = psi.reshape((2,) * n)
    for t, cmask, m in zip(targets, cmasks, mats):
        t = int(t)
        cmask = int(cmask)
        idx0 = [slice(None)] * n
        # qubit j lives on axis n-1-j: C order puts weight 2^0 on the last axis
        j = 0
        while cmask >> j:
            if (cmask >> j) & 1:
                idx0[n - 1 - j] = 1
            j += 1
        idx1 = list(idx0)
        idx0[n - 1 - t] = 0
        idx1[n - 1 - t] = 1
        idx0 = tuple(idx0)
        idx1 = tuple(idx1)
        a0 = view[idx0].copy()
        a1 = view[idx1].copy()
        view[idx0] = m[0, 0] * a0 + m[0, 1] * a1
        view[idx1] = m[1, 0] * a0 + m[1, 1] * a1


if HAVE_NUMBA:

    @njit(cache=True)
    def _apply_ops_numba(psi, n, targets, cmasks, mats):  # pragma: no cover - compiled
        fixed = np.empty(64, dtype=np.int64)
        for op in range(targets.shape[0]):
            t = targets[op]
            cmask = cmasks[op]
            fmask = cmask | (np.int64(1) << t)
            nfixed = 0
            for j in range(n):
                if (fmask >> j) & 1:
                    fixed[nfixed] = j
                    nfixed += 1
            c00 = mats[op, 0, 0]
            c01 = mats[op, 0, 1]
            c10 = mats[op, 1, 0]
            c11 = mats[op, 1, 1]
            tbit = np.int64(1) << t
            nfree = n - nfixed
            for r in range(np.int64(1) << nfree):
                i = np.int64(r)
                # insert a zero at every fixed position, lowest first
                for f in range(nfixed):
                    pos = fixed[f]
                    low = i & ((np.int64(1) << pos) - 1)
                    i = ((i >> pos) << (pos + 1)) | low
                i0 = i | cmask
                i1 = i0 | tbit
                a0 = psi[i0]
                a1 = psi[i1]
                psi[i0] = c00 * a0 + c01 * a1
                psi[i1] = c10 * a0 + c11 * a1


def apply_ops(psi: np.ndarray, n: int, targets, cmasks, mats, backend: str | None = None) -> None:
    """Apply the lowered op batch to ``psi`` (length 2**n, complex128) in place."""
    backend = backend or BACKEND
    if len(targets) == 0:
        return
    if backend == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but numba is not available")
        _apply_ops_numba(psi, np.int64(n), targets, cmasks, mats)
    elif backend == "numpy":
        _apply_ops_numpy(psi, n, targets, cmasks, mats)
    else:
        raise ValueError(f"unknown backend {backend!r}")
