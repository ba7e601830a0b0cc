"""Classical reference layer: roots of unity, inner products, the unitary DFT
and the normalized Fejer kernel.

Sequences are plain ``numpy`` complex arrays. Everything here is a pure
function of its inputs.
"""
from __future__ import annotations

import cmath
import math

import numpy as np

from .errors import InvalidArgument

__all__ = [
    "magnitude",
    "phase",
    "from_polar",
    "roots_of_unity",
    "inner_product",
    "geometric_sequence",
    "dft",
    "dft_matrix",
    "angle_similarity",
    "fejer_probability",
    "fejer_distribution",
]

_FEJER_SINGULAR = 1e-12


def magnitude(c: complex) -> float:
    return abs(complex(c))


def phase(c: complex) -> float:
    return cmath.phase(complex(c))


def from_polar(r: float, theta: float) -> complex:
    return cmath.rect(r, theta)


def _check_length(N: int) -> int:
    if int(N) != N or N < 1:
        raise InvalidArgument(f"N must be a positive integer, got {N!r}")
    return int(N)


def roots_of_unity(N: int) -> np.ndarray:
    """The N complex numbers cos(2πk/N) + i·sin(2πk/N), k = 0..N-1."""
    N = _check_length(N)
    k = np.arange(N)
    return np.exp(2j * np.pi * k / N)


def inner_product(x, y) -> complex:
    """Σ x_k · conj(y_k)."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    if x.shape != y.shape:
        raise InvalidArgument(f"length mismatch: {x.shape} vs {y.shape}")
    return complex(np.sum(x * np.conj(y)))


def geometric_sequence(p: float, N: int) -> np.ndarray:
    """Powers [1, λ, λ², …, λ^{N-1}] of λ = exp(i·p·2π/N)."""
    N = _check_length(N)
    k = np.arange(N)
    return np.exp(1j * k * p * 2 * np.pi / N)


def dft_matrix(N: int, sign: int) -> np.ndarray:
    N = _check_length(N)
    if sign not in (1, -1):
        raise InvalidArgument(f"sign must be +1 or -1, got {sign!r}")
    k = np.arange(N)
    # reduce k*r mod N before scaling so the phases stay exact for large N
    kr = np.outer(k, k) % N
    return np.exp(sign * 2j * np.pi * kr / N) / math.sqrt(N)


def dft(seq, sign: int) -> np.ndarray:
    """Unitary O(N²) transform: out_k = N^{-1/2} Σ_r seq_r · exp(sign·2πi·k·r/N).

    ``sign=-1`` is the decode direction: it maps the normalized geometric
    sequence of an integer v to the indicator of v.
    """
    seq = np.asarray(seq, dtype=complex)
    if seq.ndim != 1 or seq.size < 1:
        raise InvalidArgument("dft expects a non-empty 1-d sequence")
    return dft_matrix(seq.size, sign) @ seq


def angle_similarity(p: float, N: int) -> np.ndarray:
    """cos of the phase difference between exp(i·p·2π/N) and each N-th root."""
    N = _check_length(N)
    k = np.arange(N)
    return np.cos(p * 2 * np.pi / N - k * 2 * np.pi / N)


def fejer_probability(p: float, k: int, N: int) -> float:
    """Normalized Fejer kernel (1/N²)(1 - cos NΔ)/(1 - cos Δ), Δ = 2π(p-k)/N."""
    N = _check_length(N)
    delta = 2 * math.pi * (p - k) / N
    # Δ ≡ 0 (mod 2π) is the removable singularity; its limit is 1
    half = math.sin(delta / 2)
    if abs(half) < _FEJER_SINGULAR:
        return 1.0
    # half-angle form of the same ratio; avoids cancellation in 1 - cos Δ
    return (math.sin(N * delta / 2) / half) ** 2 / N**2


def fejer_distribution(p: float, N: int) -> np.ndarray:
    """fejer_probability(p, k, N) for every k in 0..N-1."""
    N = _check_length(N)
    return np.array([fejer_probability(p, k, N) for k in range(N)])
