"""Dense statevector, register layouts, pair transforms and outcome histograms.

Bit convention: basis index ``i`` gives qubit ``j`` the bit ``(i >> j) & 1``.
Labels are displayed MSB-left.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from . import kernels
from .errors import InvalidArgument

__all__ = [
    "MAX_QUBITS",
    "PRNG_NAME",
    "QuantumState",
    "Register",
    "RegisterLayout",
    "PairTransform",
    "OutcomeHistogram",
    "new_state",
    "apply_pair_transform",
    "probabilities",
    "sample",
    "sample_histogram",
    "marginal",
]

MAX_QUBITS = 26
PRNG_NAME = "numpy.PCG64/inverse-cdf/v1"
_TOL = 1e-9


@dataclass
class QuantumState:
    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (1 << self.num_qubits,):
            raise InvalidArgument(
                f"expected {1 << self.num_qubits} amplitudes for {self.num_qubits} qubits, "
                f"got shape {self.amplitudes.shape}"
            )

    @classmethod
    def from_amplitudes(cls, amplitudes, normalize: bool = False) -> "QuantumState":
        amps = np.asarray(amplitudes, dtype=np.complex128)
        n = int(round(math.log2(amps.size))) if amps.size else -1
        if n < 1 or (1 << n) != amps.size:
            raise InvalidArgument(f"amplitude count {amps.size} is not a power of two >= 2")
        if normalize:
            amps = amps / np.linalg.norm(amps)
        return cls(n, amps)

    def copy(self) -> "QuantumState":
        return QuantumState(self.num_qubits, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, tol: float = _TOL) -> bool:
        return abs(self.norm() ** 2 - 1.0) < tol

    def __len__(self) -> int:
        return self.amplitudes.size


@dataclass(frozen=True)
class Register:
    name: str
    offset: int
    width: int

    @property
    def qubits(self) -> list[int]:
        return list(range(self.offset, self.offset + self.width))

    def extract(self, index):
        """Register value of basis index (or array of indices)."""
        return (index >> self.offset) & ((1 << self.width) - 1)


class RegisterLayout:
    """Named, disjoint groups of qubits. Order of insertion is the display
    order (left to right)."""

    def __init__(self, num_qubits: int, registers: Iterable[Register] = ()):
        self.num_qubits = num_qubits
        self._regs: dict[str, Register] = {}
        for r in registers:
            self.add(r.name, r.offset, r.width)

    @classmethod
    def sequential(cls, *specs: tuple[str, int]) -> "RegisterLayout":
        """Pack registers from qubit 0 upwards in the given order."""
        offset = 0
        regs = []
        for name, width in specs:
            regs.append(Register(name, offset, width))
            offset += width
        return cls(offset, regs)

    def add(self, name: str, offset: int, width: int) -> Register:
        if name in self._regs:
            raise InvalidArgument(f"duplicate register {name!r}")
        if width < 1 or offset < 0 or offset + width > self.num_qubits:
            raise InvalidArgument(f"register {name!r} ({offset}, {width}) does not fit {self.num_qubits} qubits")
        new = set(range(offset, offset + width))
        for r in self._regs.values():
            if new & set(r.qubits):
                raise InvalidArgument(f"register {name!r} overlaps {r.name!r}")
        reg = Register(name, offset, width)
        self._regs[name] = reg
        return reg

    def __getitem__(self, name: str) -> Register:
        try:
            return self._regs[name]
        except KeyError:
            raise InvalidArgument(f"unknown register {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._regs

    def __iter__(self):
        return iter(self._regs.values())

    def names(self) -> list[str]:
        return list(self._regs)

    def __repr__(self) -> str:
        regs = ", ".join(f"{r.name}@{r.offset}:{r.width}" for r in self)
        return f"RegisterLayout({self.num_qubits}, [{regs}])"


@dataclass(frozen=True)
class PairTransform:
    """2×2 coefficient table: b0 = c00·a0 + c01·a1, b1 = c10·a0 + c11·a1."""

    c00: complex
    c01: complex
    c10: complex
    c11: complex

    @classmethod
    def from_matrix(cls, m) -> "PairTransform":
        m = np.asarray(m, dtype=complex)
        return cls(complex(m[0, 0]), complex(m[0, 1]), complex(m[1, 0]), complex(m[1, 1]))

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.c00, self.c01], [self.c10, self.c11]], dtype=np.complex128)

    def is_unitary(self, tol: float = _TOL) -> bool:
        m = self.matrix
        return bool(np.allclose(m.conj().T @ m, np.eye(2), atol=tol, rtol=0))

    def __matmul__(self, other: "PairTransform") -> "PairTransform":
        return PairTransform.from_matrix(self.matrix @ other.matrix)


def new_state(num_qubits: int) -> QuantumState:
    if int(num_qubits) != num_qubits or not 1 <= num_qubits <= MAX_QUBITS:
        raise InvalidArgument(f"num_qubits must be in [1, {MAX_QUBITS}], got {num_qubits!r}")
    amps = np.zeros(1 << num_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return QuantumState(int(num_qubits), amps)


def _check_indices(n: int, target: int, controls: Iterable[int]) -> tuple[int, int]:
    controls = set(controls)
    if target in controls:
        raise InvalidArgument(f"target {target} is also a control")
    for q in (target, *controls):
        if not 0 <= q < n:
            raise InvalidArgument(f"qubit index {q} out of range for {n} qubits")
    cmask = 0
    for c in controls:
        cmask |= 1 << c
    return target, cmask


def apply_pair_transform(
    state: QuantumState,
    t: PairTransform,
    target: int,
    controls: Iterable[int] = (),
    backend: str | None = None,
) -> QuantumState:
    """Return a new state with ``t`` applied to every index pair that differs
    only in ``target`` and has all ``controls`` set."""
    target, cmask = _check_indices(state.num_qubits, target, controls)
    out = state.copy()
    kernels.apply_ops(
        out.amplitudes,
        out.num_qubits,
        np.array([target], dtype=np.int64),
        np.array([cmask], dtype=np.int64),
        t.matrix.reshape(1, 2, 2),
        backend=backend,
    )
    return out


@dataclass
class OutcomeHistogram:
    """Basis index -> probability (exact mode, ``shots is None``) or count.

    ``fields`` optionally splits labels into named registers for display,
    as ``(name, offset, width)`` tuples listed left to right.
    """

    num_bits: int
    entries: dict[int, float]
    shots: int | None = None
    seed: int | None = None
    prng: str | None = None
    fields: tuple[tuple[str, int, int], ...] | None = None
    metadata: dict = field(default_factory=dict)

    @property
    def exact(self) -> bool:
        return self.shots is None

    def probability(self, index: int) -> float:
        v = self.entries.get(index, 0)
        return float(v) if self.exact else v / self.shots

    def as_probabilities(self) -> dict[int, float]:
        return {k: self.probability(k) for k in sorted(self.entries)}

    def total(self) -> float:
        return float(sum(self.entries.values()))

    def most_probable(self, tol: float = 1e-9) -> int:
        """Most probable index; near-ties go to the smaller index."""
        probs = self.as_probabilities()
        best = max(probs.values())
        return min(k for k, v in probs.items() if v >= best - tol)

    def top(self, k: int) -> list[tuple[int, float]]:
        probs = self.as_probabilities()
        return sorted(probs.items(), key=lambda kv: (-kv[1], kv[0]))[:k]

    def dense(self) -> np.ndarray:
        out = np.zeros(1 << self.num_bits)
        for k in self.entries:
            out[k] = self.probability(k)
        return out

    def label(self, index: int) -> str:
        if not self.fields:
            return format(index, f"0{self.num_bits}b")
        parts = []
        for _, offset, width in self.fields:
            parts.append(format((index >> offset) & ((1 << width) - 1), f"0{width}b"))
        return "|".join(parts)

    def to_rows(self) -> list[dict]:
        rows = []
        # label order; equals index order unless fields reorder the registers
        for k in sorted(self.entries, key=self.label):
            row = {"index": k, "label": self.label(k), "probability": self.probability(k)}
            if not self.exact:
                row["count"] = int(self.entries[k])
            rows.append(row)
        return rows

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        header = ["label", "probability"] + ([] if self.exact else ["count"])
        w.writerow(header)
        for row in self.to_rows():
            vals = [row["label"], repr(row["probability"])]
            if not self.exact:
                vals.append(row["count"])
            w.writerow(vals)
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "num_bits": self.num_bits,
            "shots": self.shots,
            "seed": self.seed,
            "prng": self.prng,
            "fields": [list(f) for f in self.fields] if self.fields else None,
            "entries": [
                {k: v for k, v in row.items() if k != "index"} for row in self.to_rows()
            ],
        }
        if self.metadata:
            doc["metadata"] = self.metadata
        return json.dumps(doc, indent=2, sort_keys=False)

    @classmethod
    def from_json(cls, text: str) -> "OutcomeHistogram":
        doc = json.loads(text)
        fields = tuple(tuple(f) for f in doc["fields"]) if doc.get("fields") else None
        hist = cls(doc["num_bits"], {}, doc.get("shots"), doc.get("seed"), doc.get("prng"), fields,
                   doc.get("metadata") or {})
        for row in doc["entries"]:
            idx = _parse_label(row["label"], hist)
            hist.entries[idx] = row["probability"] if hist.exact else int(row["count"])
        return hist


def _parse_label(label: str, hist: OutcomeHistogram) -> int:
    if not hist.fields:
        return int(label, 2)
    idx = 0
    for part, (_, offset, _w) in zip(label.split("|"), hist.fields):
        idx |= int(part, 2) << offset
    return idx


def probabilities(state: QuantumState, cutoff: float = 0.0) -> OutcomeHistogram:
    """Exact Born-rule distribution. Entries at or below ``cutoff`` are omitted."""
    probs = np.abs(state.amplitudes) ** 2
    nz = np.nonzero(probs > cutoff)[0]
    return OutcomeHistogram(state.num_qubits, {int(i): float(probs[i]) for i in nz})


def _draw(probs: np.ndarray, shots: int, seed: int) -> dict[int, int]:
    if int(shots) != shots or shots < 1:
        raise InvalidArgument(f"shots must be a positive integer, got {shots!r}")
    cdf = np.cumsum(probs)
    cdf /= cdf[-1]
    rng = np.random.Generator(np.random.PCG64(seed))
    u = rng.random(int(shots))
    idx = np.minimum(np.searchsorted(cdf, u, side="right"), probs.size - 1)
    values, counts = np.unique(idx, return_counts=True)
    return {int(v): int(c) for v, c in zip(values, counts)}


def sample(state: QuantumState, shots: int, seed: int) -> OutcomeHistogram:
    """Draw ``shots`` independent outcomes by inverse CDF from a seeded PCG64.

    The stored state is not collapsed.
    """
    counts = _draw(np.abs(state.amplitudes) ** 2, shots, seed)
    return OutcomeHistogram(state.num_qubits, counts, shots=int(shots), seed=seed, prng=PRNG_NAME)


def sample_histogram(hist: OutcomeHistogram, shots: int, seed: int) -> OutcomeHistogram:
    """Shots drawn from an exact histogram; same draw as :func:`sample` on
    the state that produced it."""
    if not hist.exact:
        raise InvalidArgument("histogram is already sampled")
    counts = _draw(hist.dense(), shots, seed)
    return OutcomeHistogram(hist.num_bits, counts, int(shots), seed, PRNG_NAME, hist.fields,
                            dict(hist.metadata))


def marginal(hist: OutcomeHistogram, layout: RegisterLayout | Mapping, register: str | Iterable[str]) -> OutcomeHistogram:
    """Sum the histogram over every bit outside ``register``.

    ``register`` may be a list of names. The kept registers are packed from
    bit 0 upwards in the order given and displayed left to right in that same
    order, so ``["key", "value"]`` renders labels as ``key|value``.
    """
    names = [register] if isinstance(register, str) else list(register)
    regs = [layout[nm] for nm in names]
    offset = 0
    packed = []
    for r in regs:
        packed.append((r, offset))
        offset += r.width
    out: dict[int, float] = {}
    for idx, v in hist.entries.items():
        key = 0
        for r, off in packed:
            key |= int(r.extract(idx)) << off
        out[key] = out.get(key, 0) + v
    fields = None
    if len(regs) > 1:
        fields = tuple((r.name, off, r.width) for r, off in packed)
    return OutcomeHistogram(offset, out, hist.shots, hist.seed, hist.prng, fields, dict(hist.metadata))
