"""Gate catalog, circuit container and the QFT.

A :class:`Circuit` is an ordered list of :class:`Gate` applications read
left to right. Before running, a circuit is lowered to flat arrays that the
kernels consume; SWAP lowers to three CX.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import InvalidArgument
from .state import PairTransform, QuantumState, new_state

__all__ = [
    "GateKind",
    "Gate",
    "Circuit",
    "gate_transform",
    "run",
    "inverse",
    "controlled",
    "power",
    "qft_circuit",
    "unitary_matrix",
]


class GateKind(str, Enum):
    X = "X"
    Y = "Y"
    Z = "Z"
    H = "H"
    RX = "RX"
    RY = "RY"
    RZ = "RZ"
    PHASE = "PHASE"
    SWAP = "SWAP"

    @property
    def rotation(self) -> bool:
        return self in _ROTATIONS


_ROTATIONS = {GateKind.RX, GateKind.RY, GateKind.RZ, GateKind.PHASE}
_SQ2 = 1 / math.sqrt(2)


def gate_transform(kind: GateKind | str, angle: float = 0.0) -> PairTransform:
    """Coefficient table of a single-qubit gate."""
    kind = GateKind(kind)
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    if kind is GateKind.X:
        return PairTransform(0, 1, 1, 0)
    if kind is GateKind.Y:
        return PairTransform(0, -1j, 1j, 0)
    if kind is GateKind.Z:
        return PairTransform(1, 0, 0, -1)
    if kind is GateKind.H:
        return PairTransform(_SQ2, _SQ2, _SQ2, -_SQ2)
    if kind is GateKind.RX:
        return PairTransform(c, -1j * s, -1j * s, c)
    if kind is GateKind.RY:
        return PairTransform(c, -s, s, c)
    if kind is GateKind.RZ:
        return PairTransform(complex(c, -s), 0, 0, complex(c, s))
    if kind is GateKind.PHASE:
        return PairTransform(1, 0, 0, complex(math.cos(angle), math.sin(angle)))
    raise InvalidArgument(f"{kind.value} is not a single-qubit pair transform")


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    target: int
    controls: frozenset[int] = frozenset()
    angle: float = 0.0
    target2: int | None = None  # second wire of a SWAP

    def __post_init__(self):
        object.__setattr__(self, "kind", GateKind(self.kind))
        object.__setattr__(self, "controls", frozenset(self.controls))
        if self.kind is GateKind.SWAP:
            if self.target2 is None or self.target2 == self.target:
                raise InvalidArgument("SWAP needs two distinct targets")
        elif self.target2 is not None:
            raise InvalidArgument(f"{self.kind.value} takes a single target")
        if set(self.targets) & self.controls:
            raise InvalidArgument(f"target of {self.kind.value} is also a control")

    @property
    def targets(self) -> tuple[int, ...]:
        return (self.target,) if self.target2 is None else (self.target, self.target2)

    @property
    def qubits(self) -> set[int]:
        return set(self.targets) | set(self.controls)

    def inverse(self) -> "Gate":
        if self.kind.rotation:
            return replace(self, angle=-self.angle)
        return self

    def remap(self, mapping) -> "Gate":
        return Gate(
            self.kind,
            mapping[self.target],
            frozenset(mapping[c] for c in self.controls),
            self.angle,
            None if self.target2 is None else mapping[self.target2],
        )

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind.value}
        if self.kind.rotation:
            d["angle"] = self.angle
        if self.kind is GateKind.SWAP:
            d["targets"] = [self.target, self.target2]
        else:
            d["target"] = self.target
        d["controls"] = sorted(self.controls)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Gate":
        try:
            kind = GateKind(str(d["kind"]).upper())
        except (KeyError, ValueError):
            raise InvalidArgument(f"ops[].kind: unknown gate kind {d.get('kind')!r}") from None
        if kind is GateKind.SWAP:
            targets = d.get("targets")
            if not isinstance(targets, list) or len(targets) != 2:
                raise InvalidArgument("ops[].targets: SWAP needs a two-element list")
            t, t2 = int(targets[0]), int(targets[1])
        else:
            if "target" not in d:
                raise InvalidArgument(f"ops[].target: missing for {kind.value}")
            t, t2 = int(d["target"]), None
        angle = float(d.get("angle", 0.0))
        if kind.rotation and "angle" not in d:
            raise InvalidArgument(f"ops[].angle: required for {kind.value}")
        return cls(kind, t, frozenset(int(c) for c in d.get("controls", [])), angle, t2)


@dataclass
class Circuit:
    """Ordered gate list over ``num_qubits`` wires.

    Builder methods append in place and return ``self`` for chaining; the
    module-level transforms (``inverse``, ``controlled``, ...) return new
    circuits and never mutate their input.
    """

    num_qubits: int
    ops: list[Gate] = field(default_factory=list)
    _lowered: tuple | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.num_qubits < 1:
            raise InvalidArgument("a circuit needs at least one qubit")
        ops, self.ops = list(self.ops), []
        for g in ops:
            self.append(g)

    # -- building ---------------------------------------------------------
    def append(self, gate: Gate) -> "Circuit":
        for q in gate.qubits:
            if not 0 <= q < self.num_qubits:
                raise InvalidArgument(f"qubit {q} out of range for a {self.num_qubits}-qubit circuit")
        self.ops.append(gate)
        self._lowered = None
        return self

    def add(self, kind, target: int, controls: Iterable[int] = (), angle: float = 0.0) -> "Circuit":
        return self.append(Gate(GateKind(kind), target, frozenset(controls), angle))

    def x(self, q, controls=()):
        return self.add(GateKind.X, q, controls)

    def y(self, q, controls=()):
        return self.add(GateKind.Y, q, controls)

    def z(self, q, controls=()):
        return self.add(GateKind.Z, q, controls)

    def h(self, q, controls=()):
        return self.add(GateKind.H, q, controls)

    def rx(self, theta, q, controls=()):
        return self.add(GateKind.RX, q, controls, theta)

    def ry(self, theta, q, controls=()):
        return self.add(GateKind.RY, q, controls, theta)

    def rz(self, theta, q, controls=()):
        return self.add(GateKind.RZ, q, controls, theta)

    def phase(self, theta, q, controls=()):
        return self.add(GateKind.PHASE, q, controls, theta)

    def swap(self, a, b, controls=()):
        return self.append(Gate(GateKind.SWAP, a, frozenset(controls), 0.0, b))

    def extend(self, other: "Circuit", qubits: Sequence[int] | None = None) -> "Circuit":
        """Append ``other``'s gates; ``qubits[j]`` is where its wire j lands."""
        if qubits is None:
            if other.num_qubits > self.num_qubits:
                raise InvalidArgument("appended circuit is wider than the host")
            for g in other.ops:
                self.append(g)
        else:
            if len(qubits) != other.num_qubits or len(set(qubits)) != len(qubits):
                raise InvalidArgument("qubit map must list one distinct host wire per source wire")
            for g in other.ops:
                self.append(g.remap(qubits))
        return self

    def __add__(self, other: "Circuit") -> "Circuit":
        out = Circuit(max(self.num_qubits, other.num_qubits), list(self.ops))
        return out.extend(other)

    def __len__(self) -> int:
        return len(self.ops)

    def qubits_used(self) -> set[int]:
        used: set[int] = set()
        for g in self.ops:
            used |= g.qubits
        return used

    # -- lowering ---------------------------------------------------------
    def lowered(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        if self._lowered is None:
            targets, cmasks, mats = [], [], []
            cx = gate_transform(GateKind.X).matrix
            for g in self.ops:
                cmask = 0
                for c in g.controls:
                    cmask |= 1 << c
                if g.kind is GateKind.SWAP:
                    a, b = g.target, g.target2
                    for t, c in ((b, a), (a, b), (b, a)):
                        targets.append(t)
                        cmasks.append(cmask | (1 << c))
                        mats.append(cx)
                else:
                    targets.append(g.target)
                    cmasks.append(cmask)
                    mats.append(gate_transform(g.kind, g.angle).matrix)
            self._lowered = (
                np.asarray(targets, dtype=np.int64),
                np.asarray(cmasks, dtype=np.int64),
                np.asarray(mats, dtype=np.complex128).reshape(-1, 2, 2),
            )
        return self._lowered

    # -- serialization ----------------------------------------------------
    def to_dict(self) -> dict:
        return {"num_qubits": self.num_qubits, "ops": [g.to_dict() for g in self.ops]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, doc: dict) -> "Circuit":
        if not isinstance(doc, dict):
            raise InvalidArgument("circuit: expected a JSON object")
        if "num_qubits" not in doc:
            raise InvalidArgument("num_qubits: missing")
        n = doc["num_qubits"]
        if not isinstance(n, int) or n < 1:
            raise InvalidArgument(f"num_qubits: expected a positive integer, got {n!r}")
        ops = doc.get("ops", [])
        if not isinstance(ops, list):
            raise InvalidArgument("ops: expected a list")
        return cls(n, [Gate.from_dict(d) for d in ops])

    @classmethod
    def from_json(cls, text: str) -> "Circuit":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidArgument(f"circuit: malformed JSON ({exc.msg})") from None
        return cls.from_dict(doc)


def run(circuit: Circuit, initial: QuantumState | None = None, backend: str | None = None) -> QuantumState:
    """Apply the circuit's gates in order to a copy of ``initial``."""
    if initial is None:
        initial = new_state(circuit.num_qubits)
    if initial.num_qubits != circuit.num_qubits:
        raise InvalidArgument(
            f"circuit has {circuit.num_qubits} qubits but the state has {initial.num_qubits}"
        )
    out = initial.copy()
    kernels.apply_ops(out.amplitudes, out.num_qubits, *circuit.lowered(), backend=backend)
    return out


def inverse(circuit: Circuit) -> Circuit:
    return Circuit(circuit.num_qubits, [g.inverse() for g in reversed(circuit.ops)])


def controlled(circuit: Circuit, extra_controls: Iterable[int]) -> Circuit:
    """Every gate gains ``extra_controls``; they must not touch the circuit."""
    extra = frozenset(extra_controls)
    clash = extra & circuit.qubits_used()
    if clash:
        raise InvalidArgument(f"extra controls {sorted(clash)} overlap qubits the circuit acts on")
    width = max([circuit.num_qubits, *(c + 1 for c in extra)])
    return Circuit(width, [replace(g, controls=g.controls | extra) for g in circuit.ops])


def power(circuit: Circuit, k: int) -> Circuit:
    """``circuit`` repeated ``k`` times by concatenation."""
    if k < 0:
        raise InvalidArgument("power must be non-negative")
    return Circuit(circuit.num_qubits, list(circuit.ops) * k)


def qft_circuit(width: int, inverse_flag: bool = False, qubits: Sequence[int] | None = None,
                num_qubits: int | None = None) -> Circuit:
    """QFT on a ``width``-qubit register.

    Without ``inverse_flag`` the register's amplitude block x is mapped by the
    unitary DFT with kernel exp(+2πi·x·k/N); with it, by exp(-2πi·x·k/N).
    ``qubits`` places the register inside a wider circuit.
    """
    if width < 1:
        raise InvalidArgument("QFT width must be >= 1")
    qs = list(range(width)) if qubits is None else list(qubits)
    if len(qs) != width:
        raise InvalidArgument("qubits must list exactly `width` wires")
    n = num_qubits if num_qubits is not None else max(qs) + 1
    c = Circuit(n)
    for j in reversed(range(width)):
        c.h(qs[j])
        for k in reversed(range(j)):
            c.phase(math.pi / (1 << (j - k)), qs[j], [qs[k]])
    for i in range(width // 2):
        c.swap(qs[i], qs[width - 1 - i])
    return inverse(c) if inverse_flag else c


def unitary_matrix(circuit: Circuit, backend: str | None = None) -> np.ndarray:
    """Dense matrix of the circuit (column i = image of basis state i)."""
    dim = 1 << circuit.num_qubits
    cols = np.empty((dim, dim), dtype=np.complex128)
    for i in range(dim):
        amps = np.zeros(dim, dtype=np.complex128)
        amps[i] = 1
        cols[:, i] = run(circuit, QuantumState(circuit.num_qubits, amps), backend=backend).amplitudes
    return cols
