"""Oracles, diffusion, phase estimation, Grover search, amplitude
amplification and quantum counting.

Layout conventions
------------------
Oracles need one scratch qubit, the register named by ``OracleSpec.ancilla``
(``"oracle"`` by default). It starts and ends in |0>.

Counting places the system (prep qubits plus the oracle scratch qubit) at
qubits ``[0, s)`` and the control register at ``[s, s + t)``.

Sign convention for counting
----------------------------
The counting iterate is ``A · (I - 2|0><0|) · A⁻¹ · O``, i.e. minus the
textbook Grover iterate. Its eigenphases sit at ``π ± 2θ`` with
``sin²θ`` the good-state probability, so an outcome p of a t-qubit control
register converts back as ``cos²(p·π/2^t)``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .circuits import Circuit, controlled, inverse, power, qft_circuit, run
from .errors import InvalidArgument
from .state import (
    OutcomeHistogram,
    QuantumState,
    RegisterLayout,
    marginal,
    new_state,
    probabilities,
)

__all__ = [
    "OracleSpec",
    "PhaseEstimationConfig",
    "PhaseEstimationResult",
    "CountingResult",
    "ResolutionWarning",
    "build_oracle",
    "reflect_about_zero",
    "diffusion",
    "phase_estimation",
    "ry_eigen_config",
    "grover_search",
    "grover_iterate",
    "amplitude_amplify",
    "quantum_count",
    "estimate_amplitude",
    "count_from_outcome",
    "run_counting",
    "optimal_iterations",
]

ANCILLA_TRICK = "ancilla"
ZXZX = "zxzx"


class ResolutionWarning(UserWarning):
    """The control register is too narrow to separate the estimate from 0 or 1."""


@dataclass(frozen=True)
class OracleSpec:
    """Declarative description of the good states.

    ``kind`` is one of ``"parity"``, ``"set"``, ``"sign"``, ``"key"`` or
    ``"below"`` (two's-complement value < ``labels[0]``). Build instances
    with the classmethods rather than by hand.
    """

    kind: str
    register: str
    labels: tuple[int, ...] = ()
    even: bool = True
    construction: str = ANCILLA_TRICK
    ancilla: str = "oracle"

    def __post_init__(self):
        if self.kind not in {"parity", "set", "sign", "key", "below"}:
            raise InvalidArgument(f"unknown oracle kind {self.kind!r}")
        if self.construction not in {ANCILLA_TRICK, ZXZX}:
            raise InvalidArgument(f"unknown oracle construction {self.construction!r}")

    @classmethod
    def parity(cls, register: str, even: bool = True, **kw) -> "OracleSpec":
        return cls("parity", register, even=even, **kw)

    @classmethod
    def explicit_set(cls, register: str, labels: Iterable[int | str], **kw) -> "OracleSpec":
        labs = tuple(sorted({_label_value(x) for x in labels}))
        if not labs:
            raise InvalidArgument("an explicit-set oracle needs at least one label")
        return cls("set", register, labels=labs, **kw)

    @classmethod
    def sign_bit(cls, register: str, **kw) -> "OracleSpec":
        return cls("sign", register, **kw)

    @classmethod
    def key_match(cls, register: str, pattern: int | str, **kw) -> "OracleSpec":
        return cls("key", register, labels=(_label_value(pattern),), **kw)

    @classmethod
    def below(cls, register: str, bound: int, **kw) -> "OracleSpec":
        return cls("below", register, labels=(int(bound),), **kw)

    def with_construction(self, construction: str) -> "OracleSpec":
        return OracleSpec(self.kind, self.register, self.labels, self.even, construction, self.ancilla)

    def is_good(self, value: int, width: int) -> bool:
        """Classical predicate on a register value."""
        if self.kind == "parity":
            return (value & 1) == (0 if self.even else 1)
        if self.kind == "sign":
            return bool((value >> (width - 1)) & 1)
        if self.kind == "below":
            half = 1 << (width - 1)
            return (value - 2 * half if value >= half else value) < self.labels[0]
        return value in self.labels


def _label_value(x: int | str) -> int:
    if isinstance(x, str):
        return int(x, 2)
    return int(x)


def _patterns(spec: OracleSpec, offset: int, width: int) -> list[list[tuple[int, int]]]:
    """Each pattern is a list of (qubit, required bit)."""
    if spec.kind == "parity":
        return [[(offset, 0 if spec.even else 1)]]
    if spec.kind == "sign":
        return [[(offset + width - 1, 1)]]
    if spec.kind == "below":
        return _below_patterns(spec.labels[0], offset, width)
    pats = []
    for lab in spec.labels:
        if not 0 <= lab < (1 << width):
            raise InvalidArgument(f"label {lab} does not fit a {width}-qubit register")
        pats.append([(offset + j, (lab >> j) & 1) for j in range(width)])
    return pats


def _below_patterns(bound: int, offset: int, width: int) -> list[list[tuple[int, int]]]:
    """Disjoint prefix patterns covering the two's-complement values < bound.

    Flipping the sign bit turns signed order into unsigned order, and
    ``u < x`` splits into one prefix per 1-bit of x.
    """
    half = 1 << (width - 1)
    x = min(max(bound + half, 0), 2 * half)
    if x == 2 * half:
        return [[]]
    msb = width - 1
    pats = []
    for b in reversed(range(width)):
        if (x >> b) & 1:
            pat = [(offset + j, (x >> j) & 1) for j in range(b + 1, width)] + [(offset + b, 0)]
            pats.append([(q, bit ^ 1) if q == offset + msb else (q, bit) for q, bit in pat])
    return pats


def build_oracle(spec: OracleSpec, layout: RegisterLayout) -> Circuit:
    """Circuit multiplying the amplitude of every good basis state by -1.

    Zero bits in a pattern are matched by X-conjugating their qubit. The
    ancilla-trick construction parks the scratch qubit in (|0>-|1>)/√2 and
    flips it; the ZXZX construction applies Z·X·Z·X (= -I) to it under the
    pattern's controls. Either way the scratch qubit ends in |0>.
    """
    reg = layout[spec.register]
    anc = layout[spec.ancilla]
    if anc.width != 1:
        raise InvalidArgument(f"oracle ancilla register {spec.ancilla!r} must be one qubit")
    a = anc.offset
    c = Circuit(layout.num_qubits)
    if spec.construction == ANCILLA_TRICK:
        c.x(a).h(a)
    for pattern in _patterns(spec, reg.offset, reg.width):
        zeros = [q for q, bit in pattern if bit == 0]
        ctrls = [q for q, _ in pattern]
        for q in zeros:
            c.x(q)
        if spec.construction == ANCILLA_TRICK:
            c.x(a, ctrls)
        else:
            c.z(a, ctrls).x(a, ctrls).z(a, ctrls).x(a, ctrls)
        for q in zeros:
            c.x(q)
    if spec.construction == ANCILLA_TRICK:
        c.h(a).x(a)
    return c


def reflect_about_zero(qubits: Iterable[int], num_qubits: int, standard: bool = True) -> Circuit:
    """Reflection about |0…0> on ``qubits``.

    ``standard=True`` gives 2|0><0| - I; ``False`` gives I - 2|0><0|, which
    is what the bare X·(multi-controlled Z)·X sequence implements. The extra
    global -1 of the standard form is a ZXZX on the first wire; it becomes a
    relative phase once the reflection is controlled.
    """
    qs = sorted(qubits)
    if not qs:
        raise InvalidArgument("reflection needs at least one qubit")
    c = Circuit(num_qubits)
    for q in qs:
        c.x(q)
    c.z(qs[-1], qs[:-1])
    for q in qs:
        c.x(q)
    if standard:
        q = qs[0]
        c.z(q).x(q).z(q).x(q)
    return c


def diffusion(register: str, layout: RegisterLayout, standard: bool = True) -> Circuit:
    """Inversion about the mean on one register's amplitude blocks.

    ``standard=True`` maps every amplitude a to 2·mean - a;
    ``standard=False`` gives the negation, a - 2·mean.
    """
    reg = layout[register]
    c = Circuit(layout.num_qubits)
    for q in reg.qubits:
        c.h(q)
    c.extend(reflect_about_zero(reg.qubits, layout.num_qubits, standard))
    for q in reg.qubits:
        c.h(q)
    return c


# -- phase estimation -------------------------------------------------------

@dataclass
class PhaseEstimationConfig:
    """Operator U (on its own wires) plus a circuit preparing an eigenstate."""

    control_width: int
    unitary: Circuit
    eigenprep: Circuit | None = None
    unprepare: bool = True


@dataclass
class PhaseEstimationResult:
    histogram: OutcomeHistogram
    eigenstate_ok: bool
    eigenphase: float | None  # in units of 2π/2^t, when eigenstate_ok


def _eigen_check(config: PhaseEstimationConfig) -> tuple[bool, float | None]:
    u = config.unitary
    prep = config.eigenprep or Circuit(u.num_qubits)
    psi = run(prep, new_state(u.num_qubits))
    phi = run(u, psi)
    overlap = np.vdot(psi.amplitudes, phi.amplitudes)
    ok = abs(abs(overlap) - 1) < 1e-9
    if not ok:
        return False, None
    p = (np.angle(overlap) % (2 * math.pi)) * (1 << config.control_width) / (2 * math.pi)
    return True, float(p)


def _pe_circuit(t: int, system: int, unitary: Circuit) -> Circuit:
    """Control register at [system, system+t); ``unitary`` acts on [0, system)."""
    total = system + t
    c = Circuit(total)
    controls = list(range(system, system + t))
    for q in controls:
        c.h(q)
    u = Circuit(total).extend(unitary)
    for k, q in enumerate(controls):
        c.extend(controlled(power(u, 1 << k), [q]))
    c.extend(qft_circuit(t, inverse_flag=True, qubits=controls, num_qubits=total))
    return c


def phase_estimation(config: PhaseEstimationConfig, return_result: bool = False):
    """Histogram of the control register after phase estimation.

    Controlled-U^{2^k} is realized by 2^k controlled copies of U. If the
    prepared state is not an eigenvector the histogram is still produced,
    with a ``RuntimeWarning`` and ``eigenstate_ok=False`` in the metadata.
    """
    t = config.control_width
    if t < 1:
        raise InvalidArgument("control_width must be >= 1")
    u = config.unitary
    s = u.num_qubits
    ok, p = _eigen_check(config)
    if not ok:
        warnings.warn("eigenprep output is not an eigenvector of the unitary", RuntimeWarning)
    c = Circuit(s + t)
    if config.eigenprep is not None:
        c.extend(config.eigenprep)
    c.extend(_pe_circuit(t, s, u))
    if config.eigenprep is not None and config.unprepare:
        c.extend(inverse(config.eigenprep))
    layout = RegisterLayout.sequential(("system", s), ("control", t))
    hist = marginal(probabilities(run(c)), layout, "control")
    hist.metadata.update({"eigenstate_ok": ok, "eigenphase": p})
    if return_result:
        return PhaseEstimationResult(hist, ok, p)
    return hist


def ry_eigen_config(p: float, control_width: int) -> PhaseEstimationConfig:
    """U = RY(2θ) with θ = p·2π/2^t, on its eigenvector (i, 1)/√2.

    The eigenvector is prepared as H then PHASE(-π/2), which equals it up to
    a global phase; its eigenvalue is cos θ + i sin θ.
    """
    theta = p * 2 * math.pi / (1 << control_width)
    u = Circuit(1).ry(2 * theta, 0)
    prep = Circuit(1).h(0).phase(-math.pi / 2, 0)
    return PhaseEstimationConfig(control_width, u, prep)


# -- Grover ----------------------------------------------------------------

def optimal_iterations(fraction: float) -> int:
    """floor(π/(4θ)) with sin²θ = fraction: the largest k before overshoot."""
    if fraction <= 0:
        return 0
    if fraction >= 1:
        return 0
    theta = math.asin(math.sqrt(fraction))
    return int(math.floor(math.pi / (4 * theta)))


def grover_search(oracle: OracleSpec, width: int, iterations: int) -> OutcomeHistogram:
    """Uniform start on ``width`` qubits, then (diffusion · oracle)^iterations."""
    if iterations < 0:
        raise InvalidArgument("iterations must be >= 0")
    layout = RegisterLayout.sequential((oracle.register, width), (oracle.ancilla, 1))
    c = Circuit(layout.num_qubits)
    for q in layout[oracle.register].qubits:
        c.h(q)
    step = build_oracle(oracle, layout) + diffusion(oracle.register, layout)
    c.extend(power(step, iterations))
    return marginal(probabilities(run(c)), layout, oracle.register)


def _data_qubits(layout: RegisterLayout, oracle: OracleSpec) -> list[int]:
    anc = set(layout[oracle.ancilla].qubits)
    return [q for q in range(layout.num_qubits) if q not in anc]


def grover_iterate(prep: Circuit, oracle: OracleSpec, layout: RegisterLayout, standard: bool = True) -> Circuit:
    """A · R0 · A⁻¹ · O, R0 the reflection about |0…0> on the data qubits."""
    n = layout.num_qubits
    a = Circuit(n).extend(prep)
    c = build_oracle(oracle, layout)
    c.extend(inverse(a))
    c.extend(reflect_about_zero(_data_qubits(layout, oracle), n, standard))
    c.extend(a)
    return c


def _default_layout(prep: Circuit, oracle: OracleSpec, layout: RegisterLayout | None) -> RegisterLayout:
    if layout is not None:
        if prep.num_qubits > layout.num_qubits:
            raise InvalidArgument("prep circuit is wider than the layout")
        return layout
    return RegisterLayout.sequential((oracle.register, prep.num_qubits), (oracle.ancilla, 1))


def amplitude_amplify(prep: Circuit, oracle: OracleSpec, iterations: int,
                      layout: RegisterLayout | None = None) -> QuantumState:
    """(A · R0 · A⁻¹ · O)^iterations · A|0…0>.

    Without ``layout`` the prep's wires form the oracle register and one
    scratch qubit is appended above them.
    """
    if iterations < 0:
        raise InvalidArgument("iterations must be >= 0")
    layout = _default_layout(prep, oracle, layout)
    c = Circuit(layout.num_qubits).extend(prep)
    c.extend(power(grover_iterate(prep, oracle, layout), iterations))
    return run(c)


# -- counting --------------------------------------------------------------

@dataclass
class CountingResult:
    outcome_histogram: OutcomeHistogram
    top_outcomes: tuple[int, int]
    estimated_fraction: float
    estimated_count: int
    control_width: int
    resolved: bool = True
    peak_probability: float = 0.0
    extra: dict = field(default_factory=dict)


def count_from_outcome(p: int, control_width: int, multiplier: int) -> tuple[float, int]:
    """(cos²(p·π/2^t), round(multiplier · cos²(p·π/2^t)))."""
    frac = math.cos(p * math.pi / (1 << control_width)) ** 2
    return frac, int(round(multiplier * frac))


def run_counting(prep: Circuit, oracle: OracleSpec, layout: RegisterLayout, t: int,
              multiplier: int) -> CountingResult:
    if t < 2:
        raise InvalidArgument("control_width must be >= 2")
    s = layout.num_qubits
    q = grover_iterate(prep, oracle, layout, standard=False)
    c = Circuit(s + t).extend(prep)
    c.extend(_pe_circuit(t, s, q))
    full = RegisterLayout(s + t, list(layout))
    full.add("control", s, t)
    hist = marginal(probabilities(run(c)), full, "control")
    p = hist.most_probable()
    N = 1 << t
    frac, count = count_from_outcome(p, t, multiplier)
    peak = hist.probability(p)
    # a peak at 0 or N/2 with little mass means a phase near, not at, the
    # boundary that t bits cannot resolve
    resolved = not (p in (0, N // 2) and peak < 0.5)
    return CountingResult(hist, (p, (N - p) % N), frac, count, t, resolved, peak,
                          {"multiplier": multiplier})


def quantum_count(oracle: OracleSpec, control_width: int, key_width: int,
                  prep: Circuit | None = None, layout: RegisterLayout | None = None) -> CountingResult:
    """Estimate how many of the 2^key_width keys are good.

    ``prep=None`` means the uniform superposition over the oracle register.
    The count is round(2^key_width · cos²(p·π/2^t)) for the most probable
    control outcome p; 2^t - p is reported alongside it.
    """
    if prep is None:
        prep = Circuit(key_width)
        for qb in range(key_width):
            prep.h(qb)
    layout = _default_layout(prep, oracle, layout)
    return run_counting(prep, oracle, layout, control_width, 1 << key_width)


def estimate_amplitude(prep: Circuit, oracle: OracleSpec, control_width: int,
                       layout: RegisterLayout | None = None) -> float:
    """Good-state probability of A|0…0>, read off the counting peak."""
    layout = _default_layout(prep, oracle, layout)
    res = run_counting(prep, oracle, layout, control_width, 1)
    if not res.resolved:
        warnings.warn(
            f"control width {control_width} cannot resolve the estimate from "
            f"{res.estimated_fraction:.0f}", ResolutionWarning,
        )
    return res.estimated_fraction
