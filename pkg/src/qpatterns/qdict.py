"""The quantum dictionary: key register entangled with a value register
through phase kickback, decoded by the inverse QFT.

Qubit layout of every dictionary circuit::

    key      [0, n)
    value    [n, n + m)
    kick     n + m          eigenstate ancilla for the controlled rotations
    oracle   n + m + 1      scratch qubit, only when an oracle is attached

Encoding: each value qubit j and each source term (weight c, key condition
S) contributes a controlled-RY(2·c·2^j·β) on the kick qubit, controlled by
value qubit j and the key bits in S, with β = 2π/2^m. On the kick
eigenstate (i, 1)/√2 that rotation is the phase e^{i·c·2^j·β}, so value
index r of key k collects r·f(k)·β and the inverse QFT lands it on
f(k) mod 2^m.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .algorithms import (
    CountingResult,
    OracleSpec,
    run_counting,
    amplitude_amplify,
    optimal_iterations,
)
from .circuits import Circuit, qft_circuit, run
from .errors import InvalidArgument
from .state import (
    MAX_QUBITS,
    OutcomeHistogram,
    QuantumState,
    RegisterLayout,
    marginal,
    probabilities,
)

__all__ = [
    "DictionarySpec",
    "CompleteTable",
    "PartialTable",
    "Polynomial",
    "SignedValue",
    "QuboResult",
    "dictionary_layout",
    "classical_values",
    "encode",
    "decode_value",
    "encode_sum_inputs",
    "encode_multiplication",
    "allocate_keys",
    "poisson_masses",
    "encode_distribution",
    "encode_binomial",
    "dictionary_histogram",
    "lookup",
    "count_value_eq",
    "count_value_lt",
    "qubo_minimize",
    "fibonacci_count",
    "fibonacci",
    "fibonacci_count_result",
    "fibonacci_source",
    "sum_inputs_source",
    "binomial_source",
    "distribution_table",
    "source_from_dict",
    "source_to_dict",
    "polynomial_from_dict",
    "spec_from_json",
]


@dataclass(frozen=True)
class DictionarySpec:
    key_width: int
    value_width: int

    def __post_init__(self):
        if self.key_width < 1 or self.value_width < 1:
            raise InvalidArgument("key_width and value_width must both be >= 1")
        # +1 kick qubit; oracle workflows add more and are checked when run
        if self.key_width + self.value_width + 1 > MAX_QUBITS:
            raise InvalidArgument(f"dictionary needs more than {MAX_QUBITS} qubits")

    @property
    def num_keys(self) -> int:
        return 1 << self.key_width

    @property
    def num_values(self) -> int:
        return 1 << self.value_width

    @property
    def base_angle(self) -> float:
        return 2 * math.pi / self.num_values


# -- sources --------------------------------------------------------------

Term = tuple[int, tuple[tuple[int, int], ...]]  # (weight, ((key bit, required value), ...))


@dataclass(frozen=True)
class CompleteTable:
    """One value per key; key k is matched on all n key bits."""

    values: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))

    def terms(self, n: int) -> list[Term]:
        if len(self.values) != 1 << n:
            raise InvalidArgument(f"complete table needs {1 << n} values, got {len(self.values)}")
        return [
            (v, tuple((b, (k >> b) & 1) for b in range(n)))
            for k, v in enumerate(self.values)
            if v != 0
        ]

    def shifted(self, delta: int) -> "CompleteTable":
        return CompleteTable(tuple(v + delta for v in self.values))


@dataclass(frozen=True)
class PartialTable:
    """Values attached to selected keys, controlled on the key's 1-bits only.

    Every key therefore receives the sum of the values of the listed keys
    whose bits it contains; listing keys 01 → 5 and 10 → 7 makes key 11 ↦ 12.
    """

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        pairs = tuple((int(k), int(v)) for k, v in self.pairs)
        keys = [k for k, _ in pairs]
        if len(set(keys)) != len(keys):
            raise InvalidArgument("partial table keys must be distinct")
        object.__setattr__(self, "pairs", pairs)

    def terms(self, n: int) -> list[Term]:
        out = []
        for k, v in self.pairs:
            if not 0 <= k < 1 << n:
                raise InvalidArgument(f"key {k} does not fit {n} key qubits")
            if v:
                out.append((v, tuple((b, 1) for b in range(n) if (k >> b) & 1)))
        return out

    def shifted(self, delta: int) -> "PartialTable":
        pairs = dict(self.pairs)
        pairs[0] = pairs.get(0, 0) + delta
        return PartialTable(tuple(sorted(pairs.items())))


@dataclass(frozen=True)
class Polynomial:
    """constant + Σ l_i x_i + Σ q_ij x_i x_j over binary x.

    ``bit_order="msb"`` puts x_i on the key bit of weight 2^{n-1-i} (x_0 is
    the leftmost key digit); ``"lsb"`` puts it on weight 2^i.
    """

    constant: int = 0
    linear: tuple[int, ...] = ()
    quadratic: tuple[tuple[int, int, int], ...] = ()
    bit_order: str = "msb"

    def __post_init__(self):
        object.__setattr__(self, "constant", int(self.constant))
        object.__setattr__(self, "linear", tuple(int(x) for x in self.linear))
        quad = []
        for i, j, q in self.quadratic:
            i, j = int(i), int(j)
            if i == j:
                raise InvalidArgument(f"quadratic term ({i}, {j}) repeats a variable; use x_i² = x_i")
            quad.append((min(i, j), max(i, j), int(q)))
        object.__setattr__(self, "quadratic", tuple(quad))
        if self.bit_order not in ("msb", "lsb"):
            raise InvalidArgument(f"bit_order must be 'msb' or 'lsb', got {self.bit_order!r}")

    @property
    def num_vars(self) -> int:
        idx = [len(self.linear) - 1]
        for i, j, _ in self.quadratic:
            idx.append(j)
        return max(idx) + 1

    def key_bit(self, i: int, n: int) -> int:
        return n - 1 - i if self.bit_order == "msb" else i

    def variables(self, key: int, n: int) -> list[int]:
        return [(key >> self.key_bit(i, n)) & 1 for i in range(n)]

    def evaluate(self, key: int, n: int) -> int:
        x = self.variables(key, n)
        v = self.constant
        v += sum(l * x[i] for i, l in enumerate(self.linear))
        v += sum(q * x[i] * x[j] for i, j, q in self.quadratic)
        return v

    def terms(self, n: int) -> list[Term]:
        if self.num_vars > n:
            raise InvalidArgument(f"polynomial uses {self.num_vars} variables but only {n} key qubits")
        out: list[Term] = []
        if self.constant:
            out.append((self.constant, ()))
        for i, l in enumerate(self.linear):
            if l:
                out.append((l, ((self.key_bit(i, n), 1),)))
        for i, j, q in self.quadratic:
            if q:
                out.append((q, ((self.key_bit(i, n), 1), (self.key_bit(j, n), 1))))
        return out

    def shifted(self, delta: int) -> "Polynomial":
        return replace(self, constant=self.constant + delta)


Source = CompleteTable | PartialTable | Polynomial


@dataclass(frozen=True)
class SignedValue:
    raw: int
    signed: int

    def __int__(self) -> int:
        return self.signed


def decode_value(raw: int, spec: DictionarySpec, signed: bool = True) -> SignedValue:
    """Raw register reading plus its two's-complement interpretation.

    With ``signed=False`` both fields carry the raw value.
    """
    M = spec.num_values
    if not 0 <= raw < M:
        raise InvalidArgument(f"raw value {raw} outside [0, {M})")
    if not signed:
        return SignedValue(raw, raw)
    return SignedValue(raw, raw - M if raw >= M // 2 else raw)


def classical_values(spec: DictionarySpec, source: Source) -> list[int]:
    """f(k) for every key, evaluated from the same terms the circuit encodes."""
    n = spec.key_width
    vals = []
    terms = source.terms(n)
    for k in range(spec.num_keys):
        total = 0
        for w, cond in terms:
            if all(((k >> b) & 1) == bit for b, bit in cond):
                total += w
        vals.append(total)
    return vals


def _check_range(spec: DictionarySpec, values: Sequence[int], signed_only: bool = False) -> None:
    M = spec.num_values
    fits_signed = all(-M // 2 <= v < M // 2 for v in values)
    fits_unsigned = all(0 <= v < M for v in values)
    if signed_only and not fits_signed:
        bad = [v for v in values if not -M // 2 <= v < M // 2]
        raise InvalidArgument(
            f"values {sorted(set(bad))} do not fit the signed range [{-M // 2}, {M // 2}) of "
            f"{spec.value_width} value qubits"
        )
    if not (fits_signed or fits_unsigned):
        raise InvalidArgument(
            f"values span [{min(values)}, {max(values)}], which fits neither [0, {M}) nor "
            f"[{-M // 2}, {M // 2}) with {spec.value_width} value qubits"
        )


def dictionary_layout(spec: DictionarySpec, with_oracle: bool = True) -> RegisterLayout:
    regs = [("key", spec.key_width), ("value", spec.value_width), ("kick", 1)]
    if with_oracle:
        regs.append(("oracle", 1))
    return RegisterLayout.sequential(*regs)


def _encode_terms(spec: DictionarySpec, terms: list[Term]) -> Circuit:
    m = spec.value_width
    layout = dictionary_layout(spec, with_oracle=False)
    value = layout["value"].qubits
    kick = layout["kick"].offset
    c = Circuit(layout.num_qubits)
    for q in layout["key"].qubits + value:
        c.h(q)
    # (i, 1)/√2 up to a global phase
    c.h(kick).phase(-math.pi / 2, kick)
    M = spec.num_values
    for weight, cond in terms:
        zeros = [b for b, bit in cond if bit == 0]
        keys = [b for b, _ in cond]
        for b in zeros:
            c.x(b)
        for j, vq in enumerate(value):
            mult = (weight << j) % M
            if mult:
                c.ry(2 * mult * spec.base_angle, kick, [vq, *keys])
        for b in zeros:
            c.x(b)
    c.extend(qft_circuit(m, inverse_flag=True, qubits=value, num_qubits=layout.num_qubits))
    c.phase(math.pi / 2, kick).h(kick)
    return c


def encode(spec: DictionarySpec, source: Source) -> Circuit:
    """Circuit leaving |k>|f(k) mod 2^m>|0> in uniform superposition over k."""
    _check_range(spec, classical_values(spec, source))
    return _encode_terms(spec, source.terms(spec.key_width))


def encode_sum_inputs(spec: DictionarySpec, inputs: Sequence[int]) -> Circuit:
    """Input t goes on the key with only bit t set; key k then holds the sum of
    the inputs selected by its 1-bits."""
    if len(inputs) != spec.key_width:
        raise InvalidArgument(f"need exactly {spec.key_width} inputs, got {len(inputs)}")
    return encode(spec, sum_inputs_source(inputs))


def sum_inputs_source(inputs: Sequence[int]) -> PartialTable:
    return PartialTable(tuple((1 << t, int(x)) for t, x in enumerate(inputs)))


def encode_multiplication(spec: DictionarySpec, x0: int) -> Circuit:
    """Key k ↦ k·x0, from the inputs x0·2^t."""
    return encode_sum_inputs(spec, [x0 << t for t in range(spec.key_width)])


def allocate_keys(masses: Sequence[tuple[int, float]], num_keys: int) -> dict[int, int]:
    """Largest-remainder apportionment of ``num_keys`` keys to values.

    Values that end up with no keys are dropped.
    """
    total = sum(p for _, p in masses)
    if abs(total - 1) > 1e-6:
        raise InvalidArgument(f"probabilities sum to {total}, not 1")
    if any(p < 0 for _, p in masses):
        raise InvalidArgument("probabilities must be non-negative")
    quotas = [(v, p * num_keys) for v, p in masses]
    alloc = {v: int(math.floor(q)) for v, q in quotas}
    left = num_keys - sum(alloc.values())
    order = sorted(quotas, key=lambda vq: (-(vq[1] - math.floor(vq[1])), vq[0]))
    for v, _ in order[:left]:
        alloc[v] += 1
    return {v: k for v, k in alloc.items() if k > 0}


def poisson_masses(lam: float, value_width: int) -> list[tuple[int, float]]:
    """Poisson pmf on 0..2^m - 1, renormalized over that truncated support."""
    vals = range(1 << value_width)
    pmf = [math.exp(-lam) * lam**v / math.factorial(v) for v in vals]
    s = sum(pmf)
    return [(v, p / s) for v, p in zip(vals, pmf)]


def distribution_table(spec: DictionarySpec, masses: Sequence[tuple[int, float]]) -> CompleteTable:
    values = [v for v, _ in masses]
    if len(set(values)) != len(values):
        raise InvalidArgument("distribution values must be distinct")
    if len([v for v, p in masses if p > 0]) > spec.num_keys:
        raise InvalidArgument(f"{len(values)} distinct values but only {spec.num_keys} keys")
    alloc = allocate_keys(masses, spec.num_keys)
    table: list[int] = []
    for v in sorted(alloc):
        table.extend([v] * alloc[v])
    return CompleteTable(tuple(table))


def encode_distribution(spec: DictionarySpec, masses: Sequence[tuple[int, float]]) -> Circuit:
    """Complete table in which value v occupies about 2^n·P(v) keys."""
    return encode(spec, distribution_table(spec, masses))


def binomial_source(key_width: int) -> PartialTable:
    return PartialTable(tuple((1 << t, 1) for t in range(key_width)))


def encode_binomial(key_width: int, value_width: int) -> Circuit:
    """Value 1 on every power-of-two key: the value marginal is Binomial(n, 1/2)."""
    if (1 << value_width) <= key_width:
        raise InvalidArgument(
            f"value_width {value_width} cannot hold popcounts up to {key_width}"
        )
    spec = DictionarySpec(key_width, value_width)
    return encode(spec, binomial_source(key_width))


# -- reading a dictionary ---------------------------------------------------

def dictionary_histogram(spec: DictionarySpec, state: QuantumState, cutoff: float = 1e-12) -> OutcomeHistogram:
    """Exact key|value histogram of a dictionary state."""
    layout = RegisterLayout(state.num_qubits, list(dictionary_layout(spec, with_oracle=False)))
    return marginal(probabilities(state, cutoff), layout, ["key", "value"])


def lookup(spec: DictionarySpec, source: Source, key: int, iterations: int | None = None) -> OutcomeHistogram:
    """Amplify one key (and with it, its entangled value).

    The default iteration count is floor(π/(4θ)) with sinθ = 2^{-n/2}.
    """
    if not 0 <= key < spec.num_keys:
        raise InvalidArgument(f"key {key} outside [0, {spec.num_keys})")
    if iterations is None:
        iterations = optimal_iterations(1 / spec.num_keys)
    layout = dictionary_layout(spec)
    prep = encode(spec, source)
    state = amplitude_amplify(prep, OracleSpec.key_match("key", key), iterations, layout)
    hist = marginal(probabilities(state, 1e-12), layout, ["key", "value"])
    hist.metadata["iterations"] = iterations
    return hist


def _count(spec: DictionarySpec, source: Source, oracle: OracleSpec, t: int) -> CountingResult:
    layout = dictionary_layout(spec)
    prep = _encode_terms(spec, source.terms(spec.key_width))
    return run_counting(prep, oracle, layout, t, spec.num_keys)


def count_value_eq(spec: DictionarySpec, source: Source, target_value: int, control_width: int) -> CountingResult:
    """Count keys whose value equals ``target_value`` (read modulo 2^m)."""
    values = classical_values(spec, source)
    _check_range(spec, values)
    M = spec.num_values
    if not -M // 2 <= target_value < M:
        raise InvalidArgument(f"target value {target_value} not representable in {spec.value_width} qubits")
    oracle = OracleSpec.explicit_set("value", [target_value % M])
    return _count(spec, source, oracle, control_width)


def _less_than(spec: DictionarySpec, source: Source, threshold: int) -> tuple[Source, OracleSpec, int]:
    """Shifted source, an oracle recognizing f(k) < threshold, and the shift.

    The plain form subtracts the threshold and tests the sign bit. When that
    shift would push some value out of the signed range, the shift is moved
    to the nearest offset that keeps every value representable and the
    oracle compares against the remaining offset instead.
    """
    values = classical_values(spec, source)
    _check_range(spec, values)
    half = spec.num_values // 2
    lo, hi = min(values), max(values)
    if lo - threshold >= -half and hi - threshold < half:
        return source.shifted(-threshold), OracleSpec.sign_bit("value"), threshold
    shift_min, shift_max = hi - half + 1, lo + half
    if shift_min > shift_max:
        raise InvalidArgument(
            f"value span [{lo}, {hi}] is too wide to compare in {spec.value_width} value qubits"
        )
    shift = min(max(threshold, shift_min), shift_max)
    return source.shifted(-shift), OracleSpec.below("value", threshold - shift), shift


def count_value_lt(spec: DictionarySpec, source: Source, threshold: int, control_width: int) -> CountingResult:
    """Count keys with f(k) < threshold via the sign bit of f(k) - threshold."""
    shifted, oracle, _ = _less_than(spec, source, threshold)
    return _count(spec, shifted, oracle, control_width)


@dataclass
class QuboResult:
    key: int
    value: SignedValue
    trace: list[dict] = field(default_factory=list)
    capped: bool = False


def _sample_one(state: QuantumState, rng: np.random.Generator) -> int:
    probs = np.abs(state.amplitudes) ** 2
    cdf = np.cumsum(probs)
    idx = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
    return min(idx, probs.size - 1)


def qubo_minimize(spec: DictionarySpec, poly: Source, control_width: int, seed: int,
                  max_attempts: int | None = None) -> QuboResult:
    """Iterative descent on the encoded values.

    Start from one measurement of the dictionary. While counting reports at
    least one value below the incumbent, amplify the sign bit of the shifted
    dictionary, measure, and keep the result if it is lower. The iteration
    count is round((π/4)/√fraction), or 0 when that many iterations would
    lower the success probability below the unamplified fraction. Stops when the
    count reaches 0 or after ``max_attempts`` amplified samples (default
    4·2^n), in which case ``capped`` is set.
    """
    rng = np.random.default_rng(seed)
    if max_attempts is None:
        max_attempts = 4 * spec.num_keys
    _check_range(spec, classical_values(spec, poly), signed_only=True)
    layout = dictionary_layout(spec, with_oracle=False)
    key_reg, val_reg = layout["key"], layout["value"]

    idx = _sample_one(run(encode(spec, poly)), rng)
    best_key = int(key_reg.extract(idx))
    best = decode_value(int(val_reg.extract(idx)), spec).signed
    trace: list[dict] = [{"step": "initial", "key": best_key, "value": best}]
    attempts = 0
    while True:
        res = count_value_lt(spec, poly, best, control_width)
        trace.append({"step": "count", "threshold": best, "count": res.estimated_count,
                      "outcomes": list(res.top_outcomes)})
        if res.estimated_count == 0:
            return QuboResult(best_key, decode_value(best % spec.num_values, spec), trace)
        fraction = res.estimated_count / spec.num_keys
        iters = int(round((math.pi / 4) / math.sqrt(fraction)))
        theta = math.asin(math.sqrt(min(fraction, 1.0)))
        if math.sin((2 * iters + 1) * theta) ** 2 < fraction:
            # e.g. fraction 3/4 with one iteration lands on the bad subspace
            iters = 0
        shifted, oracle, shift = _less_than(spec, poly, best)
        full = dictionary_layout(spec)
        state = amplitude_amplify(encode(spec, shifted), oracle, iters, full)
        while True:
            if attempts >= max_attempts:
                return QuboResult(best_key, decode_value(best % spec.num_values, spec), trace, capped=True)
            attempts += 1
            idx = _sample_one(state, rng)
            k = int(full["key"].extract(idx))
            v = decode_value(int(full["value"].extract(idx)), spec).signed + shift
            trace.append({"step": "sample", "iterations": iters, "key": k, "value": v})
            if v < best:
                best, best_key = v, k
                break


def fibonacci(k: int) -> int:
    a, b = 0, 1
    for _ in range(k):
        a, b = b, a + b
    return a


def fibonacci_source(n: int) -> Polynomial:
    return Polynomial(0, (), tuple((i, i + 1, 1) for i in range(n - 1)))


def fibonacci_count(n: int, control_width: int) -> int:
    """Count length-n bit strings without adjacent ones (= Fibonacci(n+2))."""
    return fibonacci_count_result(n, control_width).estimated_count


def fibonacci_count_result(n: int, control_width: int) -> CountingResult:
    if n < 1:
        raise InvalidArgument("n must be >= 1")
    # values are 0..n-1, unsigned
    m = max(1, (n - 1).bit_length())
    spec = DictionarySpec(n, m)
    return count_value_eq(spec, fibonacci_source(n), 0, control_width)


# -- JSON -----------------------------------------------------------------

def source_from_dict(doc: dict) -> Source:
    if not isinstance(doc, dict) or "type" not in doc:
        raise InvalidArgument("source.type: missing")
    kind = doc["type"]
    try:
        if kind == "table":
            return CompleteTable(tuple(doc["values"]))
        if kind == "partial":
            return PartialTable(tuple(tuple(p) for p in doc["pairs"]))
        if kind == "polynomial":
            return polynomial_from_dict(doc)
    except KeyError as exc:
        raise InvalidArgument(f"source.{exc.args[0]}: missing") from None
    except (TypeError, ValueError) as exc:
        raise InvalidArgument(f"source: {exc}") from None
    raise InvalidArgument(f"source.type: unknown {kind!r} (expected table, partial or polynomial)")


def polynomial_from_dict(doc: dict) -> Polynomial:
    quad = doc.get("quadratic", [])
    if not all(isinstance(q, (list, tuple)) and len(q) == 3 for q in quad):
        raise InvalidArgument("quadratic: expected a list of [i, j, q] triples")
    return Polynomial(
        doc.get("constant", 0),
        tuple(doc.get("linear", [])),
        tuple(tuple(q) for q in quad),
        doc.get("bit_order", "msb"),
    )


def spec_from_json(text: str) -> tuple[DictionarySpec, Source]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidArgument(f"dictionary: malformed JSON ({exc.msg})") from None
    for k in ("key_width", "value_width", "source"):
        if k not in doc:
            raise InvalidArgument(f"{k}: missing")
    return DictionarySpec(int(doc["key_width"]), int(doc["value_width"])), source_from_dict(doc["source"])


def source_to_dict(source: Source) -> dict:
    if isinstance(source, CompleteTable):
        return {"type": "table", "values": list(source.values)}
    if isinstance(source, PartialTable):
        return {"type": "partial", "pairs": [list(p) for p in source.pairs]}
    return {
        "type": "polynomial",
        "constant": source.constant,
        "linear": list(source.linear),
        "quadratic": [list(q) for q in source.quadratic],
        "bit_order": source.bit_order,
    }
