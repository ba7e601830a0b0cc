"""Command-line front end.

Each subcommand runs one library workflow and prints a histogram or a
result summary as text, CSV, JSON or SVG. Exit status: 0 on success, 2 on
invalid input, 3 when a result carries a resolution or iteration-cap flag.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .algorithms import (
    CountingResult,
    OracleSpec,
    count_from_outcome,
    grover_search,
    optimal_iterations,
    phase_estimation,
    quantum_count,
    ry_eigen_config,
)
from .circuits import Circuit, run
from .errors import InvalidArgument
from .qdict import (
    CompleteTable,
    DictionarySpec,
    binomial_source,
    classical_values,
    count_value_eq,
    count_value_lt,
    decode_value,
    dictionary_layout,
    dictionary_histogram,
    distribution_table,
    encode,
    fibonacci_count_result,
    lookup,
    poisson_masses,
    polynomial_from_dict,
    qubo_minimize,
    spec_from_json,
    sum_inputs_source,
)
from .render import render_complex_histogram, render_histogram
from .state import OutcomeHistogram, marginal, probabilities, sample, sample_histogram

EXIT_OK, EXIT_INVALID, EXIT_FLAGGED = 0, 2, 3
SEED_ENV = "QDICT_SEED"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # one-line diagnostics instead of usage dumps
        raise UsageError(message)


@dataclass
class Outcome:
    """What a command produced, before formatting."""

    command: str
    summary: dict = field(default_factory=dict)
    histogram: OutcomeHistogram | None = None
    annotate: object = None
    flagged: bool = False
    text_override: str | None = None


# -- argument helpers ------------------------------------------------------

def _int_list(text: str, name: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x != ""]
    except ValueError:
        raise InvalidArgument(f"{name}: expected comma-separated integers, got {text!r}") from None


def _load_json(text: str, name: str):
    """Inline JSON, or a path to a JSON file."""
    stripped = text.lstrip()
    if not stripped.startswith(("{", "[")):
        p = Path(text)
        if not p.is_file():
            raise InvalidArgument(f"{name}: no such file {text!r}")
        stripped = p.read_text()
    try:
        return json.loads(stripped)
    except json.JSONDecodeError as exc:
        raise InvalidArgument(f"{name}: malformed JSON ({exc.msg} at line {exc.lineno})") from None


def _seed(args) -> int | None:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is None or env.strip() == "":
        return None
    try:
        return int(env)
    except ValueError:
        raise InvalidArgument(f"{SEED_ENV}: expected an integer, got {env!r}") from None


def _sampling(args) -> tuple[int | None, int | None]:
    if args.shots is None:
        return None, None
    if args.shots < 1:
        raise InvalidArgument("shots: must be >= 1")
    seed = _seed(args)
    if seed is None:
        raise InvalidArgument(f"seed: required with --shots (or set {SEED_ENV})")
    return args.shots, seed


def _maybe_sample(hist: OutcomeHistogram, args) -> OutcomeHistogram:
    shots, seed = _sampling(args)
    return hist if shots is None else sample_histogram(hist, shots, seed)


def _positive(value: int, name: str, low: int = 1) -> int:
    if value < low:
        raise InvalidArgument(f"{name}: must be >= {low}, got {value}")
    return value


def _value_annotator(spec: DictionarySpec, hist: OutcomeHistogram):
    key_off = dict((f[0], f[1]) for f in hist.fields or ())
    def annotate(index: int) -> str:
        key = (index >> key_off.get("key", 0)) & (spec.num_keys - 1)
        raw = (index >> key_off.get("value", 0)) & (spec.num_values - 1)
        sv = decode_value(raw, spec)
        return f"key={key} value={sv.raw} signed={sv.signed}"
    return annotate


def _counting_summary(res: CountingResult, hist: OutcomeHistogram) -> tuple[dict, bool]:
    """Summary of a counting run; in shots mode the peak comes from the samples."""
    t = res.control_width
    if hist.exact:
        peak, (p, q), count, frac = res.peak_probability, res.top_outcomes, res.estimated_count, res.estimated_fraction
        resolved = res.resolved
    else:
        p = hist.most_probable()
        q = ((1 << t) - p) % (1 << t)
        mult = res.extra["multiplier"]
        frac, count = count_from_outcome(p, t, mult)
        peak = hist.probability(p)
        resolved = not (p in (0, (1 << t) // 2) and peak < 0.5)
    summary = {
        "control_width": t,
        "peak_outcomes": [p, q],
        "peak_probability": round(peak, 12),
        "estimated_fraction": round(frac, 12),
        "estimated_count": count,
        "resolved": resolved,
    }
    return summary, not resolved


# -- sources for the dictionary commands ----------------------------------

def _add_source_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("dictionary source (pick one)")
    g.add_argument("--dict", help="dictionary JSON (inline or a file path)")
    g.add_argument("--table", help="complete table, comma-separated values for keys 0..2^n-1")
    g.add_argument("--poly", help='polynomial JSON, e.g. {"constant":0,"linear":[..],"quadratic":[[i,j,q],..]}')
    g.add_argument("--inputs", help="comma-separated inputs; key k holds the sum of the inputs on its 1-bits")
    g.add_argument("--multiply", type=int, metavar="X0", help="key k holds k*X0")
    p.add_argument("--key-width", type=int, help="key qubits (inferred where possible)")
    p.add_argument("--value-width", type=int, help="value qubits")


def _source(args) -> tuple[DictionarySpec, object]:
    chosen = [n for n in ("dict", "table", "poly", "inputs", "multiply") if getattr(args, n) is not None]
    if len(chosen) != 1:
        raise InvalidArgument("source: give exactly one of --dict, --table, --poly, --inputs, --multiply")
    kind = chosen[0]
    if kind == "dict":
        doc = _load_json(args.dict, "dict")
        spec, source = spec_from_json(json.dumps(doc))
        return spec, source
    n = args.key_width
    if kind == "table":
        values = _int_list(args.table, "table")
        if not values:
            raise InvalidArgument("table: empty")
        width = max(1, (len(values) - 1).bit_length())
        if len(values) != 1 << width:
            raise InvalidArgument(f"table: length {len(values)} is not a power of two")
        n = n or width
        if n != width:
            raise InvalidArgument(f"key_width: table has {len(values)} entries, needs key width {width}")
        source = CompleteTable(tuple(values))
    elif kind == "poly":
        doc = _load_json(args.poly, "poly")
        if not isinstance(doc, dict):
            raise InvalidArgument("poly: expected a JSON object")
        source = polynomial_from_dict(doc)
        n = n or source.num_vars
    elif kind == "inputs":
        values = _int_list(args.inputs, "inputs")
        n = n or len(values)
        if len(values) != n:
            raise InvalidArgument(f"key_width: {len(values)} inputs need key width {len(values)}")
        source = sum_inputs_source(values)
    else:
        if n is None:
            raise InvalidArgument("key_width: required with --multiply")
        source = sum_inputs_source([args.multiply << t for t in range(n)])
    if n is None or n < 1:
        raise InvalidArgument("key_width: required")
    if args.value_width is None:
        raise InvalidArgument("value_width: required")
    return DictionarySpec(n, args.value_width), source


# -- commands --------------------------------------------------------------

def cmd_simulate(args) -> Outcome:
    doc = _load_json(args.circuit, "circuit")
    circ = Circuit.from_dict(doc)
    state = run(circ)
    if args.complex:
        if args.format not in ("text", "svg"):
            raise InvalidArgument("format: --complex renders as text or svg")
        return Outcome("simulate", text_override=render_complex_histogram(state, args.format))
    hist = probabilities(state, 1e-15)
    shots, seed = _sampling(args)
    if shots is not None:
        hist = sample(state, shots, seed)
    return Outcome("simulate", {"num_qubits": circ.num_qubits, "gates": len(circ)}, hist)


def cmd_pe(args) -> Outcome:
    t = _positive(args.control, "control")
    cfg = ry_eigen_config(args.p, t)
    res = phase_estimation(cfg, return_result=True)
    hist = _maybe_sample(res.histogram, args)
    summary = {"p": args.p, "control_width": t, "most_probable": hist.most_probable()}
    return Outcome("pe", summary, hist)


def _labels(text: str, width: int, name: str) -> list[int]:
    out = []
    for tok in text.replace(" ", "").split(","):
        if not tok:
            continue
        try:
            v = int(tok, 2) if len(tok) == width and set(tok) <= {"0", "1"} else int(tok)
        except ValueError:
            raise InvalidArgument(f"{name}: bad label {tok!r}") from None
        if not 0 <= v < 1 << width:
            raise InvalidArgument(f"{name}: label {tok!r} outside width {width}")
        out.append(v)
    if not out:
        raise InvalidArgument(f"{name}: at least one label required")
    return out


def cmd_grover(args) -> Outcome:
    w = _positive(args.width, "width")
    marked = _labels(args.marked, w, "marked")
    oracle = OracleSpec.explicit_set("data", marked)
    k = args.iterations
    if k is None:
        k = optimal_iterations(len(set(marked)) / (1 << w))
    _positive(k, "iterations", 0)
    hist = _maybe_sample(grover_search(oracle, w, k), args)
    good = sum(hist.probability(m) for m in set(marked))
    return Outcome("grover", {"width": w, "marked": sorted(set(marked)), "iterations": k,
                              "marked_probability": round(good, 12)}, hist)


def cmd_count(args) -> Outcome:
    w = _positive(args.width, "width")
    t = _positive(args.control, "control", 2)
    if args.oracle == "parity":
        oracle = OracleSpec.parity("data", even=not args.odd)
    else:
        if args.labels is None:
            raise InvalidArgument("labels: required for the set oracle")
        oracle = OracleSpec.explicit_set("data", _labels(args.labels, w, "labels"))
    res = quantum_count(oracle, t, w)
    hist = _maybe_sample(res.outcome_histogram, args)
    summary, flagged = _counting_summary(res, hist)
    return Outcome("count", {"width": w, **summary}, hist, flagged=flagged)


def cmd_qdict_encode(args) -> Outcome:
    spec, source = _source(args)
    hist = dictionary_histogram(spec, run(encode(spec, source)))
    hist = _maybe_sample(hist, args)
    summary = {"key_width": spec.key_width, "value_width": spec.value_width}
    return Outcome("qdict-encode", summary, hist, _value_annotator(spec, hist))


def cmd_qdict_lookup(args) -> Outcome:
    spec, source = _source(args)
    key = _labels(args.key, spec.key_width, "key")[0]
    hist = lookup(spec, source, key, args.iterations)
    iters = hist.metadata["iterations"]
    hist = _maybe_sample(hist, args)
    top = hist.most_probable()
    sv = decode_value((top >> spec.key_width) & (spec.num_values - 1), spec)
    summary = {"key": key, "iterations": iters, "top_label": hist.label(top),
               "top_probability": round(hist.probability(top), 12),
               "value_raw": sv.raw, "value_signed": sv.signed}
    return Outcome("qdict-lookup", summary, hist, _value_annotator(spec, hist))


def _qdict_count(args, name: str, fn, target: int) -> Outcome:
    spec, source = _source(args)
    t = _positive(args.control, "control", 2)
    res = fn(spec, source, target, t)
    hist = _maybe_sample(res.outcome_histogram, args)
    summary, flagged = _counting_summary(res, hist)
    classical = sum(1 for v in classical_values(spec, source)
                    if (v % spec.num_values == target % spec.num_values if name.endswith("eq") else v < target))
    return Outcome(name, {**summary, "classical_count": classical}, hist, flagged=flagged)


def cmd_qdict_count_eq(args) -> Outcome:
    return _qdict_count(args, "qdict-count-eq", count_value_eq, args.target)


def cmd_qdict_count_lt(args) -> Outcome:
    return _qdict_count(args, "qdict-count-lt", count_value_lt, args.threshold)


def cmd_qubo_min(args) -> Outcome:
    if args.poly is None:
        raise InvalidArgument("poly: required")
    for n in ("dict", "table", "inputs", "multiply"):
        setattr(args, n, None)
    spec, poly = _source(args)
    t = _positive(args.control, "control", 2)
    seed = _seed(args)
    if seed is None:
        raise InvalidArgument(f"seed: required (or set {SEED_ENV})")
    res = qubo_minimize(spec, poly, t, seed, args.max_attempts)
    summary = {
        "minimum": res.value.signed,
        "minimum_raw": format(res.value.raw, f"0{spec.value_width}b"),
        "key": format(res.key, f"0{spec.key_width}b"),
        "capped": res.capped,
        "rounds": sum(1 for s in res.trace if s["step"] == "count"),
        "samples": sum(1 for s in res.trace if s["step"] == "sample"),
        "seed": seed,
    }
    return Outcome("qubo-min", summary, None, flagged=res.capped)


def cmd_subset_sum(args) -> Outcome:
    values = _int_list(args.set, "set")
    if not values:
        raise InvalidArgument("set: empty")
    spec = DictionarySpec(len(values), _positive(args.value_width, "value_width"))
    source = sum_inputs_source(values)
    t = _positive(args.control, "control", 2)
    if args.mode == "zero":
        res = count_value_eq(spec, source, 0, t)
    else:
        res = count_value_lt(spec, source, 0, t)
    hist = _maybe_sample(res.outcome_histogram, args)
    summary, flagged = _counting_summary(res, hist)
    return Outcome("subset-sum", {"set": values, "mode": args.mode, **summary}, hist, flagged=flagged)


def cmd_fibonacci(args) -> Outcome:
    n = _positive(args.n, "n")
    t = _positive(args.control, "control", 2)
    res = fibonacci_count_result(n, t)
    hist = _maybe_sample(res.outcome_histogram, args)
    summary, flagged = _counting_summary(res, hist)
    return Outcome("fibonacci", {"n": n, **summary}, hist, flagged=flagged)


def cmd_dist(args) -> Outcome:
    n = _positive(args.key_width, "key_width")
    m = _positive(args.value_width, "value_width")
    spec = DictionarySpec(n, m)
    if args.kind == "binomial":
        source = binomial_source(n)
        if (1 << m) <= n:
            raise InvalidArgument(f"value_width: {m} qubits cannot hold counts up to {n}")
    else:
        if args.lam is None or not args.lam > 0:
            raise InvalidArgument("lam: a positive rate is required for poisson")
        source = distribution_table(spec, poisson_masses(args.lam, m))
    state = run(encode(spec, source))
    hist = marginal(probabilities(state, 1e-15), dictionary_layout(spec, with_oracle=False), "value")
    hist = _maybe_sample(hist, args)
    summary = {"kind": args.kind, "key_width": n, "value_width": m}
    if args.kind == "poisson":
        summary["lam"] = args.lam
        summary["keys_per_value"] = {str(v): source.values.count(v) for v in sorted(set(source.values))}
    return Outcome("dist", summary, hist)


COMMANDS = {
    "simulate": cmd_simulate,
    "pe": cmd_pe,
    "grover": cmd_grover,
    "count": cmd_count,
    "qdict-encode": cmd_qdict_encode,
    "qdict-lookup": cmd_qdict_lookup,
    "qdict-count-eq": cmd_qdict_count_eq,
    "qdict-count-lt": cmd_qdict_count_lt,
    "qubo-min": cmd_qubo_min,
    "subset-sum": cmd_subset_sum,
    "fibonacci": cmd_fibonacci,
    "dist": cmd_dist,
}


# -- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    mode = common.add_mutually_exclusive_group()
    mode.add_argument("--exact", dest="shots", action="store_const", const=None,
                      help="exact probabilities (default)")
    mode.add_argument("--shots", type=int, help="sample this many shots instead")
    common.add_argument("--seed", type=int, help=f"PRNG seed (falls back to ${SEED_ENV})")
    common.add_argument("--format", choices=["text", "csv", "json", "svg"], default="text")
    common.add_argument("--output", help="write to this file instead of stdout")

    parser = _Parser(prog="qpatterns", description="Statevector workflows and quantum dictionaries.")
    parser.add_argument("--version", action="version", version=f"qpatterns {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)

    p = sub.add_parser("simulate", parents=[common], help="run a circuit JSON file")
    p.add_argument("--circuit", required=True, help="circuit JSON (inline or a file path)")
    p.add_argument("--complex", action="store_true", help="render amplitudes as magnitude bars and phase arrows")

    p = sub.add_parser("pe", parents=[common], help="phase estimation of RY on its eigenstate")
    p.add_argument("--p", type=float, required=True, help="phase parameter; eigenphase is p·2π/2^control")
    p.add_argument("--control", type=int, required=True, help="control qubits")

    p = sub.add_parser("grover", parents=[common], help="Grover search for marked labels")
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--marked", required=True, help="comma-separated labels (binary or decimal)")
    p.add_argument("--iterations", type=int, help="default: floor(pi/(4*theta))")

    p = sub.add_parser("count", parents=[common], help="quantum counting on a uniform register")
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--control", type=int, required=True)
    p.add_argument("--oracle", choices=["parity", "set"], default="parity")
    p.add_argument("--odd", action="store_true", help="parity oracle marks odd states")
    p.add_argument("--labels", help="labels for the set oracle")

    p = sub.add_parser("qdict-encode", parents=[common], help="key|value histogram of a dictionary")
    _add_source_args(p)

    p = sub.add_parser("qdict-lookup", parents=[common], help="amplify one key of a dictionary")
    _add_source_args(p)
    p.add_argument("--key", required=True, help="key label (binary or decimal)")
    p.add_argument("--iterations", type=int)

    p = sub.add_parser("qdict-count-eq", parents=[common], help="count keys whose value equals a target")
    _add_source_args(p)
    p.add_argument("--target", type=int, required=True)
    p.add_argument("--control", type=int, required=True)

    p = sub.add_parser("qdict-count-lt", parents=[common], help="count keys whose value is below a threshold")
    _add_source_args(p)
    p.add_argument("--threshold", type=int, required=True)
    p.add_argument("--control", type=int, required=True)

    p = sub.add_parser("qubo-min", parents=[common], help="minimize a quadratic binary polynomial")
    _add_source_args(p)
    p.add_argument("--control", type=int, required=True)
    p.add_argument("--max-attempts", type=int)

    p = sub.add_parser("subset-sum", parents=[common], help="count subsets summing to zero or below zero")
    p.add_argument("--set", required=True, help="comma-separated integers")
    p.add_argument("--value-width", type=int, required=True)
    p.add_argument("--control", type=int, required=True)
    p.add_argument("--mode", choices=["zero", "negative"], default="zero")

    p = sub.add_parser("fibonacci", parents=[common], help="count bit strings without adjacent ones")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--control", type=int, required=True)

    p = sub.add_parser("dist", parents=[common], help="value marginal of a distribution dictionary")
    p.add_argument("--kind", choices=["binomial", "poisson"], required=True)
    p.add_argument("--key-width", type=int, required=True)
    p.add_argument("--value-width", type=int, required=True)
    p.add_argument("--lam", type=float, help="Poisson rate")
    return parser


# -- output ----------------------------------------------------------------

def _summary_text(out: Outcome) -> str:
    lines = [f"command: {out.command}"]
    for k, v in out.summary.items():
        lines.append(f"{k}: {json.dumps(v) if isinstance(v, (list, dict, bool)) else v}")
    return "\n".join(lines) + "\n"


def render(out: Outcome, fmt: str) -> str:
    if out.text_override is not None:
        return out.text_override
    if fmt == "text":
        text = _summary_text(out)
        if out.histogram is not None:
            text += "\n" + render_histogram(out.histogram, "text", out.annotate)
        return text
    if fmt == "json":
        doc = {"command": out.command, "summary": out.summary}
        if out.histogram is not None:
            doc["histogram"] = json.loads(out.histogram.to_json())
        return json.dumps(doc, indent=2) + "\n"
    if fmt == "csv":
        if out.histogram is not None:
            return out.histogram.to_csv()
        rows = ["field,value"] + [f"{k},{json.dumps(v) if not isinstance(v, str) else v}"
                                  for k, v in out.summary.items()]
        return "\n".join(rows) + "\n"
    if out.histogram is None:
        raise InvalidArgument(f"format: {out.command} has no histogram to draw as svg")
    return render_histogram(out.histogram, "svg")


def execute(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    """Parse ``argv``, run the command and write its output. Returns the exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("command: missing (try --help)")
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            out = COMMANDS[args.command](args)
        text = render(out, args.format)
    except (UsageError, InvalidArgument) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INVALID
    except (KeyError, TypeError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_INVALID
    if args.output:
        Path(args.output).write_text(text)
    else:
        stdout.write(text)
    return EXIT_FLAGGED if out.flagged else EXIT_OK


def main(argv: list[str] | None = None) -> None:
    sys.exit(execute(argv))


if __name__ == "__main__":
    main()
