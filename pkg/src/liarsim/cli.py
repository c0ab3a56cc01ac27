"""Command-line front end: simulate, verify, metrics, estimate, truthtable.

Every command emits one JSON report with a fixed envelope (command, config,
seed, inputs with sha256 hashes of any files read, plus command-specific
fields).  JSON is rendered canonically (sorted keys, two-space indent), so a
rerun with the same arguments writes byte-identical output.  --pretty swaps
stdout to a human rendering; --out always receives the canonical JSON.

Exit codes: 0 success, 1 usage error, 2 verification failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np

from .circuit import (OR_ACCUMULATE, PARITY, Circuit, PairLayout,
                      build_general, build_liar_literal, build_liar_reference,
                      gate_census, load_circuit, save_circuit)
from .dist import (COUNTS, PROBABILITY, Distribution, bundled_table_names,
                   load_reference_table, read_distribution_csv,
                   write_counts_csv)
from .hardware_model import (CouplingGraph, NoiseProfile, load_bundled_graph,
                             make_graph, noisy_sample, routing_estimate)
from .logic_ops import (MAX_PAIRS, fixed_point_report, truth_table,
                        verification_suite)
from .metrics import MetricsConfig, full_report
from .statevec import DEFAULT_SEED, probabilities, run_circuit, sample_counts

USAGE_EXIT = 1
VERIFY_EXIT = 2
IO_EXIT = 3

TRUTHTABLE_MAX_PAIRS = 6
BUNDLED_GRAPH_ARG = "bundled:heavy-hex"


class CliError(Exception):
    """Carries the process exit code alongside the message."""

    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad flags; this tool reserves 2 for
    verification failures, so usage problems exit 1 instead."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_EXIT, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# shared plumbing

def _json_default(value):
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    raise TypeError(f"not JSON serializable: {type(value)!r}")


def _strict_numbers(value):
    """Strict JSON has no Infinity/NaN literals; encode them as strings so the
    reports stay parseable outside Python (the chi-squared statistic is inf
    whenever observed counts land on an outcome the ideal forbids)."""
    if isinstance(value, (float, np.floating)) and not math.isfinite(value):
        if math.isnan(value):
            return "nan"
        return "inf" if float(value) > 0 else "-inf"
    if isinstance(value, dict):
        return {k: _strict_numbers(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_strict_numbers(v) for v in value]
    return value


def canonical_json(payload: dict) -> str:
    return json.dumps(_strict_numbers(payload), indent=2, sort_keys=True,
                      allow_nan=False, default=_json_default) + "\n"


def _sha256_file(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _emit(payload: dict, args, pretty_lines: list[str]) -> None:
    """Write canonical JSON to --out if given; stdout gets the pretty text
    under --pretty, otherwise the JSON (suppressed when --out already has it)."""
    text = canonical_json(payload)
    if args.out:
        try:
            Path(args.out).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise CliError(IO_EXIT, f"cannot write {args.out}: {exc}") from exc
    if args.pretty:
        sys.stdout.write("\n".join(pretty_lines) + "\n")
    elif not args.out:
        sys.stdout.write(text)


def _parse_noise(text: str, seed: int) -> NoiseProfile:
    parts = text.split(",")
    if len(parts) != 3:
        raise CliError(USAGE_EXIT, "--noise needs three values: p1q,p2q,pread")
    try:
        p_1q, p_2q, p_readout = (float(x) for x in parts)
    except ValueError as exc:
        raise CliError(USAGE_EXIT, f"--noise values must be numbers: {text!r}") from exc
    try:
        return NoiseProfile(p_1q=p_1q, p_2q=p_2q, p_readout=p_readout, seed=seed)
    except ValueError as exc:
        raise CliError(USAGE_EXIT, str(exc)) from exc


def _parse_state_set(text: str | None) -> tuple[str, ...] | None:
    if text is None:
        return None
    states = tuple(s.strip() for s in text.split(",") if s.strip())
    if not states:
        raise CliError(USAGE_EXIT, "empty state set")
    return states


def _noise_dict(profile: NoiseProfile) -> dict:
    return {"p_1q": profile.p_1q, "p_2q": profile.p_2q,
            "p_readout": profile.p_readout}


# ---------------------------------------------------------------------------
# simulate

def _resolve_circuit(args, inputs: dict) -> tuple[Circuit, str]:
    name = args.circuit
    if name == "liar-reference":
        return build_liar_reference(), name
    if name == "liar-literal":
        return build_liar_literal(), name
    if name == "general":
        if args.pairs < 1:
            raise CliError(USAGE_EXIT, f"--pairs must be >= 1, got {args.pairs}")
        mode = PARITY if args.mode == "parity" else OR_ACCUMULATE
        try:
            circuit = build_general(PairLayout.default(args.pairs), mode,
                                    with_phase=args.with_phase)
        except ValueError as exc:
            raise CliError(USAGE_EXIT, str(exc)) from exc
        return circuit, f"general(pairs={args.pairs}, mode={args.mode})"
    path = Path(name)
    if not path.is_file():
        raise CliError(IO_EXIT, f"no such circuit: {name} (expected a named "
                                f"circuit or a circuit JSON file)")
    try:
        circuit = load_circuit(path)
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        raise CliError(IO_EXIT, f"cannot parse circuit file {name}: {exc}") from exc
    inputs[str(path)] = _sha256_file(path)
    return circuit, str(path)


def cmd_simulate(args) -> int:
    if args.noise is not None and args.shots is None:
        raise CliError(USAGE_EXIT, "--noise requires --shots")
    if args.csv is not None and args.shots is None:
        raise CliError(USAGE_EXIT, "--csv requires --shots")
    if args.shots is not None and args.shots < 1:
        raise CliError(USAGE_EXIT, f"--shots must be >= 1, got {args.shots}")

    inputs: dict = {}
    circuit, source = _resolve_circuit(args, inputs)
    profile = _parse_noise(args.noise, args.seed) if args.noise else None

    try:
        state = run_circuit(circuit)
    except ValueError as exc:
        raise CliError(USAGE_EXIT, str(exc)) from exc
    probs = probabilities(state)

    counts = None
    if args.shots is not None:
        if profile is not None:
            counts = noisy_sample(circuit, profile, args.shots)
        else:
            counts = sample_counts(state, args.shots, args.seed)

    if args.circuit_out:
        try:
            save_circuit(circuit, args.circuit_out)
        except OSError as exc:
            raise CliError(IO_EXIT, f"cannot write {args.circuit_out}: {exc}") from exc
    if args.csv and counts is not None:
        try:
            write_counts_csv(counts, args.csv)
        except OSError as exc:
            raise CliError(IO_EXIT, f"cannot write {args.csv}: {exc}") from exc

    census = gate_census(circuit)
    payload = {
        "command": "simulate",
        "config": {
            "circuit": source,
            "pairs": args.pairs if args.circuit == "general" else None,
            "mode": args.mode if args.circuit == "general" else None,
            "with_phase": args.with_phase if args.circuit == "general" else None,
            "shots": args.shots,
            "noise": _noise_dict(profile) if profile else None,
        },
        "seed": args.seed,
        "inputs": inputs,
        "num_qubits": circuit.num_qubits,
        "gate_count": len(circuit.gates),
        "census": dataclasses.asdict(census),
        "probabilities": dict(probs.entries),
        "counts": {k: int(v) for k, v in counts.entries.items()} if counts else None,
    }

    pretty = [f"circuit: {source} ({circuit.num_qubits} qubits, "
              f"{len(circuit.gates)} gates, depth {census.depth})",
              "probabilities:"]
    for state_str in sorted(probs.entries):
        pretty.append(f"  {state_str}  {probs.entries[state_str]:.12f}")
    if counts is not None:
        noise_tag = " (noisy)" if profile else ""
        pretty.append(f"counts over {args.shots} shots{noise_tag}, seed {args.seed}:")
        for state_str in sorted(counts.entries):
            pretty.append(f"  {state_str}  {int(counts.entries[state_str])}")
    _emit(payload, args, pretty)
    return 0


# ---------------------------------------------------------------------------
# verify

def cmd_verify(args) -> int:
    if not 1 <= args.pairs <= MAX_PAIRS:
        raise CliError(USAGE_EXIT,
                       f"--pairs must be in 1..{MAX_PAIRS}, got {args.pairs}")
    checks = verification_suite(args.pairs)
    fixed = fixed_point_report(args.pairs)
    all_passed = all(c.passed for c in checks)

    payload = {
        "command": "verify",
        "config": {"pairs": args.pairs},
        "seed": args.seed,
        "inputs": {},
        "checks": [dataclasses.asdict(c) for c in checks],
        "all_passed": all_passed,
        "fixed_points": dataclasses.asdict(fixed),
    }
    pretty = [f"identity suite on {args.pairs} pair(s):"]
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        pretty.append(f"  {status}  {c.name}  (max deviation {c.max_deviation:.3e})")
        if c.detail:
            pretty.append(f"        {c.detail}")
    pretty.append(fixed.note)
    pretty.append("all checks passed" if all_passed else "SOME CHECKS FAILED")
    _emit(payload, args, pretty)
    if not all_passed:
        print("verification failed", file=sys.stderr)
        return VERIFY_EXIT
    return 0


# ---------------------------------------------------------------------------
# metrics

def _resolve_distribution(source: str, column: str, inputs: dict) -> tuple[Distribution, str]:
    if source.startswith("bundled:"):
        arm = source.split(":", 1)[1]
        if arm not in bundled_table_names():
            raise CliError(USAGE_EXIT,
                           f"unknown bundled table {arm!r}; "
                           f"choose from {', '.join(bundled_table_names())}")
        wanted = PROBABILITY if column == "auto" else column
        return load_reference_table(arm, column=wanted), source
    if source in ("liar-reference", "liar-literal"):
        builder = build_liar_reference if source == "liar-reference" else build_liar_literal
        return probabilities(run_circuit(builder())), source
    path = Path(source)
    if not path.is_file():
        raise CliError(IO_EXIT, f"no such distribution file: {source}")
    try:
        dist = read_distribution_csv(path, column=column)
    except ValueError as exc:
        raise CliError(IO_EXIT, f"cannot parse {source}: {exc}") from exc
    inputs[str(path)] = _sha256_file(path)
    return dist, str(path)


def cmd_metrics(args) -> int:
    inputs: dict = {}
    experimental, exp_source = _resolve_distribution(args.exp, args.column, inputs)
    ideal, ideal_source = _resolve_distribution(args.ideal, args.column, inputs)

    config = MetricsConfig(
        consistent_set=_parse_state_set(args.consistent_set),
        paradox_set=_parse_state_set(args.paradox_set),
        flag_index=args.flag_index,
    )
    try:
        report = full_report(experimental, ideal, config)
    except ValueError as exc:
        raise CliError(USAGE_EXIT, str(exc)) from exc

    payload = {
        "command": "metrics",
        "config": {
            "exp": args.exp,
            "ideal": args.ideal,
            "column": args.column,
            "consistent_set": list(config.consistent_set) if config.consistent_set else None,
            "paradox_set": list(config.paradox_set) if config.paradox_set else None,
            "flag_index": config.flag_index,
        },
        "seed": args.seed,
        "inputs": inputs,
        "sources": {
            "experimental": {"source": exp_source, "kind": experimental.kind,
                             "total": experimental.total()},
            "ideal": {"source": ideal_source, "kind": ideal.kind,
                      "total": ideal.total()},
        },
        "report": report.to_dict(),
    }

    def fmt(value, digits=6):
        return "n/a" if value is None else f"{value:.{digits}f}"

    pretty = [
        f"experimental: {exp_source} ({experimental.kind})",
        f"ideal:        {ideal_source} ({ideal.kind})",
        f"F_C(experimental) = {fmt(report.f_c_experimental)}",
        f"F_C(ideal)        = {fmt(report.f_c_ideal)}",
        f"D_TV              = {fmt(report.d_tv)}",
        f"R_I               = {fmt(report.r_i)}"
        + (f"   ({report.r_i_note})" if report.r_i_note else ""),
        f"chi2 statistic    = {fmt(report.chi2_statistic, 4)}"
        + (f"  dof {report.chi2_dof}  p {fmt(report.chi2_p_value, 4)}"
           if report.chi2_statistic is not None else ""),
    ]
    if report.chi2_note:
        pretty.append(f"chi2 note: {report.chi2_note}")
    pretty.append(f"<Z_flag>(experimental) = {fmt(report.z_flag_experimental)}")
    pretty.append(f"<Z_flag>(ideal)        = {fmt(report.z_flag_ideal)}")
    _emit(payload, args, pretty)
    return 0


# ---------------------------------------------------------------------------
# estimate

def _resolve_graph(source: str, size: int | None, needed: int,
                   inputs: dict) -> tuple[CouplingGraph, str]:
    if source == BUNDLED_GRAPH_ARG:
        return load_bundled_graph(), source
    if source in ("linear", "ring"):
        floor = 3 if source == "ring" else 2
        node_count = size if size is not None else max(needed, floor)
        try:
            return make_graph(source, size=node_count), f"{source}({node_count})"
        except ValueError as exc:
            raise CliError(USAGE_EXIT, str(exc)) from exc
    path = Path(source)
    if not path.is_file():
        raise CliError(IO_EXIT, f"no such graph file: {source}")
    try:
        graph = make_graph("from_file", path=path)
    except ValueError as exc:
        raise CliError(IO_EXIT, f"cannot parse graph {source}: {exc}") from exc
    inputs[str(path)] = _sha256_file(path)
    return graph, str(path)


def cmd_estimate(args) -> int:
    if args.n < 2 or args.n % 2 != 0:
        raise CliError(USAGE_EXIT,
                       f"--n must be an even integer >= 2, got {args.n}")
    pairs = args.n // 2
    try:
        circuit = build_general(PairLayout.default(pairs), PARITY)
    except ValueError as exc:
        raise CliError(USAGE_EXIT, str(exc)) from exc

    inputs: dict = {}
    graph, graph_source = _resolve_graph(args.graph, args.graph_size,
                                         circuit.num_qubits, inputs)
    layout = None
    if args.layout is not None:
        try:
            layout = tuple(int(x) for x in args.layout.split(","))
        except ValueError as exc:
            raise CliError(USAGE_EXIT,
                           "--layout must be comma-separated integers") from exc
    profile = _parse_noise(args.noise, args.seed) if args.noise else NoiseProfile(seed=args.seed)

    try:
        estimate = routing_estimate(circuit, graph, layout=layout, profile=profile)
    except ValueError as exc:
        raise CliError(USAGE_EXIT, str(exc)) from exc

    payload = {
        "command": "estimate",
        "config": {
            "n": args.n,
            "pairs": pairs,
            "graph": args.graph,
            "graph_size": args.graph_size,
            "layout": list(layout) if layout else None,
            "noise": _noise_dict(profile),
        },
        "seed": args.seed,
        "inputs": inputs,
        "graph": {
            "source": graph_source,
            "num_nodes": graph.num_nodes,
            "num_edges": len(graph.edges),
            "max_degree": graph.max_degree(),
            "connected": graph.is_connected(),
        },
        "estimate": estimate.to_dict(),
    }
    pretty = [
        f"general circuit, {pairs} pair(s) ({args.n} statement qubits, "
        f"{circuit.num_qubits} total with flag)",
        f"graph: {graph_source} ({graph.num_nodes} nodes, "
        f"{len(graph.edges)} edges, max degree {graph.max_degree()})",
        f"g_2q = {estimate.g_2q}   g_1q = {estimate.g_1q}   depth = {estimate.depth}",
        f"mean interaction distance = {estimate.mean_distance:.4f}",
        f"swap overhead (CNOT-equivalents, forward+back) = {estimate.swap_overhead_depth}",
        f"fidelity estimate = {estimate.fidelity:.6f}",
    ]
    _emit(payload, args, pretty)
    return 0


# ---------------------------------------------------------------------------
# truthtable

def cmd_truthtable(args) -> int:
    if not 1 <= args.pairs <= TRUTHTABLE_MAX_PAIRS:
        raise CliError(USAGE_EXIT,
                       f"--pairs must be in 1..{TRUTHTABLE_MAX_PAIRS}, got {args.pairs}")
    rows = truth_table(args.pairs, flag_in=args.flag_in)
    m = args.pairs

    def bits(tup):
        # highest pair index leftmost, matching bitstring rendering elsewhere
        return "".join(str(b) for b in reversed(tup))

    row_dicts = [{
        "contradictions": bits(r.contradictions),
        "resolutions": bits(r.resolutions),
        "flag_in": r.flag_in,
        "rule_flag": r.rule_flag,
        "classification": r.label,
        "circuit_flag": r.circuit_flag,
        "diverges": r.diverges,
    } for r in rows]

    if args.csv:
        try:
            with open(args.csv, "w", newline="", encoding="utf-8") as fh:
                writer = csv.DictWriter(fh, fieldnames=list(row_dicts[0].keys()))
                writer.writeheader()
                writer.writerows(row_dicts)
        except OSError as exc:
            raise CliError(IO_EXIT, f"cannot write {args.csv}: {exc}") from exc

    payload = {
        "command": "truthtable",
        "config": {"pairs": m, "flag_in": args.flag_in},
        "seed": args.seed,
        "inputs": {},
        "rows": row_dicts,
        "divergent_rows": sum(1 for r in rows if r.diverges),
    }
    header = (f"{'c':>{max(m, 1)}} {'r':>{max(m, 1)}} flag_in rule circuit "
              f"diverges classification")
    pretty = [f"truth table, {m} pair(s), flag_in={args.flag_in}:", header]
    for r in row_dicts:
        pretty.append(
            f"{r['contradictions']:>{max(m, 1)}} {r['resolutions']:>{max(m, 1)}} "
            f"{r['flag_in']:>7} {r['rule_flag']:>4} {r['circuit_flag']:>7} "
            f"{'yes' if r['diverges'] else '.':>8} {r['classification']}"
        )
    pretty.append(f"{payload['divergent_rows']} divergent row(s)")
    _emit(payload, args, pretty)
    return 0


# ---------------------------------------------------------------------------
# parser

def build_parser() -> _Parser:
    parser = _Parser(prog="liarsim",
                     description="Statevector simulation and consistency "
                                 "verification for coherence-flag circuits.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=DEFAULT_SEED,
                       help=f"RNG seed echoed in every report (default {DEFAULT_SEED})")
        p.add_argument("--out", metavar="FILE", help="write the JSON report here")
        p.add_argument("--pretty", action="store_true",
                       help="human-readable stdout instead of JSON")

    p_sim = sub.add_parser("simulate", help="run a circuit, print probabilities "
                                            "and optional sampled counts")
    p_sim.add_argument("circuit",
                       help="liar-reference | liar-literal | general | circuit JSON file")
    p_sim.add_argument("--pairs", type=int, default=2,
                       help="pair count for the general circuit (default 2)")
    p_sim.add_argument("--mode", choices=("parity", "or"), default="parity",
                       help="flag semantics for the general circuit")
    p_sim.add_argument("--with-phase", action="store_true",
                       help="add the conditional-phase stage to the general circuit")
    p_sim.add_argument("--shots", type=int, help="sample this many measurement shots")
    p_sim.add_argument("--noise", metavar="P1Q,P2Q,PREAD",
                       help="sample through the noise channel instead of exactly")
    p_sim.add_argument("--csv", metavar="FILE", help="write sampled counts as CSV")
    p_sim.add_argument("--circuit-out", metavar="FILE",
                       help="save the resolved circuit as JSON")
    common(p_sim)
    p_sim.set_defaults(func=cmd_simulate)

    p_ver = sub.add_parser("verify", help="run the operator-identity and "
                                          "circuit-equivalence suite")
    p_ver.add_argument("--pairs", type=int, default=2,
                       help=f"register size in pairs, 1..{MAX_PAIRS} (default 2)")
    common(p_ver)
    p_ver.set_defaults(func=cmd_verify)

    p_met = sub.add_parser("metrics", help="compare an experimental distribution "
                                           "against an ideal one")
    p_met.add_argument("--exp", required=True,
                       help="CSV file, bundled:simulation, bundled:hardware, "
                            "liar-reference, or liar-literal")
    p_met.add_argument("--ideal", default="liar-reference",
                       help="same forms as --exp (default liar-reference)")
    p_met.add_argument("--column", choices=("auto", "counts", "probability"),
                       default="auto", help="which CSV column to read")
    p_met.add_argument("--consistent-set", metavar="S1,S2,...",
                       help="comma-separated consistent outcomes")
    p_met.add_argument("--paradox-set", metavar="S1,S2,...",
                       help="comma-separated paradox outcomes")
    p_met.add_argument("--flag-index", type=int, help="flag qubit index")
    common(p_met)
    p_met.set_defaults(func=cmd_metrics)

    p_est = sub.add_parser("estimate", help="gate counts, routing overhead, and "
                                            "fidelity for the N-statement circuit")
    p_est.add_argument("--n", type=int, required=True,
                       help="statement qubit count; even, >= 2")
    p_est.add_argument("--graph", default="linear",
                       help=f"linear | ring | {BUNDLED_GRAPH_ARG} | edge-list file "
                            "(default linear)")
    p_est.add_argument("--graph-size", type=int,
                       help="node count for linear/ring (default: circuit width)")
    p_est.add_argument("--layout", metavar="N0,N1,...",
                       help="physical node per logical qubit (default identity)")
    p_est.add_argument("--noise", metavar="P1Q,P2Q,PREAD",
                       help="error rates for the fidelity estimate "
                            "(default 1e-4,1e-3,0.015)")
    common(p_est)
    p_est.set_defaults(func=cmd_estimate)

    p_tt = sub.add_parser("truthtable", help="exhaustive rule-vs-circuit table "
                                             "for all pair assignments")
    p_tt.add_argument("--pairs", type=int, default=1,
                      help=f"pair count, 1..{TRUTHTABLE_MAX_PAIRS} (default 1)")
    p_tt.add_argument("--flag-in", type=int, choices=(0, 1), default=1,
                      help="flag input bit (default 1)")
    p_tt.add_argument("--csv", metavar="FILE", help="also write the table as CSV")
    common(p_tt)
    p_tt.set_defaults(func=cmd_truthtable)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"liarsim {args.subcommand}: {exc}", file=sys.stderr)
        return exc.code
    except OSError as exc:
        print(f"liarsim {args.subcommand}: {exc}", file=sys.stderr)
        return IO_EXIT


if __name__ == "__main__":
    sys.exit(main())
