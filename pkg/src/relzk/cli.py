"""Command-line front end: simulations, extractions, bound tables and inequality suites.

Every subcommand writes a table (header row always present) as CSV or as a
JSON array of row objects. Exit codes: 0 all checks passed, 2 a bound was
violated, 3 bad input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

from sympy import primerange

from .bounds import q_for_target, qpok_extraction_lower, soundness, three_col_pok_lower, threecol_errors
from .commitments import CapacityError, binding_adversary_search
from .extractors.canonical import canonical_extract_classical, canonical_extract_quantum
from .extractors.coloring import extract_3col_classical, extract_3col_quantum, ghz_labeling_spec
from .extractors.toy_specs import KINDS as QUANTUM_KINDS
from .extractors.toy_specs import subset_toy_spec, toy_protocol
from .field import FieldSpec, make_field
from .protocols.coloring import (
    HonestColoringProvers,
    acceptance_2p,
    as_fraction,
    best_labeling_table,
    load_coloring_witness,
    play_2p,
    play_3p,
)
from .protocols.graphs import GraphFormatError, is_proper_coloring, load_graph
from .protocols.hamiltonian import HamiltonianProtocol, HonestHCProvers, OneBranchHCProvers, RandomHCProvers
from .protocols.subset_sum import HonestSubsetProvers, SubsetSumProtocol, load_subset_instance
from .rng import trial_rng
from .sigma import ABORT, ACCEPT, REJECT, TimingModel, jsonable, run_sigma, timing_check
from .verifiers import SUITE_COLUMNS, THEOREMS, corrupted_instance_row, run_suite

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 2, 3

SIMULATE_COLUMNS = ("protocol", "prover", "trials", "seed", "accepted", "rejected", "aborted",
                    "acceptance", "stderr")
EXTRACT_COLUMNS = ("protocol", "prover", "trials", "seed", "success", "acceptance", "bound_rhs",
                   "stderr", "consistent", "witness")
BOUNDS_COLUMNS = ("problem", "n", "eta", "Q", "ours", "previous", "ours_vacuous", "previous_vacuous")
THREECOL_BOUND_COLUMNS = ("problem", "edges", "kappa_c", "kappa_q", "delta_tilde", "delta_lower")
BINDING_COLUMNS = ("q", "epsilon_fb", "equals_inverse_q")


class InputError(Exception):
    """Raised for unreadable or inconsistent command-line input."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


# -- output ------------------------------------------------------------------------------


def _cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return ""
    return str(v)


def render(rows: list[dict], columns, fmt: str) -> str:
    if fmt == "json":
        ordered = [{c: jsonable(r.get(c)) for c in columns} for r in rows]
        return json.dumps(ordered, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(jsonable(r.get(c))) for c in columns])
    return buf.getvalue()


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# -- input -------------------------------------------------------------------------------


def _read_json(path, key):
    if path is None:
        raise InputError(f"--witness is required (JSON with key {key!r})")
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    if key not in data:
        raise InputError(f"{path}: missing key {key!r}")
    return data[key]


def _graph(args):
    if args.graph is None:
        raise InputError("--graph is required for this protocol")
    return load_graph(args.graph)


def _timing(args) -> TimingModel:
    return TimingModel.uniform(args.dist, args.light_speed, args.latency)


def _stderr(p: float, n: int) -> float:
    return math.sqrt(max(p * (1 - p), 0.0) / n)


# -- simulate ----------------------------------------------------------------------------


def _sigma_setup(args):
    """Protocol and prover pair for the commit-challenge-response protocols."""
    if args.protocol == "hc":
        g = _graph(args)
        spec = make_field(args.qmin)
        proto = HamiltonianProtocol(g, spec)
        if args.prover == "honest":
            provers = HonestHCProvers(g, _read_json(args.witness, "cycle"), spec)
        elif args.prover == "one-branch":
            provers = OneBranchHCProvers(g, spec)
        elif args.prover == "random":
            provers = RandomHCProvers(g, spec)
        else:
            raise InputError(f"prover {args.prover!r} is not available for hc")
        return proto, provers
    if args.instance is None:
        raise InputError("--instance is required for subset")
    inst = load_subset_instance(args.instance)
    if args.prover != "honest":
        raise InputError(f"prover {args.prover!r} is not available for subset")
    return SubsetSumProtocol(inst), HonestSubsetProvers(inst, _read_json(args.witness, "v"))


def _coloring_tables(args, g, eps):
    """Per-trial answer-table source for the coloring protocols."""
    if args.prover == "honest":
        provers = HonestColoringProvers(g, load_coloring_witness(_need(args.witness, "--witness")))
        return lambda rng: provers.setup(rng)
    if args.prover == "best-table":
        table, _ = best_labeling_table(g, eps)
        return lambda rng: table
    raise InputError(f"prover {args.prover!r} is not available for {args.protocol}")


def _need(value, flag):
    if value is None:
        raise InputError(f"{flag} is required")
    return value


def cmd_simulate(args) -> tuple[list[dict], tuple, int]:
    counts = {ACCEPT: 0, REJECT: 0, ABORT: 0}
    transcripts = []
    timing = _timing(args)
    if args.protocol in ("hc", "subset"):
        proto, provers = _sigma_setup(args)
        for i in range(args.trials):
            t = run_sigma(proto, provers, timing, trial_rng(args.seed, i))
            counts[t.verdict] += 1
            if args.transcripts:
                transcripts.append(t.to_json())
    else:
        g = _graph(args)
        eps = as_fraction(args.epsilon)
        tables = _coloring_tables(args, g, eps)
        lat = timing.latency
        t2 = lat["rand"] + lat["com"]
        t3 = lat["ch"] + lat["resp"]
        timed_out = timing_check(0, t2, t3, timing) == "abort"
        for i in range(args.trials):
            rng = trial_rng(args.seed, i)
            table = tables(rng)
            if args.protocol == "3col2p":
                qs, ans, ok = play_2p(g, table, table, eps, rng)
            else:
                qs, ans, ok = play_3p(g, table, table, table, eps, rng)
            verdict = ABORT if timed_out else (ACCEPT if ok else REJECT)
            counts[verdict] += 1
            if args.transcripts:
                transcripts.append(json.dumps({"questions": jsonable(qs), "answers": jsonable(ans),
                                               "t2": jsonable(t2), "t3": jsonable(t3),
                                               "verdict": verdict}, sort_keys=True, separators=(",", ":")))
    if args.transcripts:
        Path(args.transcripts).write_text("".join(line + "\n" for line in transcripts))
    p = counts[ACCEPT] / args.trials
    row = {"protocol": args.protocol, "prover": args.prover, "trials": args.trials, "seed": args.seed,
           "accepted": counts[ACCEPT], "rejected": counts[REJECT], "aborted": counts[ABORT],
           "acceptance": p, "stderr": _stderr(p, args.trials)}
    return [row], SIMULATE_COLUMNS, EXIT_OK


# -- extract -----------------------------------------------------------------------------


def _extract_quantum_subset(args):
    kind = args.prover[len("quantum-"):]
    if kind not in QUANTUM_KINDS:
        raise InputError(f"unknown quantum prover kind {kind!r}")
    proto = toy_protocol()
    res = canonical_extract_quantum(proto, subset_toy_spec(kind, trial_rng(args.seed, 0), ancilla=args.ancilla),
                                    rng=trial_rng(args.seed, 1))
    # exact values: no sampling error
    return {"success": res.success_probability, "acceptance": res.acceptance_probability,
            "bound_rhs": res.bound_rhs, "stderr": 0.0, "trials": 1,
            "witness": None if res.sampled_witness is None else [int(x) for x in res.sampled_witness]}


def _extract_sigma(args):
    proto, provers = _sigma_setup(args)
    hits = accepted = 0
    witness = None
    for i in range(args.trials):
        rng = trial_rng(args.seed, i)
        res = canonical_extract_classical(proto, provers, rng)
        accepted += sum(res.accepted)
        if res.valid:
            hits += 1
            witness = [int(x) for x in res.witness]
    p_acc = accepted / (2 * args.trials)
    q = proto.spec.q if isinstance(proto, HamiltonianProtocol) else proto.inst.spec.q
    delta = 1.0 if p_acc == 0 else min(1.0, 1.0 / (q * p_acc))
    rhs = qpok_extraction_lower(p_acc, 2, delta, 1)
    s = hits / args.trials
    return {"success": s, "acceptance": p_acc, "bound_rhs": rhs, "stderr": _stderr(s, args.trials),
            "trials": args.trials, "witness": witness}


def _extract_coloring(args):
    g = _graph(args)
    eps = as_fraction(args.epsilon)
    if args.protocol == "3col3p":
        if args.prover != "honest":
            raise InputError("3col3p extraction supports the honest entangled prover only")
        coloring = load_coloring_witness(_need(args.witness, "--witness"))
        hits = 0
        witness = None
        p = 0.0
        for i in range(args.trials):
            rng = trial_rng(args.seed, i)
            provers = HonestColoringProvers(g, coloring)
            t = provers.setup(rng)
            res = extract_3col_quantum(ghz_labeling_spec(g, [t]), rng, eps)
            p = res.p_quantum
            if res.classical.proper:
                hits += 1
                witness = res.classical.coloring
        s = hits / args.trials
        return {"success": s, "acceptance": p, "bound_rhs": three_col_pok_lower(p, g.num_edges),
                "stderr": _stderr(s, args.trials), "trials": args.trials, "witness": witness}
    tables = _coloring_tables(args, g, eps)
    hits = 0
    p_total = Fraction(0)
    witness = None
    for i in range(args.trials):
        table = tables(trial_rng(args.seed, i))
        p_total += acceptance_2p(g, table, table, eps)
        res = extract_3col_classical(g, table, table, eps)
        if res.proper and is_proper_coloring(g, res.coloring):
            hits += 1
            witness = res.coloring
    p = float(p_total / args.trials)
    s = hits / args.trials
    return {"success": s, "acceptance": p, "bound_rhs": three_col_pok_lower(p, g.num_edges),
            "stderr": _stderr(s, args.trials), "trials": args.trials, "witness": witness}


def cmd_extract(args):
    if args.prover.startswith("quantum-"):
        if args.protocol != "subset":
            raise InputError("quantum provers are available for the subset protocol only")
        out = _extract_quantum_subset(args)
    elif args.protocol in ("hc", "subset"):
        out = _extract_sigma(args)
    else:
        out = _extract_coloring(args)
    consistent = out["success"] >= out["bound_rhs"] - 3 * out["stderr"] - 1e-9
    row = {"protocol": args.protocol, "prover": args.prover, "seed": args.seed,
           "consistent": consistent, **out,
           "witness": "" if out["witness"] is None else json.dumps(out["witness"], separators=(",", ":"))}
    return [row], EXTRACT_COLUMNS, EXIT_OK if consistent else EXIT_VIOLATION


# -- verify-theorems ---------------------------------------------------------------------


def cmd_verify_theorems(args):
    names = THEOREMS if args.theorem == "all" else (args.theorem,)
    rows = []
    for name in names:
        rows.extend(run_suite(name, args.instances, args.seed))
    if args.inject_corrupt:
        rows.append(corrupted_instance_row(args.seed))
    code = EXIT_OK if all(r["holds"] for r in rows) else EXIT_VIOLATION
    return rows, SUITE_COLUMNS, code


# -- bounds ------------------------------------------------------------------------------


def _bound_row(problem, n, eta, Q):
    rep = soundness(problem, n, Q)
    ours, prev = rep.outputs["ours"], rep.outputs["previous"]
    return {"problem": problem, "n": n, "eta": eta, "Q": Q, "ours": ours.value, "previous": prev.value,
            "ours_vacuous": ours.vacuous, "previous_vacuous": prev.vacuous}


def cmd_bounds(args):
    if args.problem == "3col":
        rows = []
        for h in args.edges or [3, 6, 10]:
            e = threecol_errors(h)
            rows.append({"problem": "3col", "edges": h, **e})
        return rows, THREECOL_BOUND_COLUMNS, EXIT_OK
    n = _need(args.n, "--n")
    rows = []
    if args.q_values:
        for Q in args.q_values:
            rows.append(_bound_row(args.problem, n, None, Q))
    else:
        for eta in range(args.eta_min, args.eta_max + 1):
            rows.append(_bound_row(args.problem, n, eta, q_for_target(args.problem, n, eta)["our_Q"]))
    return rows, BOUNDS_COLUMNS, EXIT_OK


# -- binding-search ----------------------------------------------------------------------


def cmd_binding_search(args):
    if args.q_max < args.q_min:
        raise InputError("--q-max must be at least --q-min")
    rows = []
    for q in primerange(args.q_min, args.q_max + 1):
        eps = binding_adversary_search(FieldSpec(int(q)))
        rows.append({"q": int(q), "epsilon_fb": eps, "equals_inverse_q": eps == Fraction(1, int(q))})
    code = EXIT_OK if all(r["equals_inverse_q"] for r in rows) else EXIT_VIOLATION
    return rows, BINDING_COLUMNS, code


# -- parser ------------------------------------------------------------------------------


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _fraction(text):
    try:
        return as_fraction(Fraction(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _common(p: argparse.ArgumentParser, trials=True):
    p.add_argument("--seed", type=int, required=True, help="64-bit seed for every random choice")
    if trials:
        p.add_argument("--trials", type=_positive, default=1000)
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def _protocol_args(p: argparse.ArgumentParser, provers):
    p.add_argument("--protocol", choices=("hc", "subset", "3col2p", "3col3p"), required=True)
    p.add_argument("--graph", help="edge list, one 0-indexed 'u v' pair per line")
    p.add_argument("--instance", help="subset-sum instance JSON {s, k, q_min}")
    p.add_argument("--witness", help="witness JSON: {cycle}, {v} or {coloring}")
    p.add_argument("--qmin", type=int, default=101, help="field size is the least prime >= qmin")
    p.add_argument("--epsilon", type=_fraction, default=Fraction(1, 3),
                   help="edge-test weight of the question sampler, e.g. 1/3 or 0.25")
    p.add_argument("--prover", choices=provers, default="honest")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="relzk", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="run seeded protocol trials")
    _protocol_args(p, ("honest", "one-branch", "random", "best-table"))
    p.add_argument("--dist", type=float, default=1.0)
    p.add_argument("--light-speed", type=float, default=1.0)
    p.add_argument("--latency", type=float, default=0.0, help="delay on each message")
    p.add_argument("--transcripts", help="write one JSON transcript per line to this file")
    _common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("extract", help="run the matching knowledge extractor")
    _protocol_args(p, ("honest", "one-branch", "random", "best-table",
                       *("quantum-" + k for k in QUANTUM_KINDS)))
    p.add_argument("--ancilla", action="store_true", help="give the quantum second prover an extra qubit")
    _common(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("verify-theorems", help="randomized checks of the measurement inequalities")
    p.add_argument("--theorem", choices=("all", *THEOREMS), default="all")
    p.add_argument("--instances", type=_positive, default=10_000)
    p.add_argument("--inject-corrupt", action="store_true",
                   help="append a deliberately invalid instance (detector self-test)")
    _common(p, trials=False)
    p.set_defaults(func=cmd_verify_theorems)

    p = sub.add_parser("bounds", help="soundness bound tables")
    p.add_argument("--problem", choices=("hc", "subset", "3col"), required=True)
    p.add_argument("--n", type=int, help="graph order or set size")
    p.add_argument("--eta-min", type=_positive, default=1)
    p.add_argument("--eta-max", type=_positive, default=10)
    p.add_argument("--q-values", type=_positive, nargs="+", help="explicit field sizes instead of the eta grid")
    p.add_argument("--edges", type=_positive, nargs="+", help="edge counts for the 3col table")
    p.add_argument("--seed", type=int, default=0, help="unused; accepted for a uniform interface")
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("binding-search", help="exhaustive double-opening search per prime q")
    p.add_argument("--q-min", type=int, default=2)
    p.add_argument("--q-max", type=int, default=101)
    p.add_argument("--seed", type=int, default=0, help="unused; the search is deterministic")
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_binding_search)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        rows, columns, code = args.func(args)
    except (InputError, GraphFormatError, CapacityError, OSError, ValueError) as exc:
        print(f"relzk: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _emit(render(rows, columns, args.format), args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
