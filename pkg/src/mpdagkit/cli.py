"""Command-line frontend.

Subcommands: validate, orient, possde, possan, adjust, ida, simulate.
Exit codes: 0 success, 1 domain failure (inconsistent knowledge, no
adjustment set with --find, guard or cap exceeded), 2 usage or parse
errors.  All output is deterministic for fixed arguments and seeds, and
graph output re-parses through the graph reader.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional, Sequence

import numpy as np

from .adjustment import (
    AdjustmentVerdict,
    adjust_set,
    forbidden_set,
    list_adjustment_sets,
    satisfies_b_adjustment,
)
from .causal_paths import b_possible_ancestors, b_possible_descendants
from .ida import ida_effects, joint_ida_effects
from .meek import construct_max_pdag, parse_background, validate_maximal_pdag
from .pdag_core import GraphParseError, PdagGraph, parse_graph, serialize_graph
from .sem_sim import SimConfig, rows_to_csv, run_simulation

UNIVERSE_CAP_ENV = "MPDAGKIT_UNIVERSE_CAP"


class DomainFailure(Exception):
    """Raised for well-formed queries with a negative or impossible answer."""


def _load_graph(path: str) -> PdagGraph:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_graph(fh.read())


def _load_background(spec: str):
    """A path to a knowledge file, or an inline string of '->' statements
    (newline- or semicolon-separated)."""
    if os.path.exists(spec):
        with open(spec, "r", encoding="utf-8") as fh:
            return parse_background(fh.read())
    if "->" in spec:
        return parse_background(spec.replace(";", "\n"))
    raise GraphParseError(f"background file not found: {spec}")


def _split_nodes(arg: str) -> list[str]:
    return [token for token in (t.strip() for t in arg.split(",")) if token]


def _format_set(g: PdagGraph, names) -> str:
    ordered = sorted(names, key=g.node_index)
    return "{" + ", ".join(ordered) + "}"


def _verdict_json(g: PdagGraph, verdict: AdjustmentVerdict) -> str:
    witness = verdict.witness
    if isinstance(witness, tuple):
        witness = list(witness)
    payload = {
        "amenable": verdict.amenable,
        "forbidden_ok": verdict.forbidden_ok,
        "blocking_ok": verdict.blocking_ok,
        "overall": verdict.overall,
        "zero_effect": verdict.zero_effect,
        "witness": witness,
    }
    return json.dumps(payload)


def _read_csv_matrix(path: str) -> tuple[np.ndarray, list[str]]:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [line.strip() for line in fh if line.strip()]
    if not lines:
        raise GraphParseError("empty data file")
    header = [token.strip() for token in lines[0].split(",")]
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != len(header):
            raise GraphParseError(f"row has {len(cells)} cells, expected {len(header)}", lineno)
        try:
            rows.append([float(cell) for cell in cells])
        except ValueError:
            raise GraphParseError("non-numeric cell", lineno) from None
    return np.array(rows), header


# -- subcommand handlers -------------------------------------------------


def _cmd_validate(args: argparse.Namespace) -> int:
    report = validate_maximal_pdag(_load_graph(args.graph))
    print(
        json.dumps(
            {
                "acyclic": report.acyclic,
                "closed": report.closed,
                "extendable": report.extendable,
            }
        )
    )
    return 0


def _cmd_orient(args: argparse.Namespace) -> int:
    g = _load_graph(args.graph)
    outcome = construct_max_pdag(g, _load_background(args.bg))
    if not outcome.ok:
        print(f"FAIL: {outcome.reason}")
        return 1
    sys.stdout.write(serialize_graph(outcome.graph))
    return 0


def _cmd_reach(args: argparse.Namespace, direction: str) -> int:
    g = _load_graph(args.graph)
    query = _split_nodes(args.x)
    if direction == "descendants":
        reach = b_possible_descendants(g, query)
    else:
        reach = b_possible_ancestors(g, query)
    print(_format_set(g, reach.nodes))
    return 0


def _cmd_adjust(args: argparse.Namespace) -> int:
    g = _load_graph(args.graph)
    xs = _split_nodes(args.x)
    ys = _split_nodes(args.y)
    modes = sum(1 for flag in (args.z is not None, args.find, args.list) if flag)
    if modes != 1:
        raise GraphParseError("choose exactly one of --z, --find or --list")
    if args.z is not None:
        verdict = satisfies_b_adjustment(g, xs, ys, _split_nodes(args.z))
        print(_verdict_json(g, verdict))
        return 0
    if args.find:
        result = adjust_set(g, xs, ys)
        if result is None:
            verdict = satisfies_b_adjustment(
                g,
                xs,
                ys,
                b_possible_ancestors(g, set(xs) | set(ys)).nodes
                - set(xs)
                - set(ys)
                - forbidden_set(g, xs, ys).nodes,
            )
            zero = " (total effect is zero)" if verdict.zero_effect else ""
            raise DomainFailure(f"no adjustment set exists{zero}")
        print(_format_set(g, result))
        return 0
    cap = int(os.environ.get(UNIVERSE_CAP_ENV, "20"))
    for z in list_adjustment_sets(
        g, xs, ys, minimal_only=args.minimal, universe_cap=cap
    ):
        print(_format_set(g, z))
    return 0


def _cmd_ida(args: argparse.Namespace) -> int:
    g = _load_graph(args.graph)
    xs = _split_nodes(args.x)
    data, columns = _read_csv_matrix(args.data)
    if len(xs) == 1:
        effects = ida_effects(g, xs[0], args.y, data, columns)
        for entry, value in zip(effects.family, effects.values):
            print(f"parents={_format_set(g, entry.parents[0])} effect={value:.10g}")
    else:
        effects = joint_ida_effects(g, xs, args.y, data, columns)
        for entry, vector in zip(effects.family, effects.values):
            parents = ", ".join(_format_set(g, s) for s in entry.parents)
            values = ", ".join(format(v, ".10g") for v in vector)
            print(f"parents=({parents}) effects=({values})")
    print(f"unique={effects.unique_count()}")
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        cfg = SimConfig(
            node_counts=tuple(raw["node_counts"]),
            neighborhood_sizes=tuple(raw["neighborhood_sizes"]),
            graphs_per_setting=raw["graphs_per_setting"],
            sample_size=raw["sample_size"],
            fractions=tuple(raw["fractions"]),
            seed=raw["seed"],
        )
    else:
        if args.seed is None:
            raise GraphParseError("simulate requires --seed (or a --config with one)")
        cfg = SimConfig(
            node_counts=tuple(int(v) for v in _split_nodes(args.p)),
            neighborhood_sizes=tuple(float(v) for v in _split_nodes(args.en)),
            graphs_per_setting=args.graphs,
            sample_size=args.n,
            fractions=tuple(float(v) for v in _split_nodes(args.fractions)),
            seed=args.seed,
        )
    rows = run_simulation(cfg)
    text = rows_to_csv(rows)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mpdagkit",
        description="Causal reasoning on maximally oriented partially directed acyclic graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="report acyclic/closed/extendable")
    p_validate.add_argument("graph")

    p_orient = sub.add_parser("orient", help="merge required orientations")
    p_orient.add_argument("graph")
    p_orient.add_argument("--bg", required=True, help="knowledge file or inline 'A -> B' text")

    for name, helptext in (
        ("possde", "possible descendants of --x"),
        ("possan", "possible ancestors of --x"),
    ):
        p_reach = sub.add_parser(name, help=helptext)
        p_reach.add_argument("graph")
        p_reach.add_argument("--x", required=True, help="comma-separated query nodes")

    p_adjust = sub.add_parser("adjust", help="adjustment-set queries")
    p_adjust.add_argument("graph")
    p_adjust.add_argument("--x", required=True)
    p_adjust.add_argument("--y", required=True)
    p_adjust.add_argument("--z", default=None, help="candidate set ('' for the empty set)")
    p_adjust.add_argument("--find", action="store_true", help="print the canonical set")
    p_adjust.add_argument("--list", action="store_true", help="list all valid sets")
    p_adjust.add_argument("--minimal", action="store_true", help="with --list: only minimal sets")

    p_ida = sub.add_parser("ida", help="possible total effects from data")
    p_ida.add_argument("graph")
    p_ida.add_argument("--x", required=True, help="one node, or a comma list for joint effects")
    p_ida.add_argument("--y", required=True)
    p_ida.add_argument("--data", required=True, help="CSV with a header of node names")

    p_sim = sub.add_parser("simulate", help="run the background-knowledge study")
    p_sim.add_argument("--config", help="JSON config file")
    p_sim.add_argument("--p", default="10,20", help="comma list of node counts")
    p_sim.add_argument("--en", default="3,5", help="comma list of neighbourhood sizes")
    p_sim.add_argument("--graphs", type=int, default=200)
    p_sim.add_argument("--n", type=int, default=200)
    p_sim.add_argument(
        "--fractions", default="0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1"
    )
    p_sim.add_argument("--seed", type=int, default=None)
    p_sim.add_argument("--out", help="CSV output path (default stdout)")

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "validate":
            return _cmd_validate(args)
        if args.command == "orient":
            return _cmd_orient(args)
        if args.command == "possde":
            return _cmd_reach(args, "descendants")
        if args.command == "possan":
            return _cmd_reach(args, "ancestors")
        if args.command == "adjust":
            return _cmd_adjust(args)
        if args.command == "ida":
            return _cmd_ida(args)
        if args.command == "simulate":
            return _cmd_simulate(args)
        parser.error(f"unknown command {args.command}")
    except DomainFailure as exc:
        print(f"error: {exc}")
        return 1
    except GraphParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
