"""Command-line interface: learn, score, eval, sample, gen-model, moralize,
and batch benchmarking with CSV reports.

Data goes to standard output or to files named from --out; progress and
diagnostics go to standard error.  Exit codes: 0 success, 1 usage error,
2 data or file error, 3 capacity refusal from the exact phase.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from statistics import mean

import numpy as np

from . import chordal, pbo, synthetic
from .blanket_search import find_all_blankets, find_markov_blanket
from .dataset import DataFormatError, load_dataset, write_dataset
from .graph import BlanketFamily, combine, confusion, read_graph, write_graph
from .graph_search import hill_climb
from .scores import ScoreParams, mpl_global, pic_local
from .synthetic import draw_factors, read_dag, read_model, replicate, write_model

USAGE_ERROR, DATA_ERROR, CAPACITY_ERROR = 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _default_threads() -> int:
    value = os.environ.get("MPLEARN_THREADS", "1")
    try:
        return max(1, int(value))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mplearn", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("learn", help="learn a graph from categorical data")
    p.add_argument("data")
    p.add_argument("--ess", type=float, default=1.0)
    p.add_argument("--prior", choices=["uniform", "sparsity"], default="uniform")
    p.add_argument("--combine", choices=["and", "or"], default="and")
    p.add_argument(
        "--phase2", choices=["none", "hc", "exact", "opb-export"], default="hc"
    )
    p.add_argument("--threads", type=int, default=_default_threads())
    p.add_argument("--pbo-scale", type=int, default=pbo.DEFAULT_SCALE)
    p.add_argument("--pbo-limit", type=int, default=pbo.DEFAULT_CANDIDATE_LIMIT)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, metavar="PREFIX")

    p = sub.add_parser("score", help="score a graph against data")
    p.add_argument("data")
    p.add_argument("graph")
    p.add_argument("--method", choices=["mpl", "pic", "bdeu"], default="mpl")
    p.add_argument("--ess", type=float, default=1.0)
    p.add_argument("--prior", choices=["uniform", "sparsity"], default="uniform")

    p = sub.add_parser("eval", help="edge confusion of a learned graph vs truth")
    p.add_argument("learned")
    p.add_argument("truth")

    p = sub.add_parser("sample", help="draw data from a model file")
    p.add_argument("--model", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)

    p = sub.add_parser("gen-model", help="generate a synthetic factor model")
    p.add_argument(
        "--components", default="grid,hub,loop,clique", metavar="KIND[,KIND...]"
    )
    p.add_argument("--replicas", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)

    p = sub.add_parser("moralize", help="moral graph of a directed model file")
    p.add_argument("dagfile")
    p.add_argument("--out", default=None)

    p = sub.add_parser("bench", help="synthetic benchmark sweep, CSV to stdout")
    p.add_argument("--components", default="grid,hub,loop,clique")
    p.add_argument("--replicas", type=int, default=1)
    p.add_argument("--sizes", default="250,500,1000,2000,4000,8000,16000,32000")
    p.add_argument("--dists", type=int, default=10)
    p.add_argument("--sets", type=int, default=10)
    p.add_argument("--ess-list", default="1")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=_default_threads())
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handlers = {
        "learn": cmd_learn,
        "score": cmd_score,
        "eval": cmd_eval,
        "sample": cmd_sample,
        "gen-model": cmd_gen_model,
        "moralize": cmd_moralize,
        "bench": cmd_bench,
    }
    try:
        return handlers[args.command](args)
    except pbo.CapacityError as exc:
        print(f"error: {exc} (try --phase2 hc)", file=sys.stderr)
        return CAPACITY_ERROR
    except (DataFormatError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA_ERROR


def _load(path: str):
    with open(path) as fh:
        return load_dataset(fh)


def _read_graph(path: str):
    with open(path) as fh:
        return read_graph(fh)


def _write_family(family: BlanketFamily, sink) -> None:
    sink.write(f"d {family.d}\n")
    for j in range(family.d):
        members = " ".join(str(v) for v in sorted(family.blankets[j]))
        sink.write(f"{j}: {members}\n".rstrip() + "\n")


def cmd_learn(args) -> int:
    data = _load(args.data)
    params = ScoreParams(ess=args.ess, prior=args.prior)
    t0 = time.perf_counter()
    family = find_all_blankets(data, params, workers=max(1, args.threads))
    t1 = time.perf_counter()
    print(f"phase 1: {t1 - t0:.2f}s for {data.d} blankets", file=sys.stderr)
    e_and = combine(family, "and")
    e_or = combine(family, "or")

    if args.phase2 == "opb-export":
        problem = pbo.encode(
            data, e_or, params, scale=args.pbo_scale, limit=args.pbo_limit
        )
        if args.out:
            with open(f"{args.out}.opb", "w") as fh:
                pbo.write_opb(problem, fh)
            _write_learn_files(args.out, family, e_and, e_or, final=None)
        else:
            pbo.write_opb(problem, sys.stdout)
        return 0

    if args.phase2 == "none":
        final = combine(family, args.combine)
    elif args.phase2 == "hc":
        final, _, _ = hill_climb(data, e_or, params)
    else:  # exact
        problem = pbo.encode(
            data, e_or, params, scale=args.pbo_scale, limit=args.pbo_limit
        )
        warm, _, _ = hill_climb(data, e_or, params)
        bound = pbo.objective_value(problem, pbo.assignment_for_graph(problem, warm))
        assignment = pbo.solve_internal(problem, upper_bound=bound)
        final = pbo.decode(problem, assignment)
    score = mpl_global(data, final, params)
    print(f"phase 2 ({args.phase2}): done in {time.perf_counter() - t1:.2f}s", file=sys.stderr)

    if args.out:
        _write_learn_files(args.out, family, e_and, e_or, final)
        print(f"log-mpl {score!r}")
    else:
        sys.stdout.write(f"# log-mpl {score!r}\n")
        write_graph(final, sys.stdout)
    return 0


def _write_learn_files(prefix, family, e_and, e_or, final) -> None:
    with open(f"{prefix}.blankets", "w") as fh:
        _write_family(family, fh)
    with open(f"{prefix}.and.graph", "w") as fh:
        write_graph(e_and, fh)
    with open(f"{prefix}.or.graph", "w") as fh:
        write_graph(e_or, fh)
    if final is not None:
        with open(f"{prefix}.final.graph", "w") as fh:
            write_graph(final, fh)


def cmd_score(args) -> int:
    data = _load(args.data)
    graph = _read_graph(args.graph)
    if graph.d != data.d:
        raise ValueError(
            f"graph has {graph.d} nodes but data has {data.d} variables"
        )
    params = ScoreParams(ess=args.ess, prior=args.prior)
    if args.method == "mpl":
        value = mpl_global(data, graph, params)
    elif args.method == "pic":
        value = sum(pic_local(data, j, graph.neighbors(j)) for j in range(data.d))
    else:
        order, is_ch = chordal.mcs_order(graph)
        if not is_ch:
            raise ValueError("graph is not chordal; bdeu requires a chordal graph")
        parents = chordal.orient(graph, order)
        value = chordal.bdeu_score(data, parents, ess=args.ess)
    print(f"{value:.6f}")
    return 0


def cmd_eval(args) -> int:
    learned = _read_graph(args.learned)
    truth = _read_graph(args.truth)
    counts = confusion(learned, truth)
    print("tp,fp,fn,hamming")
    print(f"{counts.tp},{counts.fp},{counts.fn},{counts.hamming}")
    return 0


def cmd_sample(args) -> int:
    with open(args.model) as fh:
        text = fh.read()
    if "PARENTS" in text:
        model = read_dag(text.splitlines())
        data = synthetic.sample_dag(model, args.n, args.seed)
    else:
        model = read_model(text.splitlines())
        data = synthetic.sample(model, args.n, args.seed)
    if args.out:
        with open(args.out, "w") as fh:
            write_dataset(data, fh)
    else:
        write_dataset(data, sys.stdout)
    return 0


def _parse_kinds(raw: str) -> list[str]:
    kinds = [k.strip().lower() for k in raw.split(",") if k.strip()]
    for kind in kinds:
        if kind not in synthetic.COMPONENT_KINDS:
            raise ValueError(f"unknown component kind {kind!r}")
    return kinds


def cmd_gen_model(args) -> int:
    graph = replicate(_parse_kinds(args.components), args.replicas)
    model = draw_factors(graph, [2] * graph.d, seed=args.seed)
    if args.out:
        with open(args.out, "w") as fh:
            write_model(model, fh)
    else:
        write_model(model, sys.stdout)
    return 0


def cmd_moralize(args) -> int:
    with open(args.dagfile) as fh:
        loaded = read_dag(fh, require_cpts=False)
    parents = loaded.parents if isinstance(loaded, synthetic.DagModel) else loaded[1]
    moral = synthetic.moralize(parents)
    if args.out:
        with open(args.out, "w") as fh:
            write_graph(moral, fh)
    else:
        write_graph(moral, sys.stdout)
    return 0


def cmd_bench(args) -> int:
    kinds = _parse_kinds(args.components)
    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    ess_values = [float(e) for e in args.ess_list.split(",") if e.strip()]
    truth = replicate(kinds, args.replicas)
    cells: dict[tuple[int, float], list] = {
        (n, ess): [] for n in sizes for ess in ess_values
    }
    for dist in range(args.dists):
        model = draw_factors(truth, [2] * truth.d, seed=_derive(args.seed, dist))
        for setno in range(args.sets):
            for n in sizes:
                data = synthetic.sample(
                    model, n, seed=_derive(args.seed, dist, setno, n)
                )
                for ess in ess_values:
                    params = ScoreParams(ess=ess)
                    t0 = time.perf_counter()
                    blankets = []
                    max_single = 0.0
                    for j in range(data.d):
                        tj = time.perf_counter()
                        blankets.append(find_markov_blanket(data, j, params)[0])
                        max_single = max(max_single, time.perf_counter() - tj)
                    family = BlanketFamily(blankets)
                    final, _, _ = hill_climb(data, combine(family, "or"), params)
                    elapsed = time.perf_counter() - t0
                    counts = confusion(final, truth)
                    cells[(n, ess)].append(
                        (counts.tp, counts.fp, counts.hamming, elapsed, max_single)
                    )
                    print(
                        f"dist {dist} set {setno} n {n} ess {ess:g}: "
                        f"hamming {counts.hamming} in {elapsed:.2f}s",
                        file=sys.stderr,
                    )
    print("n,ess,mean_tp,mean_fp,mean_hamming,total_time_s,max_blanket_time_s")
    for n in sizes:
        for ess in ess_values:
            rows = cells[(n, ess)]
            print(
                f"{n},{ess:g},{mean(r[0] for r in rows):.4f},"
                f"{mean(r[1] for r in rows):.4f},{mean(r[2] for r in rows):.4f},"
                f"{sum(r[3] for r in rows):.4f},{max(r[4] for r in rows):.6f}"
            )
    return 0


def _derive(*parts: int):
    """Stable child seed from a tuple of integers."""
    return np.random.SeedSequence(list(parts)).generate_state(1)[0]


if __name__ == "__main__":
    sys.exit(main())
