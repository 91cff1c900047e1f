"""Command-line interface: train, predict, eval, bench, synth."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .data import Dataset
from .dataio import (
    ModelFile,
    load_model,
    parse_multilabel_svmlight,
    read_label_matrix,
    save_model,
    write_multilabel_svmlight,
    write_predictions,
)
from .errors import MargraphError
from .graphs import (
    DIRECTED,
    UNDIRECTED,
    build_chain_graph,
    build_full_graph,
    build_independent_graph,
)
from .inference import BBConfig, bb_infer, exhaustive_infer, icm_infer
from .metrics import evaluate
from .ordering import make_order_strategy
from .bench import k_sweep_csv, run_k_sweep, run_s_sweep, s_sweep_csv
from .synth import SynthConfig, planted_model, sample_bm, sample_sbn
from .training import TrainConfig, train_lmbm, train_lmsbn

__all__ = ["main", "build_parser"]

_GRAPH_BUILDERS = {
    "full": build_full_graph,
    "chain": build_chain_graph,
    "independent": build_independent_graph,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="margraph", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="fit a model on multi-label svmlight data")
    p.add_argument("--model", choices=["lmsbn", "lmbm"], required=True)
    p.add_argument("--graph", choices=["full", "chain", "independent"], default="full")
    p.add_argument("--order", choices=["index", "fscore"], default="index")
    p.add_argument("--lambda", dest="lam", type=float, default=0.01)
    p.add_argument("--eta0", type=float, default=0.0)
    p.add_argument("--epochs", type=int, default=1000)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scale", action="store_true", help="min-max scale features to [-1,1]")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("predict", help="predict labels with a saved model")
    p.add_argument("--model-file", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--infer", choices=["bb", "exhaustive", "icm"], default="bb")
    p.add_argument("--S", dest="cutoff", type=float, default=1e9)
    p.add_argument("--max-states", type=int, default=None)
    p.add_argument("--escalate", action="store_true")
    p.add_argument("--max-sweeps", type=int, default=100)
    p.add_argument("--out", required=True)

    p = sub.add_parser("eval", help="score predictions against truth labels")
    p.add_argument("--pred", required=True)
    p.add_argument("--truth", required=True)

    p = sub.add_parser("bench", help="cutoff sweep or size sweep for the search")
    p.add_argument("--model-file")
    p.add_argument("--data")
    p.add_argument("--S-list", dest="s_list")
    p.add_argument("--k-list", dest="k_list")
    p.add_argument("--max-states", type=int, default=None)
    p.add_argument("--n-train", type=int, default=200)
    p.add_argument("--n-test", type=int, default=30)
    p.add_argument("--lambda", dest="lam", type=float, default=0.01)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")

    p = sub.add_parser("synth", help="generate data from a planted model")
    p.add_argument("--kind", choices=["sbn", "bm"], required=True)
    p.add_argument("--graph", choices=["full", "chain", "independent"], default="chain")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bias-scale", type=float, default=1.5)
    p.add_argument("--input-scale", type=float, default=1.5)
    p.add_argument("--edge-scale", type=float, default=1.5)
    p.add_argument("--out", required=True)
    p.add_argument("--model-out")
    return parser


def _fail(msg: str) -> int:
    print(f"margraph: {msg}", file=sys.stderr)
    return 2


def _cmd_train(args) -> int:
    dataset = parse_multilabel_svmlight(args.data)
    scale = None
    if args.scale:
        lo = dataset.X.min(axis=0)
        hi = dataset.X.max(axis=0)
        scale = (lo, hi)
        dataset = Dataset(_minmax(dataset.X, lo, hi), dataset.Y)
    config = TrainConfig(
        lam=args.lam,
        eta0=args.eta0,
        max_epochs=args.epochs,
        tolerance=args.tol,
        shuffle_seed=args.seed,
    )
    strategy = make_order_strategy(args.order, dataset, config)
    kind = DIRECTED if args.model == "lmsbn" else UNDIRECTED
    graph = _GRAPH_BUILDERS[args.graph](
        dataset.n_outputs, dataset.n_inputs, kind, order=strategy.order
    )
    result = train_lmsbn(dataset, graph, config) if kind == DIRECTED else train_lmbm(dataset, graph, config)
    for r in result.reports:
        who = "joint" if r.node is None else f"node {r.node}"
        print(
            f"{who}: epochs={r.epochs} gap={r.gap:.3e} "
            f"max_pg={r.max_projected_gradient:.3e} converged={r.converged}"
        )
    model = ModelFile(
        graph=graph,
        weights=result.weights,
        epochs=result.epochs,
        gap=result.gap,
        scale=scale,
    )
    save_model(model, args.out)
    print(f"order: {' '.join(str(i) for i in strategy.order)}")
    print(f"wrote model to {args.out}")
    return 0


def _minmax(X, lo, hi):
    span = hi - lo
    safe = np.where(span > 0, span, 1.0)
    return np.where(span > 0, 2.0 * (X - lo) / safe - 1.0, 0.0)


def _cmd_predict(args) -> int:
    model = load_model(args.model_file)
    graph = model.graph
    dataset = parse_multilabel_svmlight(
        args.data, n_outputs=graph.n_outputs, n_inputs=graph.n_inputs
    )
    X = model.apply_scale(dataset.X)
    if args.infer == "bb" and graph.kind != DIRECTED:
        return _fail("branch-and-bound inference needs a directed model; use --infer icm or exhaustive")
    results = []
    if args.infer == "bb":
        config = BBConfig(cutoff=args.cutoff, max_states=args.max_states, escalate=args.escalate)
        for l in range(len(dataset)):
            results.append(bb_infer(graph, model.weights, X[l], config))
    elif args.infer == "exhaustive":
        for l in range(len(dataset)):
            results.append(exhaustive_infer(graph, model.weights, X[l]))
    else:
        y0 = np.ones(graph.n_outputs, dtype=np.int8)
        for l in range(len(dataset)):
            results.append(icm_infer(graph, model.weights, X[l], y0, max_sweeps=args.max_sweeps))
    write_predictions(args.out, results)
    print(f"wrote {len(results)} predictions to {args.out}")
    return 0


def _cmd_eval(args) -> int:
    preds = read_label_matrix(args.pred)
    truths = read_label_matrix(args.truth, n_outputs=preds.shape[1])
    print(evaluate(truths, preds).format_line())
    return 0


def _cmd_bench(args) -> int:
    if bool(args.s_list) == bool(args.k_list):
        return _fail("bench needs exactly one of --S-list or --k-list")
    if args.s_list:
        if not args.model_file or not args.data:
            return _fail("--S-list bench needs --model-file and --data")
        model = load_model(args.model_file)
        if model.graph.kind != DIRECTED:
            return _fail("the cutoff sweep runs branch-and-bound, which needs a directed model")
        dataset = parse_multilabel_svmlight(
            args.data, n_outputs=model.graph.n_outputs, n_inputs=model.graph.n_inputs
        )
        dataset = Dataset(model.apply_scale(dataset.X), dataset.Y)
        cutoffs = [float(t) for t in args.s_list.split(",") if t]
        records = run_s_sweep(model.graph, model.weights, dataset, cutoffs, args.max_states)
        csv = s_sweep_csv(records)
    else:
        k_list = [int(t) for t in args.k_list.split(",") if t]
        records = run_k_sweep(
            k_list,
            n_train=args.n_train,
            n_test=args.n_test,
            lam=args.lam,
            seed=args.seed,
            max_states=args.max_states if args.max_states is not None else 200_000,
        )
        csv = k_sweep_csv(records)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(csv)
    else:
        sys.stdout.write(csv)
    return 0


def _cmd_synth(args) -> int:
    kind = DIRECTED if args.kind == "sbn" else UNDIRECTED
    graph, weights = planted_model(
        args.k,
        args.d,
        kind=kind,
        topology=args.graph,
        seed=args.seed,
        bias_scale=args.bias_scale,
        input_scale=args.input_scale,
        edge_scale=args.edge_scale,
    )
    config = SynthConfig(graph, weights, args.n, seed=args.seed)
    dataset = sample_sbn(config) if kind == DIRECTED else sample_bm(config)
    write_multilabel_svmlight(dataset, args.out)
    if args.model_out:
        save_model(ModelFile(graph=graph, weights=weights), args.model_out)
        print(f"wrote planted model to {args.model_out}")
    print(f"wrote {len(dataset)} instances to {args.out}")
    return 0


_COMMANDS = {
    "train": _cmd_train,
    "predict": _cmd_predict,
    "eval": _cmd_eval,
    "bench": _cmd_bench,
    "synth": _cmd_synth,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except MargraphError as exc:
        print(f"margraph: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"margraph: error: {exc}", file=sys.stderr)
        return 1
