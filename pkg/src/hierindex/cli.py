"""Command line entry point: build, query, eval, sweep, inspect."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from .categorize import categorize_text
from .corpus import (IngestReport, LAYOUTS, PreprocessConfig, default_stopwords, load_corpus,
                     read_stopwords)
from .evaluate import (SWEEP_FIELDS, accuracy_protocol, compare_baselines,
                       hierarchical_f_measure, sweep, text_vectors)
from .hierarchy import ClusterTree
from .indexfile import load_index, save_index
from .pipeline import BuildParams, build_index

log = logging.getLogger("hierindex")


def _int_list(s: str) -> list[int]:
    try:
        vals = [int(v) for v in s.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {s!r}")
    if not vals or min(vals) < 1:
        raise argparse.ArgumentTypeError("values must be positive integers")
    return vals


def _beta_list(s: str) -> list[float]:
    try:
        vals = [float(v) for v in s.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {s!r}")
    if not vals or min(vals) <= 0:
        raise argparse.ArgumentTypeError("beta values must be > 0")
    return vals


def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _positive_float(s: str) -> float:
    v = float(s)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {v}")
    return v


def _fraction(s: str) -> float:
    v = float(s)
    if not 0 < v <= 1:
        raise argparse.ArgumentTypeError(f"must be in (0, 1], got {v}")
    return v


def _existing_dir(s: str) -> Path:
    p = Path(s)
    if not p.is_dir():
        raise argparse.ArgumentTypeError(f"not a directory: {s}")
    return p


def _existing_file(s: str) -> Path:
    p = Path(s)
    if not p.is_file():
        raise argparse.ArgumentTypeError(f"no such file: {s}")
    return p


def _add_corpus_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("preprocessing")
    g.add_argument("--layout", choices=LAYOUTS, default="newsgroups")
    g.add_argument("--min-df", type=_positive_int, default=2)
    g.add_argument("--max-df-frac", type=_fraction, default=0.5)
    g.add_argument("--stopwords", type=_existing_file, metavar="FILE")
    g.add_argument("--min-token-len", type=_positive_int, default=2)
    g.add_argument("--no-strip-headers", action="store_true",
                   help="keep header lines (stripped by default for the newsgroups layout)")


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("clustering")
    g.add_argument("--beta", type=_positive_float, default=0.5, help="decay factor (default 0.5)")
    g.add_argument("--min-split-size", type=_positive_int, default=4)
    g.add_argument("--literal-offset", action="store_true",
                   help="offset split centroids by the raw mean projection")
    g.add_argument("--normalize", action="store_true", help="unit-length semantic vectors")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hierindex", description=__doc__)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="index a corpus directory")
    p.add_argument("--input", type=_existing_dir, required=True)
    p.add_argument("--output", type=Path, required=True)
    p.add_argument("--topics", type=_positive_int, default=20)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--top-terms", type=_positive_int, default=10)
    p.add_argument("--json", action="store_true")
    _add_model_flags(p)
    _add_corpus_flags(p)

    p = sub.add_parser("query", help="categorize a text into an index")
    p.add_argument("--index", type=_existing_file, required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--text")
    src.add_argument("--file", type=_existing_file)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("eval", help="accuracy protocol and F-measure comparison")
    p.add_argument("--index", type=_existing_file, required=True)
    p.add_argument("--test", type=_existing_dir, required=True)
    p.add_argument("--layout", choices=LAYOUTS, default="newsgroups")
    p.add_argument("--k-list", type=_int_list, default=None)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", type=Path, help="write results as JSON")
    p.add_argument("--figures", type=Path, metavar="DIR")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("sweep", help="cluster counts and metrics over topics x beta")
    p.add_argument("--input", type=_existing_dir, required=True)
    p.add_argument("--test", type=_existing_dir)
    p.add_argument("--topics", type=_int_list, default=[5, 10, 20, 40])
    p.add_argument("--betas", type=_beta_list, default=[0.25, 0.5, 0.75, 1.0])
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--figures", type=Path, metavar="DIR")
    p.add_argument("--min-split-size", type=_positive_int, default=4)
    p.add_argument("--literal-offset", action="store_true")
    p.add_argument("--normalize", action="store_true")
    _add_corpus_flags(p)

    p = sub.add_parser("inspect", help="describe an index")
    p.add_argument("--index", type=_existing_file, required=True)
    p.add_argument("target", nargs="?", default="tree", help='"tree", "root" or a node id')
    p.add_argument("--json", action="store_true")
    return parser


def _preprocess_config(args) -> PreprocessConfig:
    return PreprocessConfig(
        min_df=args.min_df, max_df_frac=args.max_df_frac, min_token_len=args.min_token_len,
        strip_headers=args.layout == "newsgroups" and not args.no_strip_headers,
        stopwords=read_stopwords(args.stopwords) if args.stopwords else default_stopwords(),
    )


def _emit(args, payload: dict, text: str) -> None:
    print(json.dumps(payload, indent=2) if getattr(args, "json", False) else text)


def cmd_build(args) -> int:
    report = IngestReport()
    docs = load_corpus(args.input, args.layout, report)
    params = BuildParams(topics=args.topics, beta=args.beta, seed=args.seed,
                         min_split_size=args.min_split_size, literal_offset=args.literal_offset,
                         normalize=args.normalize, top_terms=args.top_terms)
    tree, matrix = build_index(docs, params, _preprocess_config(args), report)
    save_index(tree, args.output)
    counts = list(reversed(tree.level_counts))
    payload = {"index": str(args.output), "documents": len(docs), "terms": matrix.shape[0],
               "topics": tree.lsi.k, "nodes": len(tree), "levels": len(counts),
               "level_counts": counts, "skipped": len(report.skipped),
               "empty_docs": len(report.empty_docs)}
    _emit(args, payload,
          f"wrote {args.output}: {len(docs)} documents, {matrix.shape[0]} terms, k={tree.lsi.k}\n"
          f"{len(tree)} clusters over {len(counts)} levels, root to leaves: "
          + "-".join(map(str, counts)))
    return 0


def _node_line(tree: ClusterTree, nid: int, terms: int = 3) -> str:
    n = tree.nodes[nid]
    top = ", ".join(t for t, _ in n.top_terms[:terms])
    return f"node {nid} (level {n.level}, {n.gaussian.n} docs) [{top}]"


def cmd_query(args) -> int:
    tree = load_index(args.index)
    text = args.text if args.text is not None else args.file.read_text(errors="replace")
    res = categorize_text(tree, text)
    target = tree.nodes[res.node]
    payload = res.to_dict() | {"top_terms": target.top_terms, "size": target.gaussian.n}
    lines = [f"{'  ' * depth}{_node_line(tree, nid)} distance={d:.4f}"
             for depth, (nid, d) in enumerate(zip(res.path, res.distances))]
    lines.append(f"category: node {res.node}")
    lines += [f"warning: {w}" for w in res.warnings]
    _emit(args, payload, "\n".join(lines))
    return 0


def cmd_eval(args) -> int:
    tree = load_index(args.index)
    report = IngestReport()
    test_docs = load_corpus(args.test, args.layout, report)
    if not test_docs:
        raise RuntimeError(f"no test documents under {args.test}")
    acc = accuracy_protocol(tree, tree.doc_vectors, text_vectors(tree, test_docs))
    payload = {"accuracy": acc, "test_documents": len(test_docs),
               "leaf_clusters": tree.level_counts[0], "nodes": len(tree)}
    lines = [f"accuracy: {acc:.2f}% over {len(test_docs)} test documents"]
    if tree.labels and any(l is not None for l in tree.labels):
        rows = compare_baselines(tree, args.k_list, seed=args.seed)
        payload["f_measure"] = rows
        payload["hierarchical_f_measure"] = hierarchical_f_measure(tree, tree.labels)
        lines.append("F-measure (class-weighted best match):")
        lines += [f"  k={r['k']:<6d} {r['method']:<9s} {r['f_measure']:.4f}" for r in rows]
        lines.append(f"  all tree nodes        {payload['hierarchical_f_measure']:.4f}")
        if args.figures:
            from .plotting import fmeasure_comparison
            args.figures.mkdir(parents=True, exist_ok=True)
            fig = fmeasure_comparison(rows, args.figures / "fmeasure.png")
            lines.append(f"figure: {fig}")
    if args.out:
        args.out.write_text(json.dumps(payload, indent=2))
    _emit(args, payload, "\n".join(lines))
    return 0


def cmd_sweep(args) -> int:
    docs = load_corpus(args.input, args.layout)
    test_docs = load_corpus(args.test, args.layout) if args.test else None
    rows = sweep(docs, args.topics, args.betas, seed=args.seed, config=_preprocess_config(args),
                 min_split_size=args.min_split_size, literal_offset=args.literal_offset,
                 normalize=args.normalize, test_docs=test_docs)
    with open(args.out, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=SWEEP_FIELDS)
        w.writeheader()
        w.writerows(rows)
    print(f"wrote {len(rows)} rows to {args.out}")
    if args.figures:
        from .plotting import sweep_figures
        for f in sweep_figures(rows, args.figures):
            print(f"figure: {f}")
    return 0


def cmd_inspect(args) -> int:
    tree = load_index(args.index)
    if args.target == "tree":
        lines = [f"{len(tree.doc_ids)} documents, {len(tree)} clusters, level counts "
                 + "-".join(map(str, reversed(tree.level_counts)))]

        def walk(nid, depth):
            lines.append("  " * depth + _node_line(tree, nid))
            for c in tree.nodes[nid].children:
                walk(c, depth + 1)
        walk(tree.root, 0)
        _emit(args, {"root": tree.root, "level_counts": tree.level_counts,
                     "nodes": len(tree)}, "\n".join(lines))
        return 0
    nid = tree.root if args.target == "root" else int(args.target)
    if nid not in tree.nodes:
        raise KeyError(f"unknown node id {nid}")
    n = tree.nodes[nid]
    payload = {"id": nid, "level": n.level, "size": n.gaussian.n, "children": list(n.children),
               "top_terms": n.top_terms}
    lines = [_node_line(tree, nid, terms=10), f"children: {list(n.children) or 'none (leaf)'}"]
    if n.is_leaf:
        payload["members"] = [tree.doc_ids[i] for i in n.doc_indices]
        lines.append("members: " + " ".join(payload["members"]))
    _emit(args, payload, "\n".join(lines))
    return 0


COMMANDS = {"build": cmd_build, "query": cmd_query, "eval": cmd_eval,
            "sweep": cmd_sweep, "inspect": cmd_inspect}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "inspect" and args.target not in ("tree", "root"):
        try:
            int(args.target)
        except ValueError:
            parser.error(f'inspect target must be "tree", "root" or an integer, got {args.target!r}')
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except KeyboardInterrupt:
        return 130
    except Exception as e:  # noqa: BLE001 - one-line error, exit 1
        print(f"hierindex: error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
