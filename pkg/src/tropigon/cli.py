"""
Command-line interface for tropigon.

Every subcommand reads JSON documents and writes a JSON document, a DOT file
or a single line to stdout.

Exit codes:
- 0: success
- 1: negative mathematical answer (not harmonic, not equivalent, nothing found)
- 2: usage or document error
"""

import argparse
import sys
from typing import Any, Callable, Dict, List, Optional

from loguru import logger

from . import config, gallery
from .divisor_theory import (
    Divisor,
    find_trigonal_divisor,
    linearly_equivalent,
    rank,
    reduce,
)
from .dot_export import DotOptions, to_dot
from .errors import DocumentError, TrigonalBuilderError, TropigonError
from .graph_core import edge_connectivity
from .harmonic_morphism import IndexedMorphism, check_morphism, pullback, remove_contractions
from .metric_graph import (
    MetricGraph,
    canonical_loopless_model,
    canonical_model,
    format_fraction,
    parse_point,
)
from .moduli_cells import (
    build_3_ladders,
    edge_relation,
    enumerate_trees,
    ladder_type,
    moduli_summary,
)
from .serialization import emit, read_document
from .trigonal_builder import trigonal_cover

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2


# ============= Helpers =============


def configure_logging() -> None:
    """Sends logs to stderr and, when TROPIGON_LOG_FILE is set, to a rotating file."""
    logger.remove()
    logger.add(sys.stderr, level=config.log_level())
    if config.log_file():
        logger.add(config.log_file(), rotation="10 MB", level=config.log_level())


def _read(path: str, kind: type, graph: Optional[MetricGraph] = None) -> Any:
    value = read_document(path, graph)
    if not isinstance(value, kind):
        raise DocumentError(f"{path}: expected a {kind.__name__} document")
    return value


def _output(text: str, path: Optional[str]) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
        logger.success(f"Wrote {path}")
    else:
        sys.stdout.write(text)


# ============= Subcommands =============


def cmd_info(args: argparse.Namespace) -> int:
    m = _read(args.graph, MetricGraph)
    canonical, _ = canonical_model(m)
    loopless, _ = canonical_loopless_model(m)
    report = {
        "genus": m.genus,
        "vertices": len(m.vertices),
        "edges": len(m.edges),
        "total_length": format_fraction(m.total_length),
        "edge_connectivity": edge_connectivity(m.graph),
        "canonical_vertices": len(canonical.vertices),
        "canonical_loopless_vertices": len(loopless.vertices),
        "loops": len(canonical.graph.loops()),
    }
    _output(emit(report), args.output)
    return EXIT_OK


def cmd_rank(args: argparse.Namespace) -> int:
    m = _read(args.graph, MetricGraph)
    d = _read(args.divisor, Divisor, m)
    print(rank(m, d))
    return EXIT_OK


def cmd_reduce(args: argparse.Namespace) -> int:
    m = _read(args.graph, MetricGraph)
    d = _read(args.divisor, Divisor, m)
    try:
        base = m.normalize(parse_point(args.base))
    except TropigonError as e:
        raise DocumentError(str(e), field="--base") from e
    _output(emit(reduce(m, d, base)), args.output)
    return EXIT_OK


def cmd_equiv(args: argparse.Namespace) -> int:
    m = _read(args.graph, MetricGraph)
    d1 = _read(args.first, Divisor, m)
    d2 = _read(args.second, Divisor, m)
    same = linearly_equivalent(m, d1, d2)
    print("true" if same else "false")
    return EXIT_OK if same else EXIT_NEGATIVE


def cmd_check_morphism(args: argparse.Namespace) -> int:
    phi = _read(args.morphism, IndexedMorphism)
    report = check_morphism(phi)
    _output(emit(report), args.output)
    return EXIT_OK if report.ok else EXIT_NEGATIVE


def cmd_pullback(args: argparse.Namespace) -> int:
    phi = _read(args.morphism, IndexedMorphism)
    target = phi.target_metric if phi.is_metric else None
    d = _read(args.divisor, Divisor, target)
    _output(emit(pullback(phi, d)), args.output)
    return EXIT_OK


def cmd_remove_contractions(args: argparse.Namespace) -> int:
    phi = _read(args.morphism, IndexedMorphism)
    _output(emit(remove_contractions(phi)), args.output)
    return EXIT_OK


def cmd_trigonal_cover(args: argparse.Namespace) -> int:
    m = _read(args.graph, MetricGraph)
    d = _read(args.divisor, Divisor, m) if args.divisor else None
    try:
        cover = trigonal_cover(m, d)
    except TrigonalBuilderError as e:
        logger.error(f"No cover: {str(e)}")
        return EXIT_NEGATIVE
    _output(emit(cover.morphism), args.output)
    if args.dot:
        _output(to_dot(cover, DotOptions(name="cover")), args.dot)
    return EXIT_OK


def cmd_find_divisor(args: argparse.Namespace) -> int:
    m = _read(args.graph, MetricGraph)
    d = find_trigonal_divisor(m)
    if d is None:
        logger.warning("No trigonal divisor found")
        return EXIT_NEGATIVE
    _output(emit(d, m if args.embed else None), args.output)
    return EXIT_OK


def cmd_ladders(args: argparse.Namespace) -> int:
    report: Dict[str, Any] = {}
    for n in range(2, args.max_genus + 1):
        trees = enumerate_trees(n)
        ladders = [ladder for t in trees for ladder in build_3_ladders(t)]
        report[str(n)] = {
            "trees": len(trees),
            "ladders": len(ladders),
            "vertices": sorted({len(ladder.graph.vertices) for ladder in ladders}),
            "edges": sorted({len(ladder.graph.edges) for ladder in ladders}),
            "classes": sorted({len(edge_relation(ladder_type(x)).classes) for x in ladders}),
        }
    _output(emit(report), args.output)
    return EXIT_OK


def cmd_moduli(args: argparse.Namespace) -> int:
    summary = moduli_summary(args.genus, args.jobs)
    _output(emit(summary), args.output)
    return EXIT_OK


def cmd_to_dot(args: argparse.Namespace) -> int:
    value = read_document(args.document)
    divisor = None
    if args.divisor:
        if not isinstance(value, MetricGraph):
            raise DocumentError("--divisor needs a metric_graph document")
        divisor = _read(args.divisor, Divisor, value)
    if isinstance(value, (Divisor, dict)):
        raise DocumentError(f"{args.document}: this document kind has no DOT rendering")
    _output(to_dot(value, DotOptions(name=args.name, divisor=divisor)), args.output)
    return EXIT_OK


def cmd_gallery(args: argparse.Namespace) -> int:
    if args.name in gallery.DIVISORS and args.divisor:
        m, d = gallery.DIVISORS[args.name]()
        _output(emit(d, m), args.output)
    elif args.name in gallery.GRAPHS:
        _output(emit(gallery.GRAPHS[args.name]()), args.output)
    elif args.name in gallery.MORPHISMS:
        _output(emit(gallery.MORPHISMS[args.name]()), args.output)
    else:
        raise DocumentError(f"unknown gallery entry {args.name!r}; known: {gallery.names()}")
    return EXIT_OK


# ============= CLI Functions =============


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """Parse command line arguments."""
    parser = argparse.ArgumentParser(
        prog="tropigon",
        description="Divisors, harmonic covers and trigonal moduli of metric graphs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name: str, handler: Callable[[argparse.Namespace], int], help: str) -> Any:
        p = sub.add_parser(name, help=help)
        p.set_defaults(handler=handler)
        p.add_argument("-o", "--output", type=str, help="Output file (default: stdout)")
        return p

    p = command("info", cmd_info, "Genus, sizes and connectivity of a metric graph")
    p.add_argument("graph", help="metric_graph document")

    p = command("rank", cmd_rank, "Baker-Norine rank of a divisor")
    p.add_argument("graph", help="metric_graph document")
    p.add_argument("divisor", help="divisor document")

    p = command("reduce", cmd_reduce, "Reduced divisor at a base point")
    p.add_argument("graph", help="metric_graph document")
    p.add_argument("divisor", help="divisor document")
    p.add_argument("--base", type=str, required=True, help='Base point, "v:ID" or "e:ID@p/q"')

    p = command("equiv", cmd_equiv, "Linear equivalence of two divisors")
    p.add_argument("graph", help="metric_graph document")
    p.add_argument("first", help="divisor document")
    p.add_argument("second", help="divisor document")

    p = command("check-morphism", cmd_check_morphism, "Harmonicity and degree report")
    p.add_argument("morphism", help="morphism document")

    p = command("pullback", cmd_pullback, "Pull a divisor on the target back to the source")
    p.add_argument("morphism", help="morphism document")
    p.add_argument("divisor", help="divisor document on the target")

    p = command("remove-contractions", cmd_remove_contractions, "Contraction-free modification")
    p.add_argument("morphism", help="morphism document")

    p = command("trigonal-cover", cmd_trigonal_cover, "Degree-3 cover of a tree")
    p.add_argument("graph", help="metric_graph document")
    p.add_argument("divisor", nargs="?", help="divisor document (searched for when omitted)")
    p.add_argument("--dot", type=str, help="Also write the cover as DOT to this file")

    p = command("find-divisor", cmd_find_divisor, "Search for a degree-3 divisor of rank 1")
    p.add_argument("graph", help="metric_graph document")
    p.add_argument("--embed", action="store_true", help="Embed the graph in the divisor document")

    p = command("ladders", cmd_ladders, "3-ladder counts per genus")
    p.add_argument("--max-genus", type=int, default=5, help="Largest genus (default: 5)")

    p = command("moduli", cmd_moduli, "Maximal cells and their codimension-1 connectivity")
    p.add_argument("--genus", type=int, required=True, help="Genus, at least 3")
    p.add_argument("--jobs", type=int, help="Worker processes (default: TROPIGON_JOBS)")

    p = command("to-dot", cmd_to_dot, "Render a document as DOT")
    p.add_argument("document", help="graph, metric_graph, morphism or trigonal_type document")
    p.add_argument("--divisor", type=str, help="divisor document to annotate a metric graph with")
    p.add_argument("--name", type=str, default="G", help="DOT graph name (default: G)")

    p = command("gallery", cmd_gallery, "Emit a named example document")
    p.add_argument("name", help=f"one of {sorted(set(gallery.GRAPHS) | set(gallery.MORPHISMS))}")
    p.add_argument("--divisor", action="store_true", help="Emit the example's divisor instead")

    return parser.parse_args(argv)


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point for the command-line interface."""
    try:
        args = parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    configure_logging()
    try:
        return args.handler(args)
    except DocumentError as e:
        logger.error(f"Invalid input: {str(e)}")
        return EXIT_USAGE
    except TropigonError as e:
        logger.error(f"{args.command} failed: {str(e)}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
