"""
DOT export of graphs, divisors and covers.

Output is deterministic: vertices and edges are written in sorted id order.
Edges of one fibre class share a color; indices and lengths appear as edge
labels, chips of a divisor as vertex or edge annotations.
"""

from collections import defaultdict
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Union

from .divisor_theory import Divisor
from .errors import TropigonError
from .graph_core import EdgeId, WeightedGraph
from .harmonic_morphism import IndexedMorphism
from .metric_graph import MetricGraph, format_fraction
from .moduli_cells import TrigonalType, edge_relation
from .trigonal_builder import TrigonalCover

PALETTE = (
    "red",
    "blue",
    "forestgreen",
    "orange",
    "purple",
    "brown",
    "deeppink",
    "cyan4",
    "goldenrod",
    "navy",
    "olivedrab",
    "tomato",
    "slateblue",
    "darkseagreen4",
    "maroon",
    "gray40",
)


@dataclass
class DotOptions:
    """
    Rendering options.

    Attributes:
        name (str): Graph name
        divisor (Optional[Divisor]): Chips to annotate on a metric graph or cover source
        show_lengths (bool): Whether to print edge lengths
    """

    name: str = "G"
    divisor: Optional[Divisor] = None
    show_lengths: bool = True


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _chip_labels(divisor: Optional[Divisor]) -> Dict[str, List[str]]:
    labels: Dict[str, List[str]] = defaultdict(list)
    if divisor is None:
        return labels
    for p, c in divisor.items():
        if p.vertex is not None:
            labels[f"v:{p.vertex}"].append(f"[{c}]")
        else:
            labels[f"e:{p.edge}"].append(f"{c}@{format_fraction(p.offset)}")
    return labels


def _graph_lines(
    graph: WeightedGraph,
    prefix: str,
    lengths: Optional[Dict[EdgeId, Any]],
    colors: Dict[EdgeId, str],
    notes: Dict[EdgeId, str],
    options: DotOptions,
    indent: str,
) -> List[str]:
    chips = _chip_labels(options.divisor)
    lines = []
    for v in sorted(graph.vertices):
        label = v if graph.vertices[v] == 0 else f"{v} (w={graph.vertices[v]})"
        if chips.get(f"v:{v}"):
            label += " " + " ".join(chips[f"v:{v}"])
        lines.append(f"{indent}{_quote(prefix + v)} [label={_quote(label)}];")
    for e in sorted(graph.edges):
        a, b = graph.edges[e]
        parts = [e]
        if lengths is not None and options.show_lengths:
            parts.append(f"l={format_fraction(lengths[e])}")
        if e in notes:
            parts.append(notes[e])
        parts.extend(chips.get(f"e:{e}", []))
        attrs = [f"label={_quote(' '.join(parts))}"]
        if e in colors:
            attrs.append(f"color={_quote(colors[e])}")
        lines.append(f"{indent}{_quote(prefix + a)} -- {_quote(prefix + b)} [{', '.join(attrs)}];")
    return lines


def _morphism_lines(
    phi: IndexedMorphism, classes: List[List[EdgeId]], options: DotOptions
) -> List[str]:
    colors: Dict[EdgeId, str] = {}
    target_colors: Dict[EdgeId, str] = {}
    for i, members in enumerate(classes):
        color = PALETTE[i % len(PALETTE)]
        for e in members:
            colors[e] = color
            if e in phi.edge_map:
                target_colors[phi.edge_map[e]] = color
    notes = {e: f"μ={phi.indices[e]}" for e in phi.source.edges}
    lines = ["  subgraph cluster_source {", f"    label={_quote('source')};"]
    lines += _graph_lines(phi.source, "s:", phi.source_lengths, colors, notes, options, "    ")
    lines += ["  }", "  subgraph cluster_target {", f"    label={_quote('target')};"]
    plain = DotOptions(name=options.name, show_lengths=options.show_lengths)
    lines += _graph_lines(phi.target, "t:", phi.target_lengths, target_colors, {}, plain, "    ")
    lines.append("  }")
    return lines


def _fibre_classes(phi: IndexedMorphism) -> List[List[EdgeId]]:
    classes = [phi.fibre(te) for te in sorted(phi.target.edges)]
    classes = [members for members in classes if members]
    classes += [[e] for e in phi.contracted_edges()]
    return classes


def to_dot(
    value: Union[WeightedGraph, MetricGraph, IndexedMorphism, TrigonalType, TrigonalCover],
    options: Optional[DotOptions] = None,
) -> str:
    """
    Renders a value as a DOT graph.

    Args:
        value: Graph, metric graph, morphism, trigonal type or trigonal cover
        options: Rendering options

    Returns:
        str: DOT text ending with a newline

    Raises:
        TropigonError: If the value cannot be rendered
    """
    options = options or DotOptions()
    lines = [f"graph {_quote(options.name)} {{"]
    if isinstance(value, MetricGraph):
        lines += _graph_lines(value.graph, "", value.lengths, {}, {}, options, "  ")
    elif isinstance(value, WeightedGraph):
        lines += _graph_lines(value, "", None, {}, {}, options, "  ")
    elif isinstance(value, TrigonalType):
        classes = [sorted(members) for members in edge_relation(value).classes]
        lines += _morphism_lines(value.morphism, classes, options)
    elif isinstance(value, TrigonalCover):
        lines += _morphism_lines(value.morphism, _fibre_classes(value.morphism), options)
    elif isinstance(value, IndexedMorphism):
        lines += _morphism_lines(value, _fibre_classes(value), options)
    else:
        raise TropigonError(f"cannot render {type(value).__name__} as DOT")
    lines.append("}")
    return "\n".join(lines) + "\n"
