import argparse
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

sys.path.append(str(Path(__file__).resolve().parents[2]))

from app_configs import RANDOM_GRAPH_EDGE_PROBABILITIES, RANDOM_GRAPH_SEED
from src.exceptions import InvalidArgumentError
from src.minimal_zeros import enumerate_minimal_zeros
from src.model_data import MatrixMode, SymMatrix
from src.utils.utils import read_edge_list, write_edge_list
from src.zero_graph import ZerosGraph, build_graph, extended_support_set


@dataclass(frozen=True)
class PlainGraph:
    """An undirected graph on ``{1..n}``; edges stored as ``(i, j)`` with ``i < j``."""

    n: int
    edges: frozenset[tuple[int, int]] = frozenset()

    def __post_init__(self):
        if self.n < 1:
            raise InvalidArgumentError(f"graph needs at least one vertex, got n={self.n}")
        for i, j in self.edges:
            if i == j:
                raise InvalidArgumentError(f"self-loop at vertex {i}")
            if not 1 <= i < j <= self.n:
                raise InvalidArgumentError(f"edge ({i},{j}) outside 1..{self.n}")

    @classmethod
    def from_edges(cls, n: int, edges) -> "PlainGraph":
        return cls(n, frozenset((min(i, j), max(i, j)) for i, j in edges))

    @classmethod
    def from_text(cls, text: str) -> "PlainGraph":
        n, edges = read_edge_list(text)
        return cls.from_edges(n, edges)

    def as_zeros_graph(self) -> ZerosGraph:
        return ZerosGraph(self.n, self.edges)


def matrix_from_graph(graph: PlainGraph) -> SymMatrix:
    """The 0/1 matrix ``Y`` realizing ``graph`` as its minimal zeros graph.

    ``Y_ii = 0``, ``Y_ij = 0`` on edges and ``1`` otherwise; ``Y`` is nonnegative and so
    copositive.
    """
    rows = [[0 if i == j or (min(i, j), max(i, j)) in graph.edges else 1 for j in range(1, graph.n + 1)] for i in range(1, graph.n + 1)]
    return SymMatrix(rows, mode=MatrixMode.EXACT)


def round_trip(graph: PlainGraph) -> bool:
    """True iff the minimal zeros of ``matrix_from_graph(graph)`` are exactly ``e_1..e_n``
    and their graph is ``graph``.
    """
    matrix = matrix_from_graph(graph)
    zeros = enumerate_minimal_zeros(matrix)

    if [zero.support.indices() for zero in zeros] != [(k,) for k in range(1, graph.n + 1)]:
        return False
    return build_graph(extended_support_set(matrix, zeros)) == graph.as_zeros_graph()


def random_graph(n: int, probability: float, rng: np.random.Generator) -> PlainGraph:
    """Erdős-Rényi graph: each pair ``i < j`` is an edge with ``probability``."""
    if not 0 <= probability <= 1:
        raise InvalidArgumentError(f"edge probability must be within [0, 1], got {probability}")
    pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    keep = rng.random(len(pairs)) < probability
    return PlainGraph(n, frozenset(pair for pair, k in zip(pairs, keep) if k))


def random_graph_corpus(
    count: int, sizes: range, seed: int = RANDOM_GRAPH_SEED, probabilities=RANDOM_GRAPH_EDGE_PROBABILITIES
) -> list[PlainGraph]:
    """A reproducible list of random graphs cycling through ``sizes`` and ``probabilities``."""
    rng = np.random.default_rng(seed)
    return [
        random_graph(sizes[k % len(sizes)], probabilities[k % len(probabilities)], rng)
        for k in range(count)
    ]


def generate_random_graphs(n: int, count: int, probability: float, location: str, seed: Optional[int] = None) -> None:
    """Write random edge-lists to ``location``.

    Args:
        n: number of vertices
        count: number of graphs
        probability: edge probability
        location: path to the output folder
        seed: RNG seed, defaults to ``RANDOM_GRAPH_SEED``
    """
    rng = np.random.default_rng(RANDOM_GRAPH_SEED if seed is None else seed)
    os.makedirs(location, exist_ok=True)
    for k in range(count):
        graph = random_graph(n, probability, rng)
        filename = os.path.join(location, f"graph{n}_{k}.txt")
        if os.path.exists(filename):
            print(filename, "already exist.")
            continue
        write_edge_list(graph.n, set(graph.edges), filename)
        print(f"Saved graph to {os.path.join(os.getcwd(), filename)}")


if __name__ == "__main__":
    parser = argparse.ArgumentParser(
        description="Random edge-list generator",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )

    parser.add_argument("n", type=int, help="num of vertices")
    parser.add_argument("-count", type=int, help="num of graphs", default=1)
    parser.add_argument("-p", type=float, help="edge probability", default=0.5)
    parser.add_argument("-seed", type=int, help="random seed", default=RANDOM_GRAPH_SEED)
    parser.add_argument(
        "-path", type=str, help="folder location to store generated edge lists", default="input"
    )
    args = parser.parse_args()
    generate_random_graphs(args.n, args.count, args.p, args.path, args.seed)
