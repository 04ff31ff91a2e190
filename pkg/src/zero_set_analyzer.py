"""
This module contains the ZeroSetAnalysis class, which runs the minimal zeros pipeline on a
copositive matrix, and the command-line interface built on top of it.

"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Optional

from app_configs import (
    CLIQUE_ORACLE_MAX_VERTICES,
    DEFAULT_MODE,
    ENUMERATION_ORACLE_MAX_DIMENSION,
    MODE_ENV_VAR,
    POSITIVITY_EPS,
    RANK_EPS,
    ZERO_EPS,
)
from src.copositivity import CopositivityVerdict, check_copositive
from src.exceptions import CopzeroError, InvalidArgumentError
from src.minimal_zeros import (
    CopositivityStatus,
    MinimalZero,
    MinimalZeroSearch,
    enumerate_minimal_zeros_unpruned,
    verify_determinant_gate,
    verify_nonnegative_products,
    verify_pivot_independence,
    verify_support_incomparability,
)
from src.generate_reports import graph_to_dot, matrix_to_json, matrix_to_text, render_text, report_to_json
from src.model_data import SupportSet, SymMatrix, TolerancePolicy, parse_matrix, resolve_mode
from src.utils.graph_generator import PlainGraph, matrix_from_graph
from src.utils.utils import (
    load_fixture_text,
    read_point_text,
    write_report_to_file,
)
from src.zero_graph import (
    Clique,
    ExtendedSupportPair,
    CliqueConditionsReport,
    Representation,
    ZerosGraph,
    build_graph,
    build_graph_quadratic,
    build_representation,
    extended_support_set,
    maximal_cliques,
    maximal_cliques_bruteforce,
    verify_cliques_maximal,
    verify_clique_conditions,
    verify_pstar_incomparability,
)
from src.zero_set import (
    OracleReport,
    SimplexPoint,
    component_membership,
    hull_membership,
    is_zero,
    oracle_equivalence,
    verify_clique_extension,
    verify_component_psd,
    verify_full_support_exclusivity,
    verify_vertex_identification,
)

logger = logging.getLogger(__name__)


class PipelineStage(Enum):
    COPOSITIVITY = 0
    MINIMAL_ZEROS = 1
    GRAPH = 2
    CLIQUES = 3
    REPRESENTATION = 4
    VERIFY = 5


@dataclass
class MembershipResult:
    point: SimplexPoint
    is_zero: bool
    support: SupportSet
    by_support: set[int]
    by_hull: set[int]


@dataclass
class AnalysisReport:
    """Everything the pipeline computed for one matrix; stages not run stay empty."""

    matrix: SymMatrix
    stages: list[PipelineStage] = field(default_factory=list)
    copositivity: Optional[CopositivityVerdict] = None
    copositivity_status: CopositivityStatus = CopositivityStatus.UNVERIFIED
    zeros: list[MinimalZero] = field(default_factory=list)
    subsets_tested: int = 0
    subsets_pruned: int = 0
    pairs: list[ExtendedSupportPair] = field(default_factory=list)
    graph: Optional[ZerosGraph] = None
    cliques: list[Clique] = field(default_factory=list)
    representation: Optional[Representation] = None
    clique_conditions: Optional[CliqueConditionsReport] = None
    verification: dict[str, bool] = field(default_factory=dict)
    oracle: Optional[OracleReport] = None
    membership: Optional[MembershipResult] = None
    warnings: list[str] = field(default_factory=list)

    @property
    def verified(self) -> bool:
        """True iff every verification that ran passed."""
        checks = all(self.verification.values())
        return checks and (self.oracle is None or self.oracle.passed)


class ZeroSetAnalysis:
    """Runs the pipeline stages on a matrix, each stage on top of the previous ones.

    Args:
        matrix (SymMatrix): the matrix to analyze
        check_copositivity (bool, optional): whether to run the copositivity gate first.
            Defaults to True.

    Attributes:
        matrix (SymMatrix): the matrix
        report (AnalysisReport): results of the stages run so far
    """

    def __init__(self, matrix: SymMatrix, check_copositivity: bool = True):
        self.matrix = matrix
        self.check_copositivity = check_copositivity
        self.report = AnalysisReport(matrix)

    def _done(self, stage: PipelineStage) -> bool:
        return stage in self.report.stages

    def run_copositivity(self) -> CopositivityVerdict:
        verdict = check_copositive(self.matrix)
        self.report.copositivity = verdict
        self.report.copositivity_status = (
            CopositivityStatus.VERIFIED if verdict.is_copositive else CopositivityStatus.REFUTED
        )
        self.report.warnings.extend(verdict.warnings)
        self.report.stages.append(PipelineStage.COPOSITIVITY)
        logger.info("copositivity: %s (%s)", verdict.is_copositive, verdict.method.value)
        return verdict

    def run_minimal_zeros(self) -> list[MinimalZero]:
        if self.check_copositivity and not self._done(PipelineStage.COPOSITIVITY):
            self.run_copositivity()
        search = MinimalZeroSearch(self.matrix, self.report.copositivity)
        self.report.zeros = search.run()
        self.report.copositivity_status = search.status
        self.report.subsets_tested = search.tested
        self.report.subsets_pruned = search.pruned
        self.report.warnings.extend(search.warnings)
        self.report.stages.append(PipelineStage.MINIMAL_ZEROS)
        return self.report.zeros

    def run_graph(self) -> ZerosGraph:
        if not self._done(PipelineStage.MINIMAL_ZEROS):
            self.run_minimal_zeros()
        self.report.pairs = extended_support_set(self.matrix, self.report.zeros)
        self.report.graph = build_graph(self.report.pairs)
        self.report.stages.append(PipelineStage.GRAPH)
        logger.info("graph: %d vertices, %d edges", self.report.graph.n, len(self.report.graph.edges))
        return self.report.graph

    def run_cliques(self) -> list[Clique]:
        if not self._done(PipelineStage.GRAPH):
            self.run_graph()
        self.report.cliques = maximal_cliques(self.report.graph)
        self.report.stages.append(PipelineStage.CLIQUES)
        return self.report.cliques

    def run_representation(self) -> Representation:
        if not self._done(PipelineStage.CLIQUES):
            self.run_cliques()
        self.report.representation = build_representation(
            self.matrix, self.report.zeros, self.report.cliques, self.report.graph
        )
        self.report.stages.append(PipelineStage.REPRESENTATION)
        return self.report.representation

    def run_verification(self, grid: Optional[int] = None) -> dict[str, bool]:
        """Runs every structural check, plus the grid oracle when ``grid`` is given."""
        if not self._done(PipelineStage.REPRESENTATION):
            self.run_representation()

        matrix, report = self.matrix, self.report
        zeros, graph, representation = report.zeros, report.graph, report.representation
        report.clique_conditions = verify_clique_conditions(report.pairs, report.cliques)

        checks = {
            "support_incomparability": verify_support_incomparability(zeros),
            "determinant_gate": verify_determinant_gate(matrix, zeros),
            "nonnegative_products": verify_nonnegative_products(matrix, zeros),
            "pivot_independence": verify_pivot_independence(matrix, zeros),
            "edge_definitions_agree": build_graph_quadratic(matrix, zeros) == graph,
            "cliques_maximal": verify_cliques_maximal(graph, report.cliques),
            "clique_coverage": report.clique_conditions.coverage,
            "clique_pstar_in_M": report.clique_conditions.pstar_in_M,
            "clique_separation": report.clique_conditions.separation,
            "pstar_incomparability": verify_pstar_incomparability(representation),
            "representation_valid": representation.is_valid,
            "full_support_exclusivity": verify_full_support_exclusivity(matrix, representation),
            "clique_extension": verify_clique_extension(representation, graph),
            "vertex_identification": verify_vertex_identification(representation, zeros),
            "component_psd": verify_component_psd(matrix, representation),
        }
        if matrix.p <= ENUMERATION_ORACLE_MAX_DIMENSION:
            unpruned = enumerate_minimal_zeros_unpruned(matrix)
            checks["enumeration_oracle"] = unpruned == [zero.support for zero in zeros]
        if graph.n <= CLIQUE_ORACLE_MAX_VERTICES:
            checks["clique_oracle"] = maximal_cliques_bruteforce(graph) == report.cliques

        report.verification = checks
        if grid is not None:
            report.oracle = oracle_equivalence(matrix, representation, grid)

        for name, passed in checks.items():
            if not passed:
                logger.warning("verification failed: %s", name)
        report.stages.append(PipelineStage.VERIFY)
        return checks

    def run_until(self, stage: PipelineStage, grid: Optional[int] = None) -> AnalysisReport:
        """Runs every stage up to and including ``stage``."""
        if stage is PipelineStage.VERIFY:
            self.run_verification(grid)
        else:
            {
                PipelineStage.COPOSITIVITY: self.run_copositivity,
                PipelineStage.MINIMAL_ZEROS: self.run_minimal_zeros,
                PipelineStage.GRAPH: self.run_graph,
                PipelineStage.CLIQUES: self.run_cliques,
                PipelineStage.REPRESENTATION: self.run_representation,
            }[stage]()
        return self.report

    def run_membership(self, values) -> MembershipResult:
        """Normalizes a nonnegative vector onto the simplex and locates it in ``T₀``."""
        if not self._done(PipelineStage.REPRESENTATION):
            self.run_representation()
        point = SimplexPoint.of(self.matrix, values, normalize=True)
        representation = self.report.representation
        result = MembershipResult(
            point,
            is_zero(self.matrix, point),
            point.support(self.matrix),
            component_membership(representation, self.matrix, point),
            hull_membership(representation, self.matrix, point),
        )
        self.report.membership = result
        return result


def run_pipeline(
    matrix: SymMatrix,
    until: PipelineStage = PipelineStage.VERIFY,
    check_copositivity: bool = True,
    grid: Optional[int] = None,
) -> AnalysisReport:
    """Runs the pipeline on ``matrix`` up to and including ``until``.

    Args:
        matrix (SymMatrix): the matrix to analyze
        until (PipelineStage, optional): the last stage to run. Defaults to VERIFY.
        check_copositivity (bool, optional): whether to run the copositivity gate. Defaults
            to True.
        grid (int, optional): grid denominator for the zero-set oracle, run during VERIFY.
            Defaults to None (no grid oracle).

    Returns:
        AnalysisReport: the collected results
    """
    analysis = ZeroSetAnalysis(matrix, check_copositivity=check_copositivity)
    analysis.run_until(until, grid)
    return analysis.report


COMMAND_STAGES = {
    "analyze": PipelineStage.VERIFY,
    "check-copositive": PipelineStage.COPOSITIVITY,
    "minimal-zeros": PipelineStage.MINIMAL_ZEROS,
    "graph": PipelineStage.GRAPH,
    "cliques": PipelineStage.CLIQUES,
    "representation": PipelineStage.REPRESENTATION,
    "membership": PipelineStage.REPRESENTATION,
    "verify": PipelineStage.VERIFY,
}


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    """The ``copzero`` argument parser with one subcommand per pipeline stage."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "input",
        nargs="?",
        type=str,
        help="path to the matrix file (whitespace rows or JSON); reads stdin when omitted",
        default=None,
    )
    common.add_argument("-f", "--fixture", type=str, help="built-in fixture name", default=None)
    common.add_argument(
        "--mode",
        choices=["exact", "float"],
        help=f"arithmetic mode; falls back to ${MODE_ENV_VAR}, then to automatic detection",
        default=None,
    )
    common.add_argument("--rank-eps", type=_positive_float, help="relative rank threshold", default=RANK_EPS)
    common.add_argument("--zero-eps", type=_positive_float, help="scalar-is-zero threshold", default=ZERO_EPS)
    common.add_argument(
        "--positivity-eps", type=_positive_float, help="strict-positivity threshold", default=POSITIVITY_EPS
    )
    common.add_argument("--json", action="store_true", help="print the JSON report")
    common.add_argument(
        "--require-copositive",
        action="store_true",
        help="exit with status 2 when the matrix is not copositive; without it a negative "
        "verdict is only reported and the exit status stays 0",
    )
    common.add_argument(
        "--skip-copositivity", action="store_true", help="do not run the copositivity gate"
    )
    common.add_argument("-o", "--output", type=str, help="path to the output report file", default=None)
    _add_verbosity(common)

    parser = argparse.ArgumentParser(
        prog="copzero",
        description="Minimal zeros, minimal zeros graph and zero-set representation of a copositive matrix",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    commands = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help: str) -> argparse.ArgumentParser:
        return commands.add_parser(
            name, parents=[common], help=help, description=help, formatter_class=argparse.ArgumentDefaultsHelpFormatter
        )

    analyze = add(
        "analyze",
        "run the full pipeline and all structural checks; a matrix that is not copositive "
        "exits 0 unless --require-copositive is given",
    )
    analyze.add_argument("--grid", type=_positive_int, help="also run the grid oracle", default=None)
    add("check-copositive", "check copositivity only")
    add("minimal-zeros", "enumerate the normalized minimal zeros")
    graph = add("graph", "build the minimal zeros graph")
    graph.add_argument("--dot", action="store_true", help="print the graph in DOT format")
    add("cliques", "list the maximal cliques of the minimal zeros graph")
    add("representation", "build the minimal representation of the zero set")
    membership = add("membership", "locate a point in the zero set")
    membership.add_argument("--point", type=str, required=True, help="path to the point file")
    verify = add("verify", "run all checks and the grid oracle")
    verify.add_argument("--grid", type=_positive_int, help="grid denominator", default=6)

    from_graph = commands.add_parser(
        "from-graph",
        help="build the 0/1 matrix realizing a graph",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    from_graph.add_argument("edgelist", type=str, help="path to the edge-list file")
    from_graph.add_argument("--json", action="store_true", help="print the matrix as JSON")
    from_graph.add_argument("-o", "--output", type=str, help="path to the output file", default=None)
    _add_verbosity(from_graph)
    return parser


def _add_verbosity(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument("-v", "--verbose", action="store_true", help="log progress")
    group.add_argument("-q", "--quiet", action="store_true", help="log errors only")


def configure_logging(verbose: bool = False, quiet: bool = False) -> None:
    level = logging.DEBUG if verbose else logging.ERROR if quiet else logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def load_matrix(args: argparse.Namespace) -> SymMatrix:
    """Reads the matrix named by ``--fixture``, the input path, or stdin."""
    mode = resolve_mode(args.mode or os.environ.get(MODE_ENV_VAR) or DEFAULT_MODE)
    policy = TolerancePolicy(args.rank_eps, args.zero_eps, args.positivity_eps)

    if args.fixture is not None:
        if args.input is not None:
            raise InvalidArgumentError("give either --fixture or an input file, not both")
        text = load_fixture_text(args.fixture)
    elif args.input is not None and args.input != "-":
        text = Path(args.input).read_text()
    else:
        text = sys.stdin.read()
    return parse_matrix(text, mode=mode, policy=policy)


def _emit(text: str, output: Optional[str]) -> None:
    if output is not None:
        write_report_to_file(text, output)
    else:
        print(text, end="" if text.endswith("\n") else "\n")


def main(argv: Optional[list[str]] = None) -> int:
    """Entry point of the ``copzero`` command; returns the exit status."""
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose, args.quiet)

    try:
        if args.command == "from-graph":
            graph = PlainGraph.from_text(Path(args.edgelist).read_text())
            matrix = matrix_from_graph(graph)
            _emit(matrix_to_json(matrix) if args.json else matrix_to_text(matrix), args.output)
            return 0

        matrix = load_matrix(args)
        check = not args.skip_copositivity or args.require_copositive
        analysis = ZeroSetAnalysis(matrix, check_copositivity=check)
        until = COMMAND_STAGES[args.command]

        analysis.run_until(until, getattr(args, "grid", None))
        if args.command == "membership":
            analysis.run_membership(read_point_text(Path(args.point).read_text()))

        report = analysis.report
        if args.require_copositive and report.copositivity_status is CopositivityStatus.REFUTED:
            _emit(report_to_json(report) if args.json else render_text(report), args.output)
            print("error: matrix is not copositive", file=sys.stderr)
            return 2

        if getattr(args, "dot", False):
            text = graph_to_dot(report.graph, report.zeros)
        elif args.json:
            text = report_to_json(report)
        else:
            text = render_text(report)
        _emit(text, args.output)

        if PipelineStage.VERIFY in report.stages and not report.verified:
            print("error: verification failed", file=sys.stderr)
            return 1
        return 0

    except (CopzeroError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
