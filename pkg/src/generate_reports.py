"""Renders analysis reports as JSON, DOT and text tables."""

from __future__ import annotations

import json
from fractions import Fraction
from typing import TYPE_CHECKING, Optional

import pandas as pd

from app_configs import SCHEMA_VERSION
from src.minimal_zeros import MinimalZero
from src.model_data import SymMatrix
from src.utils.utils import format_scalar, format_vector, render_table
from src.zero_graph import ZerosGraph

if TYPE_CHECKING:
    from src.zero_set_analyzer import AnalysisReport


def scalar_to_json(value):
    """``"num/den"`` for exact scalars, a JSON number for floats."""
    if isinstance(value, Fraction):
        return format_scalar(value)
    return float(value)


def vector_to_json(values) -> list:
    return [scalar_to_json(v) for v in values]


def matrix_to_dict(matrix: SymMatrix) -> dict:
    return {"p": matrix.p, "rows": [vector_to_json(row) for row in matrix.entries]}


def matrix_to_json(matrix: SymMatrix) -> str:
    return json.dumps(matrix_to_dict(matrix), indent=2, sort_keys=True) + "\n"


def matrix_to_text(matrix: SymMatrix) -> str:
    """Whitespace rows, readable back by ``parse_matrix``."""
    return "".join(" ".join(str(v) for v in row) + "\n" for row in matrix.entries)


def report_to_dict(report: AnalysisReport) -> dict:
    """The JSON schema of a report; only the stages that ran contribute their sections."""
    from src.zero_set_analyzer import PipelineStage

    matrix = report.matrix
    data = {
        "schema_version": SCHEMA_VERSION,
        "input": {
            **matrix_to_dict(matrix),
            "mode": matrix.mode.value,
            "tolerances": matrix.policy.as_dict(),
        },
        "stages": [stage.name.lower() for stage in report.stages],
        "copositivity_status": report.copositivity_status.value,
        "warnings": list(report.warnings),
    }

    verdict = report.copositivity
    if verdict is not None:
        data["copositivity"] = {
            "is_copositive": verdict.is_copositive,
            "method": verdict.method.value,
            "witness": None if verdict.witness is None else vector_to_json(verdict.witness),
            "witness_value": None if verdict.witness_value is None else scalar_to_json(verdict.witness_value),
            "submatrices_checked": verdict.submatrices_checked,
        }

    if PipelineStage.MINIMAL_ZEROS in report.stages:
        data["minimal_zeros"] = [
            {"j": zero.index, "support": list(zero.support.indices()), "tau": vector_to_json(zero.tau)}
            for zero in report.zeros
        ]
        data["search"] = {"subsets_tested": report.subsets_tested, "subsets_pruned": report.subsets_pruned}

    if report.graph is not None:
        data["extended_support_set"] = [
            {"j": pair.j, "support": list(pair.support.indices()), "M": list(pair.M.indices())}
            for pair in report.pairs
        ]
        data["graph"] = {
            "vertices": list(report.graph.vertices),
            "edges": [list(edge) for edge in report.graph.sorted_edges()],
        }

    if PipelineStage.CLIQUES in report.stages:
        data["cliques"] = [list(clique.members) for clique in report.cliques]

    if report.representation is not None:
        data["representation"] = {
            "components": [
                {
                    "s": component.s,
                    "J": list(component.clique.members),
                    "P_star": list(component.p_star.indices()),
                    "vertices": [zero.index for zero in component.vertices],
                }
                for component in report.representation
            ],
            "errors": list(report.representation.errors),
        }

    if report.verification:
        data["verification"] = dict(report.verification)
    conditions = report.clique_conditions
    if conditions is not None:
        data["clique_conditions"] = {
            "coverage": conditions.coverage,
            "uncovered": conditions.uncovered,
            "pstar_in_M": conditions.pstar_in_M,
            "pstar_failures": [list(pair) for pair in conditions.pstar_failures],
            "separation": conditions.separation,
            "counterexample": None if conditions.counterexample is None else list(conditions.counterexample),
        }
    if report.oracle is not None:
        data["oracle"] = {
            "N": report.oracle.N,
            "points_checked": report.oracle.points_checked,
            "zeros_found": report.oracle.zeros_found,
            "violations": [
                {"t": vector_to_json(t), "is_zero": zero, "components": hull}
                for t, zero, hull in report.oracle.violations
            ],
            "support_mismatches": [
                {"t": vector_to_json(t), "by_hull": hull, "by_support": support}
                for t, hull, support in report.oracle.support_mismatches
            ],
            "passed": report.oracle.passed,
        }
    if report.membership is not None:
        result = report.membership
        data["membership"] = {
            "t": vector_to_json(result.point.t),
            "is_zero": result.is_zero,
            "support": list(result.support.indices()),
            "components_by_support": sorted(result.by_support),
            "components_by_hull": sorted(result.by_hull),
        }
    return data


def report_to_json(report: AnalysisReport) -> str:
    return json.dumps(report_to_dict(report), indent=2, sort_keys=True) + "\n"


def graph_to_dot(graph: Optional[ZerosGraph], zeros: list[MinimalZero]) -> str:
    """DOT text of the minimal zeros graph; vertices are labelled ``j:support``."""
    lines = ["graph G {"]
    if graph is not None:
        supports = {zero.index: zero.support for zero in zeros}
        for j in graph.vertices:
            lines.append(f'  {j} [label="{j}:{supports[j]}"];')
        for i, j in graph.sorted_edges():
            lines.append(f"  {i} -- {j};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def zeros_dataframe(report: AnalysisReport) -> pd.DataFrame:
    rows = []
    M = {pair.j: pair.M for pair in report.pairs}
    for zero in report.zeros:
        row = {"j": zero.index, "support": str(zero.support), "tau": format_vector(zero.tau)}
        if zero.index in M:
            row["M"] = str(M[zero.index])
        rows.append(row)
    return pd.DataFrame(rows)


def graph_dataframe(graph: ZerosGraph) -> pd.DataFrame:
    return pd.DataFrame(graph.sorted_edges(), columns=["i", "j"])


def cliques_dataframe(report: AnalysisReport) -> pd.DataFrame:
    return pd.DataFrame(
        [{"clique": str(clique), "size": len(clique)} for clique in report.cliques]
    )


def representation_dataframe(report: AnalysisReport) -> pd.DataFrame:
    return pd.DataFrame(
        [
            {"s": component.s, "J(s)": str(component.clique), "P*(s)": str(component.p_star)}
            for component in report.representation
        ]
    )


def verification_dataframe(report: AnalysisReport) -> pd.DataFrame:
    rows = [{"check": name, "passed": passed} for name, passed in report.verification.items()]
    if report.oracle is not None:
        rows.append({"check": f"grid_oracle (N={report.oracle.N})", "passed": report.oracle.passed})
    return pd.DataFrame(rows)


def render_text(report: AnalysisReport) -> str:
    """Human-readable report made of titled tables."""
    from src.zero_set_analyzer import PipelineStage

    matrix = report.matrix
    policy = matrix.policy
    sections = [
        f"p = {matrix.p}, mode = {matrix.mode.value}, rank_eps = {policy.rank_eps}, "
        f"zero_eps = {policy.zero_eps}, positivity_eps = {policy.positivity_eps}\n"
    ]

    verdict = report.copositivity
    if verdict is not None:
        row = {"copositive": verdict.is_copositive, "method": verdict.method.value}
        if verdict.witness is not None:
            row["witness"] = format_vector(verdict.witness)
            row["tᵀXt"] = format_scalar(verdict.witness_value)
        sections.append(render_table(pd.DataFrame([row]), "Copositivity"))

    if PipelineStage.MINIMAL_ZEROS in report.stages:
        title = f"Minimal zeros ({report.copositivity_status.value})"
        sections.append(render_table(zeros_dataframe(report), title))
    if report.graph is not None:
        sections.append(render_table(graph_dataframe(report.graph), f"Graph edges (|J| = {report.graph.n})"))
    if PipelineStage.CLIQUES in report.stages:
        sections.append(render_table(cliques_dataframe(report), "Maximal cliques"))
    if report.representation is not None:
        sections.append(render_table(representation_dataframe(report), "Representation"))
        for error in report.representation.errors:
            sections.append(f"representation error: {error}\n")
    if report.verification:
        sections.append(render_table(verification_dataframe(report), "Verification"))
    conditions = report.clique_conditions
    if conditions is not None and conditions.counterexample is not None:
        sections.append(f"separation counterexample (s, s̄, i0): {conditions.counterexample}\n")
    if report.oracle is not None:
        oracle = report.oracle
        sections.append(
            f"grid oracle N={oracle.N}: {oracle.points_checked} points, {oracle.zeros_found} zeros, "
            f"{len(oracle.violations)} violations, {len(oracle.support_mismatches)} support mismatches\n"
        )
    if report.membership is not None:
        result = report.membership
        row = {
            "t": format_vector(result.point.t),
            "zero": result.is_zero,
            "support": str(result.support),
            "by support": sorted(result.by_support),
            "by hull": sorted(result.by_hull),
        }
        sections.append(render_table(pd.DataFrame([row]), "Membership"))
    for warning in report.warnings:
        sections.append(f"warning: {warning}\n")

    return "\n".join(sections)
