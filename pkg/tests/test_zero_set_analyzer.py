import io
import json
import os
import subprocess
import sys
import tempfile
import unittest
from contextlib import redirect_stderr, redirect_stdout
from unittest import mock

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
from app_configs import ENUMERATION_ORACLE_MAX_DIMENSION
from src.generate_reports import graph_to_dot, render_text, report_to_dict, report_to_json
from src.minimal_zeros import CopositivityStatus
from src.model_data import MatrixMode, parse_matrix
from src.utils.utils import load_fixture_text
from src.zero_set_analyzer import (
    PipelineStage,
    ZeroSetAnalysis,
    build_parser,
    load_matrix,
    main,
    run_pipeline,
)

project_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

FIXTURE_NAMES = ("example-x", "example-xbar", "horn", "identity-3", "zero-3")


def fixture(name: str):
    return parse_matrix(load_fixture_text(name))


def run_main(argv: list[str]) -> tuple[int, str, str]:
    stdout, stderr = io.StringIO(), io.StringIO()
    with redirect_stdout(stdout), redirect_stderr(stderr):
        status = main(argv)
    return status, stdout.getvalue(), stderr.getvalue()


class TestSmoke(unittest.TestCase):
    @unittest.skipIf(os.getenv("SKIP_INT_TESTS"), "Skipping integration test.")
    def test_smoke(self):
        """Run copzero.py on a fixture and check that nothing crashes"""

        demo_file = os.path.join(project_dir, "copzero.py")
        output = subprocess.check_output([sys.executable, demo_file, "analyze", "--fixture", "horn"])
        self.assertIn(b"Maximal cliques", output)


class TestPipeline(unittest.TestCase):
    def test_fixtures_verify(self):
        for name in FIXTURE_NAMES:
            with self.subTest(fixture=name):
                report = run_pipeline(fixture(name))
                self.assertTrue(report.verified, report.verification)
                self.assertIs(report.copositivity_status, CopositivityStatus.VERIFIED)
                self.assertIn("enumeration_oracle", report.verification)
                self.assertIn("clique_oracle", report.verification)

    def test_enumeration_oracle_dimension_limit(self):
        self.assertGreaterEqual(ENUMERATION_ORACLE_MAX_DIMENSION, 5)
        with mock.patch("src.zero_set_analyzer.ENUMERATION_ORACLE_MAX_DIMENSION", 4):
            report = run_pipeline(fixture("horn"))
        self.assertNotIn("enumeration_oracle", report.verification)
        self.assertTrue(report.verified)

    def test_stages_run_in_order(self):
        report = run_pipeline(fixture("horn"), until=PipelineStage.CLIQUES)
        self.assertEqual(
            report.stages,
            [PipelineStage.COPOSITIVITY, PipelineStage.MINIMAL_ZEROS, PipelineStage.GRAPH, PipelineStage.CLIQUES],
        )
        self.assertIsNone(report.representation)
        self.assertEqual(len(report.cliques), 5)

    def test_skip_copositivity(self):
        report = run_pipeline(fixture("horn"), until=PipelineStage.MINIMAL_ZEROS, check_copositivity=False)
        self.assertIsNone(report.copositivity)
        self.assertIs(report.copositivity_status, CopositivityStatus.UNVERIFIED)
        self.assertEqual(len(report.zeros), 5)
        self.assertTrue(report.warnings)

    def test_grid_oracle(self):
        report = run_pipeline(fixture("example-xbar"), grid=6)
        self.assertTrue(report.oracle.passed)
        self.assertTrue(report.verified)

    def test_float_mode_agrees(self):
        for name in ("example-x", "example-xbar", "horn"):
            with self.subTest(fixture=name):
                exact = run_pipeline(fixture(name))
                floats = run_pipeline(fixture(name).as_mode(MatrixMode.FLOAT))
                self.assertEqual(
                    [zero.support for zero in floats.zeros], [zero.support for zero in exact.zeros]
                )
                self.assertEqual(floats.graph, exact.graph)
                self.assertEqual(floats.cliques, exact.cliques)
                self.assertTrue(floats.verified, floats.verification)

    def test_membership(self):
        analysis = ZeroSetAnalysis(fixture("example-x"))
        result = analysis.run_membership([2, 2, 0, 0, 0])
        self.assertTrue(result.is_zero)
        self.assertEqual(result.support.indices(), (1, 2))
        self.assertEqual(result.by_support, {1})
        self.assertEqual(result.by_hull, {1})

        result = analysis.run_membership([1, 0, 1, 0, 0])
        self.assertFalse(result.is_zero)
        self.assertEqual(result.by_support, set())
        self.assertEqual(result.by_hull, set())


class TestReports(unittest.TestCase):
    def test_json_report(self):
        report = run_pipeline(fixture("horn"))
        data = json.loads(report_to_json(report))
        self.assertEqual(data["schema_version"], 1)
        self.assertEqual(data["input"]["mode"], "exact")
        self.assertEqual(data["minimal_zeros"][0], {"j": 1, "support": [1, 2], "tau": ["1/2", "1/2", "0/1", "0/1", "0/1"]})
        self.assertEqual(data["graph"]["edges"], [[1, 2], [1, 4], [2, 3], [3, 5], [4, 5]])
        self.assertEqual(data["cliques"], [[1, 2], [1, 4], [2, 3], [3, 5], [4, 5]])
        self.assertEqual(data["representation"]["components"][1]["P_star"], [1, 2, 5])
        self.assertEqual(data["extended_support_set"][0]["M"], [1, 2, 3, 5])
        self.assertTrue(all(data["verification"].values()))
        self.assertEqual(data["copositivity"]["method"], "principal-eigen")

    def test_json_is_deterministic(self):
        first = report_to_json(run_pipeline(fixture("example-xbar"), grid=4))
        second = report_to_json(run_pipeline(fixture("example-xbar"), grid=4))
        self.assertEqual(first, second)

    def test_json_reserializes_identically(self):
        reports = [run_pipeline(fixture(name)) for name in FIXTURE_NAMES]
        reports.append(run_pipeline(fixture("horn").as_mode(MatrixMode.FLOAT)))
        reports.append(run_pipeline(fixture("example-xbar"), grid=4))
        for report in reports:
            with self.subTest(matrix=report.matrix):
                text = report_to_json(report)
                self.assertEqual(json.dumps(json.loads(text), indent=2, sort_keys=True) + "\n", text)

    def test_partial_report_sections(self):
        data = report_to_dict(run_pipeline(fixture("horn"), until=PipelineStage.MINIMAL_ZEROS))
        self.assertIn("minimal_zeros", data)
        self.assertNotIn("graph", data)
        self.assertNotIn("cliques", data)

    def test_dot(self):
        report = run_pipeline(fixture("horn"), until=PipelineStage.GRAPH)
        dot = graph_to_dot(report.graph, report.zeros)
        self.assertTrue(dot.startswith("graph G {\n"))
        self.assertTrue(dot.endswith("}\n"))
        self.assertIn('  1 [label="1:{1,2}"];', dot)
        self.assertIn("  3 -- 5;", dot)
        self.assertEqual(dot.count("--"), 5)

    def test_text_report(self):
        text = render_text(run_pipeline(fixture("example-x"), grid=4))
        self.assertIn("Minimal zeros (verified copositive)", text)
        self.assertIn("Representation", text)
        self.assertIn("grid oracle N=4", text)


class TestCommandLine(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def write(self, name: str, text: str) -> str:
        path = os.path.join(self.tmp.name, name)
        with open(path, "w") as f:
            f.write(text)
        return path

    def test_analyze(self):
        status, out, _ = run_main(["analyze", "--fixture", "horn"])
        self.assertEqual(status, 0)
        self.assertIn("Maximal cliques", out)

    def test_minimal_zeros_json_from_file(self):
        path = os.path.join(project_dir, "input", "example_xbar.txt")
        status, out, _ = run_main(["minimal-zeros", path, "--json"])
        self.assertEqual(status, 0)
        data = json.loads(out)
        self.assertEqual([zero["support"] for zero in data["minimal_zeros"]], [[1, 2], [2, 3], [1, 5], [4, 5]])

    def test_graph_dot(self):
        status, out, _ = run_main(["graph", "--fixture", "example-x", "--dot"])
        self.assertEqual(status, 0)
        self.assertIn("  1 -- 2;", out)
        self.assertIn("  3 -- 4;", out)

    def test_require_copositive(self):
        path = self.write("indefinite.txt", "1 0\n0 -1\n")
        status, _, err = run_main(["check-copositive", path, "--require-copositive"])
        self.assertEqual(status, 2)
        self.assertIn("not copositive", err)

        status, _, _ = run_main(["check-copositive", path])
        self.assertEqual(status, 0)

    def test_analyze_exit_status_without_gate_flag(self):
        path = self.write("indefinite.txt", "1 -2\n-2 1\n")
        status, out, _ = run_main(["analyze", path])
        self.assertEqual(status, 0)
        self.assertIn("not copositive", out)

        stdout = io.StringIO()
        with redirect_stdout(stdout), self.assertRaises(SystemExit):
            main(["analyze", "--help"])
        self.assertIn("exits 0 unless --require-copositive", " ".join(stdout.getvalue().split()))

    def test_asymmetric_input(self):
        path = self.write("asymmetric.txt", "1 2\n3 1\n")
        status, _, err = run_main(["minimal-zeros", path])
        self.assertEqual(status, 1)
        self.assertIn("row 2, column 1", err)

    def test_unknown_fixture(self):
        status, _, err = run_main(["analyze", "--fixture", "missing"])
        self.assertEqual(status, 1)
        self.assertIn("unknown fixture", err)

    def test_missing_file(self):
        status, _, _ = run_main(["analyze", os.path.join(self.tmp.name, "missing.txt")])
        self.assertEqual(status, 1)

    def test_membership(self):
        point = os.path.join(project_dir, "input", "point_x.txt")
        status, out, _ = run_main(["membership", "--fixture", "example-x", "--point", point, "--json"])
        self.assertEqual(status, 0)
        data = json.loads(out)["membership"]
        self.assertTrue(data["is_zero"])
        self.assertEqual(data["components_by_support"], [1])
        self.assertEqual(data["components_by_hull"], [1])

    def test_verify(self):
        status, out, _ = run_main(["verify", "--fixture", "example-xbar", "--grid", "6", "--json"])
        self.assertEqual(status, 0)
        oracle = json.loads(out)["oracle"]
        self.assertEqual(oracle["N"], 6)
        self.assertTrue(oracle["passed"])

    def test_from_graph(self):
        edgelist = os.path.join(project_dir, "input", "two_edges.txt")
        status, out, _ = run_main(["from-graph", edgelist])
        self.assertEqual(status, 0)
        self.assertEqual(out, "0 0 1 1\n0 0 1 1\n1 1 0 0\n1 1 0 0\n")

        status, out, _ = run_main(["from-graph", edgelist, "--json"])
        self.assertEqual(json.loads(out)["rows"][0], ["0/1", "0/1", "1/1", "1/1"])

    def test_output_file(self):
        output = os.path.join(self.tmp.name, "reports", "horn.json")
        status, out, _ = run_main(["cliques", "--fixture", "horn", "--json", "-o", output])
        self.assertEqual(status, 0)
        self.assertIn("Saved report to", out)
        with open(output) as f:
            self.assertEqual(json.load(f)["cliques"][0], [1, 2])

    def test_mode_from_environment(self):
        with mock.patch.dict(os.environ, {"COPZERO_MODE": "float"}):
            args = build_parser().parse_args(["minimal-zeros", "--fixture", "horn"])
            self.assertIs(load_matrix(args).mode, MatrixMode.FLOAT)

            args = build_parser().parse_args(["minimal-zeros", "--fixture", "horn", "--mode", "exact"])
            self.assertIs(load_matrix(args).mode, MatrixMode.EXACT)

    def test_tolerance_flags(self):
        args = build_parser().parse_args(["minimal-zeros", "--fixture", "horn", "--mode", "float", "--zero-eps", "1e-6"])
        self.assertEqual(load_matrix(args).policy.zero_eps, 1e-6)


if __name__ == "__main__":
    unittest.main()
