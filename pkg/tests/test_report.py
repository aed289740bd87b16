"""
测试问题文件与报告输出
"""

import csv
import json

import numpy as np
import pytest

from extremal_dare.afpi import afpi_run
from extremal_dare.builtin_examples import builtin_example
from extremal_dare.common_models import Termination
from extremal_dare.driver import ExtremalSolver
from extremal_dare.exceptions import ProblemParseError, ProblemValidationError
from extremal_dare.iteration import fpi_run, stein_initial
from extremal_dare.iteration_models import IterationOptions, IterationReport
from extremal_dare.report import (
    HISTORY_HEADER,
    SolveReport,
    emit_problem,
    history_rows,
    parse_problem,
    read_problem_file,
    write_history_csv,
    write_problem_file,
)


def _problem_payload(**overrides):
    payload = {
        "n": 2,
        "m": 1,
        "A": [[3.0, 0.0], [0.0, 0.5]],
        "B": [[1.0], [0.0]],
        "R": [[1.0]],
        "C": [[0.0, 1.0]],
        "name": "ex1-file",
    }
    payload.update(overrides)
    return {k: v for k, v in payload.items() if v is not None}


class TestParseProblem:
    """测试问题文件解析"""

    def test_valid_problem(self):
        """测试有效问题文件"""
        p = parse_problem(json.dumps(_problem_payload()))

        assert p.n == 2
        assert p.name == "ex1-file"
        np.testing.assert_allclose(p.h, np.diag([0.0, 1.0]))

    def test_flat_matrices(self):
        """测试平铺矩阵"""
        p = parse_problem(
            json.dumps(_problem_payload(A=[3.0, 0.0, 0.0, 0.5], B=[1.0, 0.0], R=[1.0]))
        )

        np.testing.assert_allclose(p.a, np.diag([3.0, 0.5]))
        assert p.b.shape == (2, 1)

    def test_complex_entries(self):
        """测试复数元素"""
        p = parse_problem(
            json.dumps(
                _problem_payload(
                    A=[[[0.0, 1.0], 0.0], [0.0, 0.5]],
                    C=None,
                    H=[[1.0, [0.0, 0.5]], [[0.0, -0.5], 1.0]],
                )
            )
        )

        assert p.a[0, 0] == 1j
        assert p.h[0, 1] == 0.5j

    def test_r_not_positive_definite(self):
        """测试 R 非正定"""
        with pytest.raises(ProblemValidationError) as exc_info:
            parse_problem(json.dumps(_problem_payload(R=[[-1.0]])))

        assert exc_info.value.field == "R"
        assert "positive definite" in str(exc_info.value)

    def test_h_and_c_both_given(self):
        """测试 H 与 C 同时给出"""
        with pytest.raises(ProblemValidationError, match=r"exactly one of H\|C"):
            parse_problem(json.dumps(_problem_payload(H=[[1.0, 0.0], [0.0, 1.0]])))

    def test_neither_h_nor_c(self):
        """测试 H 与 C 都未给出"""
        with pytest.raises(ProblemValidationError, match=r"exactly one of H\|C"):
            parse_problem(json.dumps(_problem_payload(C=None)))

    def test_dimension_mismatch(self):
        """测试维数不符"""
        with pytest.raises(ProblemValidationError) as exc_info:
            parse_problem(json.dumps(_problem_payload(B=[[1.0], [0.0], [0.0]])))

        assert exc_info.value.field == "B"

    def test_unknown_key(self):
        """测试未知字段"""
        with pytest.raises(ProblemValidationError) as exc_info:
            parse_problem(json.dumps(_problem_payload(Q=[[1.0]])))

        assert exc_info.value.field == "Q"

    def test_malformed_json(self):
        """测试 JSON 格式错误"""
        with pytest.raises(ProblemParseError, match="malformed"):
            parse_problem("{not json")

    def test_not_an_object(self):
        """测试顶层不是对象"""
        with pytest.raises(ProblemParseError, match="JSON object"):
            parse_problem("[1, 2, 3]")

    def test_missing_file(self, tmp_path):
        """测试文件不存在"""
        with pytest.raises(ProblemParseError, match="cannot read"):
            read_problem_file(tmp_path / "missing.json")


class TestEmitProblem:
    """测试问题文件输出"""

    @pytest.mark.parametrize("example_id", ["ex1", "ex2", "ex3", "ex4"])
    def test_round_trip(self, example_id):
        """测试内置示例写出后可原样读回"""
        p, _ = builtin_example(example_id)
        back = parse_problem(emit_problem(p))

        np.testing.assert_array_equal(back.a, p.a)
        np.testing.assert_array_equal(back.b, p.b)
        np.testing.assert_array_equal(back.r, p.r)
        np.testing.assert_array_equal(back.h, p.h)
        assert back.name == p.name

    def test_weight_key(self):
        """测试带 C 的问题写 C"""
        p, _ = builtin_example("ex1")
        payload = json.loads(emit_problem(p))

        assert "C" in payload
        assert "H" not in payload

    def test_complex_problem(self, tmp_path):
        """测试复数问题写出与读回"""
        p = parse_problem(
            json.dumps(_problem_payload(A=[[[0.0, 1.0], 0.0], [0.0, [0.5, -0.5]]]))
        )
        path = write_problem_file(p, tmp_path / "complex.json")
        back = read_problem_file(path)

        np.testing.assert_array_equal(back.a, p.a)
        assert json.loads(path.read_text(encoding="utf-8"))["A"][0][0] == [0.0, 1.0]


class TestHistory:
    """测试收敛历史"""

    def setup_method(self):
        """测试前准备"""
        self.p, self.expected = builtin_example("ex1")
        self.xhat0 = stein_initial(self.p, self.expected.feedback)

    def test_afpi_rows(self):
        """测试 AFPI 历史"""
        run = afpi_run(self.p, self.xhat0, 2, IterationOptions(tol=self.expected.tol))
        rows = history_rows(run)

        assert len(rows) == len(run.steps)
        assert rows[0][0] == "1"
        assert float(rows[0][1]) == pytest.approx(5.7426e-4, rel=1e-3)
        assert float(rows[0][6]) == pytest.approx(9.0)

    def test_fpi_rows(self):
        """测试 FPI 历史只填写部分列"""
        run = fpi_run(self.p, np.zeros((2, 2)), IterationOptions(max_iter=3))
        rows = history_rows(run)

        assert [row[0] for row in rows] == ["1", "2", "3"]
        assert rows[0][2] == ""
        assert float(rows[0][3]) == pytest.approx(3.0)

    def test_fpi_rows_with_undefined_radius(self):
        """测试 ρ(T) 无定义的步不错位"""
        report = IterationReport(
            method="fpi",
            x=np.eye(2),
            nres_history=[1.0, 0.5, 0.1],
            rho_t_history=[2.0, None, 0.7],
            iterations=2,
            termination=Termination.MAX_ITER,
            tol=1e-10,
        )
        rows = history_rows(report)

        assert rows[0][3] == ""
        assert float(rows[1][3]) == pytest.approx(0.7)

    def test_csv_file(self, tmp_path):
        """测试写出 CSV"""
        run = afpi_run(self.p, self.xhat0, 2, IterationOptions(max_iter=2))
        path = write_history_csv(run, tmp_path / "out" / "history.csv")

        with open(path, newline="", encoding="utf-8") as f:
            rows = list(csv.reader(f))
        assert tuple(rows[0]) == HISTORY_HEADER
        assert len(rows) == 3


class TestSolveReport:
    """测试 JSON 报告"""

    def test_report_from_solutions(self, tmp_path):
        """测试由求解结果生成报告"""
        p, expected = builtin_example("ex1")
        result = ExtremalSolver().solve_all(
            p, opts=IterationOptions(tol=expected.tol), feedback=expected.feedback
        )
        report = SolveReport.from_solutions(p, result, wall_ms=12.5)
        path = report.write(tmp_path / "report.json")

        payload = json.loads(path.read_text(encoding="utf-8"))
        assert set(payload["solutions"]) == {"x_pM", "x_pm"}
        assert payload["solutions"]["x_pM"]["matrix"][0][0] == pytest.approx(8.0)
        assert "λ=0.5" in payload["skipped"]["x_mm"]
        assert payload["iterations"]["primal.xhat"] == result.reports[
            "primal"
        ].iterations_xhat
        assert payload["structure"]["detectable"] is False
        assert payload["wall_ms"] == 12.5
        assert payload["route"] is None
