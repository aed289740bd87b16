"""
测试数据模型
"""

import numpy as np
import pytest
from pydantic import ValidationError

from extremal_dare.builtin_examples import builtin_example
from extremal_dare.common_models import SpectrumSummary, Termination
from extremal_dare.exceptions import ProblemValidationError, UnknownExampleError
from extremal_dare.iteration_models import IterationOptions, IterationReport
from extremal_dare.problem_file_models import ProblemFile
from extremal_dare.riccati_models import DareProblem
from extremal_dare.solution_models import (
    ExtremalSolutions,
    StructureReport,
    VerificationRecord,
    Witness,
)


def _structure() -> StructureReport:
    return StructureReport(
        stabilizable=True,
        controllable=True,
        antistab_rank_ok=True,
        a_nonsingular=True,
    )


class TestTermination:
    """测试终止原因枚举"""

    def test_termination_values(self):
        """测试枚举值"""
        assert Termination.CONVERGED.value == "converged"
        assert Termination.MAX_ITER.value == "max_iter"
        assert Termination.STAGNATED.value == "stagnated"
        assert Termination.BREAKDOWN.value == "breakdown"
        assert Termination.MONOTONICITY_VIOLATED.value == "monotonicity_violated"


class TestDareProblem:
    """测试 DARE 系数模型"""

    def test_valid_problem(self):
        """测试有效问题"""
        p = DareProblem(a=np.diag([3.0, 0.5]), b=[[1.0], [0.0]], r=[[1.0]], h=np.eye(2))

        assert p.n == 2
        assert p.m == 1
        assert p.kind == "primal"
        np.testing.assert_allclose(p.g, np.diag([1.0, 0.0]))

    def test_h_from_c(self):
        """测试只给出 C 时 H = CᴴC"""
        p = DareProblem(a=np.eye(2), b=[[1.0], [0.0]], r=[[2.0]], c=[[0.0, 2.0]])

        np.testing.assert_allclose(p.h, np.diag([0.0, 4.0]))
        assert p.c.shape == (1, 2)

    def test_g_uses_r_inverse(self):
        """测试 G = BR⁻¹Bᴴ"""
        p = DareProblem(a=np.eye(2), b=[[1.0], [1.0]], r=[[2.0]], h=np.eye(2))

        np.testing.assert_allclose(p.g, np.full((2, 2), 0.5))
        assert not p.g.flags.writeable

    def test_missing_h_and_c(self):
        """测试 H 与 C 都未给出"""
        with pytest.raises(ValidationError, match="either h or c"):
            DareProblem(a=np.eye(2), b=[[1.0], [0.0]], r=[[1.0]])

    def test_r_not_positive_definite(self):
        """测试 R 非正定"""
        with pytest.raises(ValidationError, match="positive definite"):
            DareProblem(a=np.eye(2), b=[[1.0], [0.0]], r=[[0.0]], h=np.eye(2))

    def test_h_not_psd(self):
        """测试 H 非半正定"""
        with pytest.raises(ValidationError, match="positive semidefinite"):
            DareProblem(
                a=np.eye(2), b=[[1.0], [0.0]], r=[[1.0]], h=np.diag([1.0, -1.0])
            )

    def test_h_psd_tolerance_shared_with_problem_file(self):
        """测试 H 的半正定容差与问题文件一致"""
        h = np.diag([1.0, -1e-11])

        with pytest.raises(ValidationError, match="positive semidefinite"):
            DareProblem(a=np.eye(2), b=[[1.0], [0.0]], r=[[1.0]], h=h)
        with pytest.raises(ValidationError, match="positive semidefinite"):
            ProblemFile(
                n=2,
                m=1,
                A=np.eye(2).tolist(),
                B=[[1.0], [0.0]],
                R=[[1.0]],
                H=h.tolist(),
            )

        tiny = np.diag([1.0, -1e-13])
        assert DareProblem(a=np.eye(2), b=[[1.0], [0.0]], r=[[1.0]], h=tiny).n == 2

    def test_dual_first_allows_indefinite_h(self):
        """测试一类对偶问题不要求 H 半正定"""
        p = DareProblem(
            a=np.eye(2),
            b=[[1.0], [0.0]],
            r=[[1.0]],
            h=np.diag([1.0, -1.0]),
            kind="dual_first",
        )

        assert p.h[1, 1] == -1.0

    def test_dimension_mismatch(self):
        """测试维数不符"""
        with pytest.raises(ValidationError, match="rows"):
            DareProblem(a=np.eye(2), b=[[1.0]], r=[[1.0]], h=np.eye(2))

        with pytest.raises(ValidationError, match="square"):
            DareProblem(a=np.ones((2, 3)), b=[[1.0], [0.0]], r=[[1.0]], h=np.eye(2))

    def test_non_hermitian_h(self):
        """测试 H 非 Hermite"""
        with pytest.raises(ValidationError, match="not Hermitian"):
            DareProblem(
                a=np.eye(2), b=[[1.0], [0.0]], r=[[1.0]], h=[[1.0, 1.0], [0.0, 1.0]]
            )

    def test_complex_entries(self):
        """测试复数元素以 [re, im] 给出"""
        p = DareProblem(
            a=[[[0.0, 1.0], 0.0], [0.0, 0.5]],
            b=[[1.0], [0.0]],
            r=[[1.0]],
            h=np.eye(2),
        )

        assert p.a[0, 0] == 1j

    def test_non_finite_entry(self):
        """测试非有限元素"""
        with pytest.raises(ValidationError, match="finite"):
            DareProblem(
                a=[[np.inf, 0.0], [0.0, 1.0]], b=[[1.0], [0.0]], r=[[1.0]], h=np.eye(2)
            )

    def test_immutable(self):
        """测试模型不可变"""
        p = DareProblem(a=np.eye(2), b=[[1.0], [0.0]], r=[[1.0]], h=np.eye(2))

        with pytest.raises(ValidationError):
            p.name = "other"
        with pytest.raises(ValueError):
            p.a[0, 0] = 2.0


class TestSpectrumSummary:
    """测试谱摘要"""

    def test_invalid_rho_disk(self):
        """测试 rho_disk 越界"""
        with pytest.raises(ValidationError):
            SpectrumSummary(eigenvalues=[0.5, 2.0], rho=2.0, mu=0.5, rho_disk=1.5)


class TestIterationModels:
    """测试迭代选项与报告"""

    def test_default_options(self):
        """测试默认迭代选项"""
        opts = IterationOptions()

        assert opts.tol == 1e-14
        assert opts.max_iter == 200
        assert opts.monotonicity_check is True
        assert opts.record_history is False

    def test_invalid_options(self):
        """测试无效迭代选项"""
        with pytest.raises(ValidationError):
            IterationOptions(tol=0.0)
        with pytest.raises(ValidationError):
            IterationOptions(max_iter=0)

    def test_converged_report_must_end_below_tol(self):
        """测试收敛报告的末项残差必须低于阈值"""
        with pytest.raises(ValidationError, match="below tol"):
            IterationReport(
                method="fpi",
                x=np.eye(2),
                nres_history=[1.0, 1e-3],
                iterations=1,
                termination=Termination.CONVERGED,
                tol=1e-10,
            )

    def test_rate_estimate_needs_history(self):
        """测试速率估计至少需要 4 个历史点"""
        with pytest.raises(ValidationError, match="at least 4"):
            IterationReport(
                method="fpi",
                x=np.eye(2),
                nres_history=[1.0, 0.5],
                iterations=1,
                termination=Termination.MAX_ITER,
                rate_estimate=0.5,
                tol=1e-10,
            )

    def test_rho_history_must_align(self):
        """测试 ρ(T) 历史与残差历史逐项对应"""
        with pytest.raises(ValidationError, match="align"):
            IterationReport(
                method="fpi",
                x=np.eye(2),
                nres_history=[1.0, 0.5],
                rho_t_history=[0.5],
                iterations=1,
                termination=Termination.MAX_ITER,
                tol=1e-10,
            )

    def test_report_properties(self):
        """测试报告属性"""
        report = IterationReport(
            method="newton",
            x=np.eye(2),
            nres_history=[1.0, 1e-4, 1e-16],
            iterations=2,
            termination=Termination.CONVERGED,
            tol=1e-14,
        )

        assert report.converged
        assert report.final_nres == 1e-16


class TestSolutionModels:
    """测试极值解模型"""

    def test_witness_describe(self):
        """测试见证描述"""
        witness = Witness(test="antistab", eigenvalue_re=0.5, rank_defect=1)

        assert witness.describe() == "rank[A−λI,B] deficient at λ=0.5"
        assert witness.eigenvalue == 0.5 + 0j

    def test_witnesses_for(self):
        """测试按检验筛选见证"""
        report = StructureReport(
            stabilizable=True,
            controllable=False,
            antistab_rank_ok=False,
            a_nonsingular=True,
            witnesses=[
                Witness(test="controllable", eigenvalue_re=0.5, rank_defect=1),
                Witness(test="antistab", eigenvalue_re=0.5, rank_defect=1),
            ],
        )

        assert len(report.witnesses_for("antistab")) == 1
        assert report.witnesses_for("stabilizable") == []

    def test_verification_record(self):
        """测试检查记录"""
        record = VerificationRecord(kind="x_pM", checks={"nres": True, "sign": False})

        assert not record.passed
        assert record.failed_checks == ["sign"]

    def test_present_and_ordering(self):
        """测试解集合与偏序检查"""
        solutions = ExtremalSolutions(
            x_pM=np.diag([8.0, 4.0 / 3.0]),
            x_pm=np.diag([0.0, 4.0 / 3.0]),
            structure=_structure(),
        )

        assert set(solutions.present()) == {"x_pM", "x_pm"}
        assert solutions.ordering_violations() == []
        assert solutions.structure_order() == 2

    def test_ordering_violation(self):
        """测试偏序被破坏"""
        solutions = ExtremalSolutions(
            x_pM=np.diag([1.0, 1.0]),
            x_pm=np.diag([2.0, 0.0]),
            structure=_structure(),
        )

        assert solutions.ordering_violations() == ["x_pm ⪯ x_pM"]

    def test_empty_solutions(self):
        """测试空解集"""
        solutions = ExtremalSolutions(structure=_structure())

        assert solutions.present() == {}
        assert solutions.ordering_violations() == []


class TestBuiltinExamples:
    """测试内置示例"""

    def test_example_1(self):
        """测试示例 1"""
        p, expected = builtin_example("ex1")

        assert p.n == 2
        np.testing.assert_allclose(p.h, np.diag([0.0, 1.0]))
        assert expected.tol == 1e-15
        assert expected.skipped == ["x_mM", "x_mm"]

    def test_example_4_closed_forms(self):
        """测试示例 4 的闭式解"""
        _, expected = builtin_example("ex4")

        x_mm = expected.solutions["x_mm"]
        assert x_mm[0, 0].real == pytest.approx(-9.0987, abs=1e-4)
        assert abs(np.linalg.det(expected.solutions["x_mM"])) < 1e-10
        np.testing.assert_allclose(
            expected.solutions["x_pM"], expected.solutions["x_pm"]
        )

    def test_example_3_eps(self):
        """测试示例 3 的参数"""
        p, _ = builtin_example("ex3", eps=1.0)

        assert p.n == 8
        assert p.a[1, 2] == 1.0
        assert "ε=1" in p.name

    def test_negative_eps(self):
        """测试负的 ε"""
        with pytest.raises(ProblemValidationError) as exc_info:
            builtin_example("ex3", eps=-1.0)

        assert exc_info.value.field == "eps"

    def test_unknown_example(self):
        """测试未知示例"""
        with pytest.raises(UnknownExampleError, match="ex5"):
            builtin_example("ex5")
