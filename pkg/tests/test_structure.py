"""
测试结构分析
"""

import numpy as np
import pytest

from extremal_dare.builtin_examples import builtin_example
from extremal_dare.dual import build_first_kind
from extremal_dare.exceptions import NotStabilizableError
from extremal_dare.random_problems import random_stabilizable_problem
from extremal_dare.riccati_models import DareProblem
from extremal_dare.structure import (
    analyze,
    default_stabilizing_feedback,
    is_dstable,
    pbh_rank_defect,
    unstable_unobservable_modes,
)


class TestAnalyze:
    """测试结构性质报告"""

    def test_example_1(self):
        """测试 ex1：可镇定但不可检测、不可控"""
        p, _ = builtin_example("ex1")
        report = analyze(p)

        assert report.stabilizable
        assert report.detectable is False
        assert report.controllable is False
        assert report.antistab_rank_ok is False
        assert report.a_nonsingular

        antistab = report.witnesses_for("antistab")
        assert len(antistab) == 1
        assert antistab[0].describe() == "rank[A−λI,B] deficient at λ=0.5"
        assert report.witnesses_for("detectable")[0].eigenvalue == pytest.approx(3.0)

    def test_example_2(self):
        """测试 ex2：A 奇异"""
        p, _ = builtin_example("ex2")
        report = analyze(p)

        assert report.stabilizable
        assert not report.controllable
        assert not report.a_nonsingular
        assert report.detectable is None

    def test_example_4(self):
        """测试 ex4：可控且 A 非奇异"""
        p, _ = builtin_example("ex4")
        report = analyze(p)

        assert report.stabilizable
        assert report.controllable
        assert report.antistab_rank_ok
        assert report.a_nonsingular
        assert report.witnesses == []

    def test_explicit_output_matrix(self):
        """测试显式给出 C"""
        p, _ = builtin_example("ex4")

        assert analyze(p, c=[[1.0, 0.0]]).detectable is not None

    def test_pbh_rank_defect(self):
        """测试 PBH 秩亏"""
        a = np.diag([3.0, 0.5])
        b = np.array([[1.0], [0.0]])

        assert pbh_rank_defect(a, b, 3.0) == 0
        assert pbh_rank_defect(a, b, 0.5) == 1

    def test_unstable_unobservable_modes(self):
        """测试单位圆外的不可检测模态"""
        p, _ = builtin_example("ex1")
        modes = unstable_unobservable_modes(p.a, p.h)

        assert [(w.eigenvalue_re, w.rank_defect) for w in modes] == [(3.0, 1)]

    def test_example_4_dual_has_unobservable_mode(self):
        """测试 ex4 的一类对偶在 λ=−2 处不可检测"""
        p, _ = builtin_example("ex4")
        dual = build_first_kind(p).problem

        assert unstable_unobservable_modes(p.a, p.h) == []
        modes = unstable_unobservable_modes(dual.a, dual.h)
        assert len(modes) == 1
        assert modes[0].eigenvalue_re == pytest.approx(-2.0)


class TestStabilizingFeedback:
    """测试默认镇定反馈"""

    def test_dstable(self):
        """测试 d-稳定判断"""
        assert is_dstable(np.diag([0.5, -0.9]))
        assert not is_dstable(np.diag([0.5, 1.0]))

    def test_zero_for_stable_a(self):
        """测试 A 已 d-稳定时 F = 0"""
        p = DareProblem(
            a=np.diag([0.5, 0.2]), b=[[1.0], [1.0]], r=[[1.0]], h=np.eye(2)
        )
        f = default_stabilizing_feedback(p)

        assert f.shape == (1, 2)
        np.testing.assert_array_equal(f, 0)

    @pytest.mark.parametrize("example_id", ["ex1", "ex2", "ex4"])
    def test_examples(self, example_id):
        """测试内置示例"""
        p, _ = builtin_example(example_id)
        f = default_stabilizing_feedback(p)

        assert is_dstable(p.a - p.b @ f)

    def test_random_problems(self):
        """测试随机问题"""
        rng = np.random.default_rng(11)
        for _ in range(5):
            p = random_stabilizable_problem(rng, 4, 2)
            f = default_stabilizing_feedback(p)

            assert is_dstable(p.a - p.b @ f)

    def test_not_stabilizable(self):
        """测试不可镇定"""
        p = DareProblem(
            a=np.diag([2.0, 2.0]), b=[[1.0], [0.0]], r=[[1.0]], h=np.eye(2)
        )

        with pytest.raises(NotStabilizableError, match="λ=2"):
            default_stabilizing_feedback(p)
