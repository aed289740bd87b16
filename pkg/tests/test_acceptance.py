"""
测试验收套件
"""

import numpy as np
import pytest

from extremal_dare.acceptance import CRITERIA, run_acceptance
from extremal_dare.exceptions import NotStabilizableError


class TestRunAcceptance:
    """测试验收套件调度"""

    def test_only_subset(self):
        """测试只运行指定编号"""
        results = run_acceptance(seed=1, only=["1", "3"])

        assert [r.name for r in results] == ["1. ex1 exactness", "3. ex2"]
        assert all(r.passed for r in results)

    def test_error_becomes_failure(self):
        """测试抛出异常的验收项记为失败"""

        def broken(rng: np.random.Generator):
            raise NotStabilizableError("(A,B) is not stabilizable")

        with pytest.MonkeyPatch.context() as mp:
            mp.setitem(CRITERIA, "1", broken)
            results = run_acceptance(seed=1, only=["1"])

        assert len(results) == 1
        assert not results[0].passed
        assert results[0].name == "1. broken"
        assert "NotStabilizableError" in results[0].detail


@pytest.mark.slow
class TestFullSuite:
    """测试完整验收套件"""

    @pytest.mark.parametrize("key", sorted(CRITERIA, key=int))
    def test_criterion(self, key):
        """测试单个验收项通过"""
        (result,) = run_acceptance(seed=20240601, only=[key])

        assert result.passed, result.detail
