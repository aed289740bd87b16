"""
测试配置
"""

import os
from unittest.mock import patch

import pytest

from extremal_dare.config import ExampleConfig, SolverConfig


class TestSolverConfig:
    """测试求解器配置"""

    def test_defaults(self):
        """测试默认值"""
        with patch.dict(os.environ, {}, clear=True):
            config = SolverConfig()

        assert config.seed == SolverConfig.DEFAULT_SEED
        assert config.log_level == "WARNING"
        assert config.refine_steps == SolverConfig.REFINE_STEPS

    def test_seed_from_env(self):
        """测试从环境变量读取种子"""
        with patch.dict(os.environ, {"DARE_SEED": "7"}):
            assert SolverConfig().seed == 7

    def test_explicit_seed_wins(self):
        """测试显式种子优先于环境变量"""
        with patch.dict(os.environ, {"DARE_SEED": "7"}):
            assert SolverConfig(seed=11).seed == 11

    def test_invalid_seed_env(self):
        """测试无效的种子环境变量"""
        with patch.dict(os.environ, {"DARE_SEED": "abc"}):
            with pytest.raises(ValueError, match="DARE_SEED"):
                SolverConfig()

    def test_log_level_from_env(self):
        """测试从环境变量读取日志级别"""
        with patch.dict(os.environ, {"DARE_LOG_LEVEL": "debug"}):
            assert SolverConfig().log_level == "DEBUG"

    def test_refine_steps(self):
        """测试 Newton 校正步数"""
        assert SolverConfig(refine_steps=0).refine_steps == 0
        with pytest.raises(ValueError, match="refine_steps"):
            SolverConfig(refine_steps=-1)

    def test_threshold_constants(self):
        """测试数值阈值"""
        assert SolverConfig.HERMITIAN_RTOL == 1e-13
        assert SolverConfig.ITERATE_HERMITIAN_RTOL == 1e-8
        assert SolverConfig.INVERSE_COND_LIMIT == 1e12
        assert SolverConfig.ROUTE_AGREEMENT_RTOL == 1e-6
        assert SolverConfig.FLOW_ORACLE_BUDGET == 4096
        assert SolverConfig.INPUT_PSD_RTOL == 1e-12


class TestExampleConfig:
    """测试内置示例配置"""

    def test_all_examples(self):
        """测试示例列表"""
        assert ExampleConfig.get_all_examples() == ["ex1", "ex2", "ex3", "ex4"]

    def test_valid_example(self):
        """测试示例 ID 校验"""
        assert ExampleConfig.is_valid_example("ex4")
        assert not ExampleConfig.is_valid_example("ex5")

    def test_example_name(self):
        """测试示例名称"""
        assert "Example 1" in ExampleConfig.get_example_name("ex1")
        assert ExampleConfig.get_example_name("unknown") == "unknown"

    def test_recommended_tol(self):
        """测试推荐容差"""
        assert ExampleConfig.get_recommended_tol("ex1") == 1e-15
        assert ExampleConfig.get_recommended_tol("ex4") == 1e-12
        assert ExampleConfig.get_recommended_tol("other") == 1e-14
