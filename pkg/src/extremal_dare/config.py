"""
DARE 极值解求解器配置
"""

import os
from typing import Optional


class SolverConfig:
    """求解器数值阈值配置类"""

    # Hermite 对称化容差（相对）
    HERMITIAN_RTOL = 1e-13

    # 迭代内部对称化容差，病态求解会放大不对称
    ITERATE_HERMITIAN_RTOL = 1e-8

    # 判定矩阵数值奇异的条件数上限
    COND_LIMIT = 1e14

    # 对 G∞ 求逆时的条件数上限
    INVERSE_COND_LIMIT = 1e12

    # 单位圆边界带宽
    BOUNDARY_BAND = 1e-10

    # 谱条件检查容差
    SPECTRAL_TOL = 1e-8

    # 半正定判定容差
    PSD_TOL = 1e-10

    # 输入 H 的半正定判定容差，相对 max(1,‖H‖)
    INPUT_PSD_RTOL = 1e-12

    # 单调性检查容差（相对）
    MONOTONE_RTOL = 1e-10

    # 两条 X₋,m 路线的一致性容差
    ROUTE_AGREEMENT_RTOL = 1e-6

    # 停滞检测：窗口长度与残差下降比例
    STAGNATION_WINDOW = 5
    STAGNATION_RATIO = 0.99

    # 解的 Newton 校正：最多步数与允许的相对步长
    REFINE_STEPS = 2
    REFINE_RTOL = 1e-6

    # AFPI 序列残差回升判定：已达到的最小残差上限与回升倍数
    DIVERGENCE_NRES = 1e-8
    DIVERGENCE_RATIO = 1e3

    # 对偶系数两种构造的一致性容差（相对）
    CROSS_CHECK_RTOL = 1e-10

    # 二类对偶特征分解截断阈值
    CLIP_EIGEN = 1e-13

    # 半群验证中奇异样本的重采样次数
    SEMIGROUP_RESAMPLES = 10

    # 离散流验证的暴力迭代步数上限
    FLOW_ORACLE_BUDGET = 4096

    # 默认随机种子
    DEFAULT_SEED = 20240601

    def __init__(
        self,
        seed: Optional[int] = None,
        log_level: Optional[str] = None,
        refine_steps: Optional[int] = None,
    ):
        env_seed = self._get_seed_from_env()
        self.seed = seed if seed is not None else env_seed
        if self.seed is None:
            self.seed = self.DEFAULT_SEED
        self.log_level = log_level or self._get_log_level_from_env() or "WARNING"
        self.refine_steps = (
            refine_steps if refine_steps is not None else self.REFINE_STEPS
        )

        if self.refine_steps < 0:
            raise ValueError("refine_steps must be nonnegative.")

    @staticmethod
    def _get_seed_from_env() -> Optional[int]:
        """从环境变量获取随机种子"""
        raw = os.getenv("DARE_SEED")
        if raw is None or raw.strip() == "":
            return None
        try:
            return int(raw)
        except ValueError:
            raise ValueError(
                f"DARE_SEED must be an integer, got {raw!r}."
            ) from None

    @staticmethod
    def _get_log_level_from_env() -> Optional[str]:
        """从环境变量获取日志级别"""
        raw = os.getenv("DARE_LOG_LEVEL")
        return raw.upper() if raw else None


class ExampleConfig:
    """内置示例配置类"""

    # 示例 ID 到名称的映射
    EXAMPLE_MAPPING = {
        "ex1": "Example 1: 2x2, stabilizable but not detectable",
        "ex2": "Example 2: 5x5, singular A",
        "ex3": "Example 3: 8x8, unimodular spectrum, H = 0",
        "ex4": "Example 4: 2x2, controllable with nonsingular A",
    }

    # 各示例推荐的 NRes 停止阈值
    RECOMMENDED_TOL = {
        "ex1": 1e-15,
        "ex2": 1e-15,
        "ex3": 1e-15,
        "ex4": 1e-12,
    }

    @classmethod
    def get_example_name(cls, example_id: str) -> str:
        """获取示例名称"""
        return cls.EXAMPLE_MAPPING.get(example_id, example_id)

    @classmethod
    def get_recommended_tol(cls, example_id: str) -> float:
        """获取示例推荐容差"""
        return cls.RECOMMENDED_TOL.get(example_id, 1e-14)

    @classmethod
    def is_valid_example(cls, example_id: str) -> bool:
        """检查示例 ID 是否有效"""
        return example_id in cls.EXAMPLE_MAPPING

    @classmethod
    def get_all_examples(cls) -> list[str]:
        """获取所有示例 ID"""
        return list(cls.EXAMPLE_MAPPING.keys())
