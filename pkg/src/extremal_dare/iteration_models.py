"""
迭代选项与迭代报告模型
"""

import math
from typing import Optional

import numpy as np
from pydantic import Field, model_validator

from .common_models import (
    DenseMatrix,
    Direction,
    FrozenModel,
    HermitianMatrix,
    Termination,
)
from .config import SolverConfig


class IterationOptions(FrozenModel):
    """迭代选项"""

    tol: float = Field(1e-14, gt=0, description="NRes 停止阈值")
    max_iter: int = Field(200, ge=1, description="最大迭代次数")
    monotonicity_check: bool = Field(True, description="是否检查单调性")
    record_history: bool = Field(False, description="是否保留全部迭代矩阵")
    stagnation_window: int = Field(
        SolverConfig.STAGNATION_WINDOW, ge=2, description="停滞检测窗口"
    )
    stagnation_ratio: float = Field(
        SolverConfig.STAGNATION_RATIO, gt=0, le=1, description="停滞判定比例"
    )


class IterationReport(FrozenModel):
    """不动点迭代或 Newton 迭代的报告"""

    method: str = Field(..., description="迭代方法")
    x: HermitianMatrix = Field(..., description="最后一个迭代矩阵")
    history: Optional[list[HermitianMatrix]] = Field(
        None, description="全部迭代矩阵（record_history 时保留）"
    )
    nres_history: list[float] = Field(default_factory=list, description="NRes 历史")
    rho_t_history: list[Optional[float]] = Field(
        default_factory=list,
        description="闭环谱半径历史，与 nres_history 逐项对应；T 无定义处为 None",
    )
    iterations: int = Field(..., ge=0, description="迭代步数")
    termination: Termination = Field(..., description="终止原因")
    rate_estimate: Optional[float] = Field(None, ge=0, description="收敛速率估计")
    direction: Optional[Direction] = Field(None, description="单调方向")
    tol: float = Field(..., gt=0, description="停止阈值")

    @model_validator(mode="after")
    def _check_history(self) -> "IterationReport":
        if not all(math.isfinite(v) for v in self.nres_history):
            raise ValueError("nres_history must be finite")
        if self.rho_t_history and len(self.rho_t_history) != len(self.nres_history):
            raise ValueError("rho_t_history must align with nres_history")
        if self.termination == Termination.CONVERGED and (
            not self.nres_history or self.nres_history[-1] > self.tol
        ):
            raise ValueError("converged report must end below tol")
        if self.rate_estimate is not None and len(self.nres_history) < 4:
            raise ValueError("rate_estimate needs at least 4 history points")
        return self

    @property
    def converged(self) -> bool:
        return self.termination == Termination.CONVERGED

    @property
    def final_nres(self) -> Optional[float]:
        return self.nres_history[-1] if self.nres_history else None


class TripleState(FrozenModel):
    """半群递推中的三元组 (A_k, G_k, H_k)"""

    a_k: DenseMatrix = Field(..., description="A_k")
    g_k: HermitianMatrix = Field(..., description="G_k")
    h_k: HermitianMatrix = Field(..., description="H_k")

    @property
    def n(self) -> int:
        return int(self.a_k.shape[0])

    def as_tuple(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.a_k, self.g_k, self.h_k


class AfpiStep(FrozenModel):
    """AFPI 外层一步的诊断量；已停止的序列对应字段为 None"""

    k: int = Field(..., ge=1, description="外层迭代序号")
    nres_xhat: Optional[float] = Field(None, description="NRes(X̂_k)")
    nres_h: Optional[float] = Field(None, description="NRes(H_k)")
    nres_g: Optional[float] = Field(None, description="二类对偶问题下的 NRes(G_k)")
    rho_t_xhat: Optional[float] = Field(None, description="ρ(T_{X̂_k})")
    rho_t_h: Optional[float] = Field(None, description="ρ(T_{H_k})")
    mu_t_xhat: Optional[float] = Field(None, description="μ(T_{X̂_k})")
    mu_t_h: Optional[float] = Field(None, description="μ(T_{H_k})")
    norm_xhat: Optional[float] = Field(None, description="‖X̂_k‖")
    norm_h: Optional[float] = Field(None, description="‖H_k‖")
    norm_a: float = Field(..., description="‖A_k‖")


class AfpiReport(FrozenModel):
    """AFPI(r) 运行报告"""

    r: int = Field(..., ge=2, description="加速因子 r")
    xhat_limit: HermitianMatrix = Field(
        ..., description="X̂ 序列的极限；未收敛时为 NRes 最小的迭代值"
    )
    h_limit: HermitianMatrix = Field(
        ..., description="H 序列的极限；未收敛时为 NRes 最小的迭代值"
    )
    g_limit: HermitianMatrix = Field(..., description="G 序列的最后值")
    steps: list[AfpiStep] = Field(default_factory=list, description="逐步诊断")
    iterations_xhat: int = Field(0, ge=0, description="X̂ 序列迭代数")
    iterations_h: int = Field(0, ge=0, description="H 序列迭代数")
    iterations_g: int = Field(0, ge=0, description="G 序列迭代数")
    termination_xhat: Termination = Field(..., description="X̂ 序列终止原因")
    termination_h: Termination = Field(..., description="H 序列终止原因")
    termination_g: Optional[Termination] = Field(
        None, description="G 序列终止原因（未跟踪时为 None）"
    )
    xhat_history: Optional[list[HermitianMatrix]] = Field(None)
    h_history: Optional[list[HermitianMatrix]] = Field(None)
    tol: float = Field(..., gt=0)
    negated: bool = Field(
        False, description="诊断量是否在原问题上按 −Y 计算（一类对偶运行）"
    )

    @property
    def xhat_converged(self) -> bool:
        return self.termination_xhat == Termination.CONVERGED

    @property
    def h_converged(self) -> bool:
        return self.termination_h == Termination.CONVERGED

    @property
    def g_converged(self) -> bool:
        return self.termination_g == Termination.CONVERGED

    @property
    def outer_iterations(self) -> int:
        return len(self.steps)

    def nres_xhat_history(self) -> list[float]:
        return [s.nres_xhat for s in self.steps if s.nres_xhat is not None]

    def nres_h_history(self) -> list[float]:
        return [s.nres_h for s in self.steps if s.nres_h is not None]
