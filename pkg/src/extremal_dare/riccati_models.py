"""
DARE 问题数据模型
"""

from functools import cached_property
from typing import Any, Optional

import numpy as np
import scipy.linalg
from pydantic import Field, model_validator

from .common_models import (
    DenseMatrix,
    FrozenModel,
    HermitianMatrix,
    ProblemKind,
)
from .config import SolverConfig


class DareProblem(FrozenModel):
    """
    离散代数 Riccati 方程 X = AᴴX(I+GX)⁻¹A + H 的系数

    G = BR⁻¹Bᴴ 按需计算并缓存；只给出 C 时 H 取 CᴴC。
    """

    a: DenseMatrix = Field(..., description="状态矩阵 A (n×n)")
    b: DenseMatrix = Field(..., description="输入矩阵 B (n×m)")
    r: HermitianMatrix = Field(..., description="权重矩阵 R (m×m)，正定")
    h: HermitianMatrix = Field(..., description="权重矩阵 H (n×n)")
    c: Optional[DenseMatrix] = Field(None, description="输出矩阵 C (p×n)")
    name: str = Field("", description="问题名称")
    kind: ProblemKind = Field("primal", description="原问题或对偶问题")

    @model_validator(mode="before")
    @classmethod
    def _derive_h(cls, data: Any) -> Any:
        if isinstance(data, dict) and data.get("h") is None:
            c = data.get("c")
            if c is None:
                raise ValueError("either h or c must be given")
            c_arr = np.asarray(c, dtype=np.complex128)
            if c_arr.ndim == 1:
                c_arr = c_arr.reshape(1, -1)
            data = {**data, "c": c_arr, "h": c_arr.conj().T @ c_arr}
        return data

    @model_validator(mode="after")
    def _check_problem(self) -> "DareProblem":
        n = self.a.shape[0]
        if self.a.shape != (n, n):
            raise ValueError(f"a must be square, got {self.a.shape}")
        if self.b.shape[0] != n:
            raise ValueError(f"b must have {n} rows, got {self.b.shape}")
        m = self.b.shape[1]
        if self.r.shape != (m, m):
            raise ValueError(f"r must be {m}×{m}, got {self.r.shape}")
        if self.h.shape != (n, n):
            raise ValueError(f"h must be {n}×{n}, got {self.h.shape}")
        if self.c is not None and self.c.shape[1] != n:
            raise ValueError(f"c must have {n} columns, got {self.c.shape}")

        r_min = float(scipy.linalg.eigvalsh(self.r).min())
        if not r_min > 0.0:
            raise ValueError(f"r must be positive definite (min eig {r_min:.3e})")

        if self.kind != "dual_first":
            h_min = float(scipy.linalg.eigvalsh(self.h).min())
            h_norm = float(np.linalg.norm(self.h, 2))
            if h_min < -SolverConfig.INPUT_PSD_RTOL * max(1.0, h_norm):
                raise ValueError(
                    f"h must be positive semidefinite (min eig {h_min:.3e})"
                )
        return self

    @property
    def n(self) -> int:
        """状态维数"""
        return int(self.a.shape[0])

    @property
    def m(self) -> int:
        """输入维数"""
        return int(self.b.shape[1])

    @cached_property
    def g(self) -> np.ndarray:
        """G = BR⁻¹Bᴴ"""
        rinv_bh = scipy.linalg.solve(self.r, self.b.conj().T, assume_a="her")
        g = self.b @ rinv_bh
        g = (g + g.conj().T) / 2
        g.flags.writeable = False
        return g

    @property
    def identity(self) -> np.ndarray:
        return np.eye(self.n, dtype=np.complex128)


class ClosedLoop(FrozenModel):
    """反馈增益 F_X 与闭环矩阵 T_X"""

    f: DenseMatrix = Field(..., description="反馈增益 F_X (m×n)")
    t: DenseMatrix = Field(..., description="闭环矩阵 T_X = A − BF_X")


class ResidualValue(FrozenModel):
    """归一化残差"""

    nres: float = Field(..., ge=0, description="归一化残差 NRes")
    raw: float = Field(..., ge=0, description="‖Z − R(Z)‖")
