"""
DARE 问题文件数据模型
"""

from typing import Any, Optional

import numpy as np
import scipy.linalg
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationInfo,
    field_validator,
    model_validator,
)

from .common_models import (
    DenseMatrix,
    EncodedEntry,
    FrozenModel,
    decode_entry,
    encode_matrix,
)
from .config import SolverConfig
from .riccati_models import DareProblem

MatrixPayload = list[Any]


def _reshape(value: MatrixPayload, rows: Optional[int], cols: int) -> np.ndarray:
    """
    行列表或平铺列表转为矩阵

    每个元素都是长度为 cols 的列表（且行数相符）时按嵌套行解释，
    否则按行展开的平铺列表解释；rows 为 None 时行数由元素个数推断。
    """
    if not isinstance(value, list) or not value:
        raise ValueError("matrix must be a non-empty JSON array")
    nested = all(isinstance(row, list) and len(row) == cols for row in value) and (
        rows is None or len(value) == rows
    )
    if nested:
        arr = np.array(
            [[decode_entry(v) for v in row] for row in value], dtype=np.complex128
        ).reshape(len(value), cols)
    else:
        flat = np.array([decode_entry(v) for v in value], dtype=np.complex128)
        if flat.size % cols != 0:
            raise ValueError(f"{flat.size} entries do not fill rows of {cols}")
        arr = flat.reshape(-1, cols)
    if rows is not None and arr.shape[0] != rows:
        raise ValueError(f"expected {rows}×{cols}, got {arr.shape[0]}×{cols}")
    return arr


def _require_hermitian(arr: np.ndarray) -> np.ndarray:
    scale = max(1.0, float(np.linalg.norm(arr, 2)))
    drift = float(np.linalg.norm(arr - arr.conj().T, 2))
    if drift > SolverConfig.HERMITIAN_RTOL * scale:
        raise ValueError(f"matrix is not Hermitian (‖M−Mᴴ‖={drift:.3e})")
    return arr


def _dimension(info: ValidationInfo, key: str) -> int:
    value = info.data.get(key)
    if value is None:
        raise ValueError(f"'{key}' is missing or invalid")
    return int(value)


class ProblemFile(BaseModel):
    """
    问题文件 (JSON)

    矩阵按行给出，可以是嵌套列表或平铺列表；复数元素写作 [re, im]，
    实数元素可直接写数值。H 与 C 恰好给出一个。
    """

    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    n: int = Field(..., ge=1, description="状态维数")
    m: int = Field(..., ge=1, description="输入维数")
    a: MatrixPayload = Field(..., alias="A", description="A (n×n)")
    b: MatrixPayload = Field(..., alias="B", description="B (n×m)")
    r: MatrixPayload = Field(..., alias="R", description="R (m×m)，Hermite 正定")
    h: Optional[MatrixPayload] = Field(None, alias="H", description="H (n×n)，半正定")
    c: Optional[MatrixPayload] = Field(None, alias="C", description="C (p×n)")
    name: str = Field("", description="问题名称")

    @field_validator("a")
    @classmethod
    def _check_a(cls, v: MatrixPayload, info: ValidationInfo) -> MatrixPayload:
        n = _dimension(info, "n")
        _reshape(v, n, n)
        return v

    @field_validator("b")
    @classmethod
    def _check_b(cls, v: MatrixPayload, info: ValidationInfo) -> MatrixPayload:
        _reshape(v, _dimension(info, "n"), _dimension(info, "m"))
        return v

    @field_validator("r")
    @classmethod
    def _check_r(cls, v: MatrixPayload, info: ValidationInfo) -> MatrixPayload:
        m = _dimension(info, "m")
        arr = _require_hermitian(_reshape(v, m, m))
        min_eig = float(scipy.linalg.eigvalsh((arr + arr.conj().T) / 2).min())
        if not min_eig > 0.0:
            raise ValueError(f"R must be positive definite (min eig {min_eig:.3e})")
        return v

    @field_validator("h")
    @classmethod
    def _check_h(
        cls, v: Optional[MatrixPayload], info: ValidationInfo
    ) -> Optional[MatrixPayload]:
        if v is None:
            return v
        n = _dimension(info, "n")
        arr = _require_hermitian(_reshape(v, n, n))
        herm = (arr + arr.conj().T) / 2
        min_eig = float(scipy.linalg.eigvalsh(herm).min())
        scale = max(1.0, float(np.linalg.norm(herm, 2)))
        if min_eig < -SolverConfig.INPUT_PSD_RTOL * scale:
            raise ValueError(
                f"H must be positive semidefinite (min eig {min_eig:.3e})"
            )
        return v

    @field_validator("c")
    @classmethod
    def _check_c(
        cls, v: Optional[MatrixPayload], info: ValidationInfo
    ) -> Optional[MatrixPayload]:
        if v is not None:
            _reshape(v, None, _dimension(info, "n"))
        return v

    @model_validator(mode="after")
    def _exactly_one_weight(self) -> "ProblemFile":
        if (self.h is None) == (self.c is None):
            raise ValueError("exactly one of H|C must be given")
        return self

    def to_problem(self) -> DareProblem:
        """转换为 DareProblem"""
        n, m = self.n, self.m
        h = None if self.h is None else _reshape(self.h, n, n)
        c = None if self.c is None else _reshape(self.c, None, n)
        return DareProblem(
            a=_reshape(self.a, n, n),
            b=_reshape(self.b, n, m),
            r=_reshape(self.r, m, m),
            h=h,
            c=c,
            name=self.name,
        )

    @classmethod
    def from_problem(cls, p: DareProblem) -> "ProblemFile":
        """由 DareProblem 生成问题文件；带 C 的问题写 C，否则写 H"""
        weights: dict[str, list[list[EncodedEntry]]]
        if p.c is not None:
            weights = {"C": encode_matrix(p.c)}
        else:
            weights = {"H": encode_matrix(p.h)}
        return cls(
            n=p.n,
            m=p.m,
            A=encode_matrix(p.a),
            B=encode_matrix(p.b),
            R=encode_matrix(p.r),
            name=p.name,
            **weights,
        )


class FeedbackFile(FrozenModel):
    """反馈矩阵文件：JSON 行列表，复数元素写作 [re, im]"""

    f: DenseMatrix = Field(..., description="反馈矩阵 F (m×n)")
