"""
公共类型：矩阵字段类型、枚举与谱摘要
"""

from enum import Enum
from typing import Annotated, Any, Literal, Optional, Union

import numpy as np
from pydantic import (
    BaseModel,
    BeforeValidator,
    ConfigDict,
    Field,
    PlainSerializer,
    model_validator,
)

from .config import SolverConfig

SolutionName = Literal["x_pm", "x_pM", "x_mM", "x_mm"]
ValidMethods = Literal["afpi", "fpi", "newton"]
ValidTargets = Literal["all", "psd", "nsd"]
ProblemKind = Literal["primal", "dual_first", "dual_second"]
RateMode = Literal["r_linear", "r_superlinear"]
Direction = Literal["nondecreasing", "nonincreasing"]

EncodedEntry = Union[float, list[float]]


class Termination(str, Enum):
    """迭代终止原因"""

    CONVERGED = "converged"
    MAX_ITER = "max_iter"
    STAGNATED = "stagnated"
    BREAKDOWN = "breakdown"
    MONOTONICITY_VIOLATED = "monotonicity_violated"
    RUNNING = "running"


def encode_entry(value: complex) -> EncodedEntry:
    """把复数编码为 JSON 值：实数直接输出，否则输出 [re, im]"""
    value = complex(value)
    if value.imag == 0.0:
        return float(value.real)
    return [float(value.real), float(value.imag)]


def decode_entry(value: Any) -> complex:
    """解析 JSON 值为复数"""
    if isinstance(value, bool):
        raise ValueError("boolean is not a matrix entry")
    if isinstance(value, (int, float)):
        return complex(float(value), 0.0)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        re, im = value
        if isinstance(re, bool) or isinstance(im, bool):
            raise ValueError("boolean is not a matrix entry")
        return complex(float(re), float(im))
    raise ValueError(f"matrix entry must be a number or [re, im], got {value!r}")


def encode_matrix(m: np.ndarray) -> list[list[EncodedEntry]]:
    """把矩阵编码为按行排列的嵌套列表"""
    return [[encode_entry(v) for v in row] for row in np.atleast_2d(m)]


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.complex128, copy=True)
    arr.flags.writeable = False
    return arr


def _coerce_dense(value: Any) -> np.ndarray:
    if isinstance(value, np.ndarray):
        arr = value.astype(np.complex128, copy=True)
    else:
        rows = value
        if not isinstance(rows, (list, tuple)):
            raise ValueError("matrix must be an array or a list of rows")
        if not all(isinstance(row, (list, tuple)) for row in rows):
            raise ValueError("each matrix row must be an array")
        arr = np.array(
            [[decode_entry(v) for v in row] for row in rows], dtype=np.complex128
        )
    if arr.ndim != 2:
        raise ValueError(f"matrix must be two-dimensional, got ndim={arr.ndim}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix entries must be finite")
    return _freeze(arr)


def _coerce_hermitian(value: Any) -> np.ndarray:
    arr = _coerce_dense(value)
    if arr.shape[0] != arr.shape[1]:
        raise ValueError(f"Hermitian matrix must be square, got {arr.shape}")
    scale = max(1.0, float(np.linalg.norm(arr, 2))) if arr.size else 1.0
    drift = float(np.linalg.norm(arr - arr.conj().T, 2)) if arr.size else 0.0
    if drift > SolverConfig.HERMITIAN_RTOL * scale:
        raise ValueError(f"matrix is not Hermitian (‖M−Mᴴ‖={drift:.3e})")
    return _freeze((arr + arr.conj().T) / 2)


def _coerce_vector(value: Any) -> np.ndarray:
    arr = np.asarray(value, dtype=np.complex128).reshape(-1)
    return _freeze(arr)


def _serialize_matrix(m: np.ndarray) -> list[list[EncodedEntry]]:
    return encode_matrix(m)


def _serialize_vector(v: np.ndarray) -> list[EncodedEntry]:
    return [encode_entry(x) for x in v]


DenseMatrix = Annotated[
    np.ndarray,
    BeforeValidator(_coerce_dense),
    PlainSerializer(_serialize_matrix, return_type=list),
]
HermitianMatrix = Annotated[
    np.ndarray,
    BeforeValidator(_coerce_hermitian),
    PlainSerializer(_serialize_matrix, return_type=list),
]
ComplexVector = Annotated[
    np.ndarray,
    BeforeValidator(_coerce_vector),
    PlainSerializer(_serialize_vector, return_type=list),
]


class FrozenModel(BaseModel):
    """不可变模型基类"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)


class SpectrumSummary(FrozenModel):
    """谱摘要"""

    eigenvalues: ComplexVector = Field(..., description="特征值")
    rho: float = Field(..., ge=0, description="谱半径")
    mu: float = Field(..., ge=0, description="最小特征值模")
    rho_disk: Optional[float] = Field(
        None, ge=0, description="开单位圆盘内特征值的最大模"
    )

    @model_validator(mode="after")
    def _check_disk(self) -> "SpectrumSummary":
        if self.rho_disk is not None and not (
            self.rho_disk <= self.rho and self.rho_disk < 1.0
        ):
            raise ValueError("rho_disk must satisfy rho_disk ≤ rho and rho_disk < 1")
        return self

    @property
    def order(self) -> int:
        """矩阵阶数"""
        return int(self.eigenvalues.shape[0])
