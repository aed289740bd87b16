"""
稠密复矩阵数值原语

Hermite 对称化、谱量、线性求解以及基于 Kronecker 展开的 Stein 方程求解。
所有函数都是输入的纯函数，返回的数组均为只读。
"""

import logging
from typing import Optional

import numpy as np
import scipy.linalg
import scipy.optimize

from .common_models import SpectrumSummary
from .config import SolverConfig
from .exceptions import (
    AsymmetryTooLargeError,
    DimensionMismatchError,
    EigenSolverFailureError,
    NonSquareError,
    SingularSteinOperatorError,
)

logger = logging.getLogger(__name__)


def freeze(m: np.ndarray) -> np.ndarray:
    """返回只读的 complex128 副本"""
    out = np.array(m, dtype=np.complex128, copy=True)
    out.flags.writeable = False
    return out


def as_matrix(m: np.ndarray) -> np.ndarray:
    """把输入转换为二维 complex128 数组"""
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(1, -1)
    return arr


def require_square(m: np.ndarray, name: str = "matrix") -> np.ndarray:
    arr = as_matrix(m)
    if arr.shape[0] != arr.shape[1]:
        raise NonSquareError(
            f"{name} must be square, got shape {arr.shape}",
            details={"shape": arr.shape},
        )
    return arr


def require_same_order(a: np.ndarray, b: np.ndarray, what: str) -> None:
    if a.shape[0] != b.shape[0]:
        raise DimensionMismatchError(
            f"{what}: orders differ ({a.shape[0]} vs {b.shape[0]})",
            details={"left": a.shape, "right": b.shape},
        )


def spectral_norm(m: np.ndarray) -> float:
    """最大奇异值"""
    arr = as_matrix(m)
    if arr.size == 0:
        return 0.0
    return float(np.linalg.norm(arr, 2))


def hermitianize(
    m: np.ndarray, rtol: float = SolverConfig.HERMITIAN_RTOL
) -> np.ndarray:
    """
    返回 (m+mᴴ)/2

    Args:
        m: 方阵
        rtol: 允许的相对不对称量，按 max(1, ‖m‖) 缩放

    Returns:
        np.ndarray: 只读 Hermite 矩阵

    Raises:
        NonSquareError: m 不是方阵
        AsymmetryTooLargeError: ‖m−mᴴ‖ 超过容差
    """
    arr = require_square(m)
    drift = spectral_norm(arr - arr.conj().T)
    scale = max(1.0, spectral_norm(arr))
    if drift > rtol * scale:
        raise AsymmetryTooLargeError(
            f"asymmetry {drift:.3e} exceeds {rtol:.1e}·{scale:.3e}",
            details={"drift": drift, "scale": scale},
        )
    return freeze((arr + arr.conj().T) / 2)


def hermitianize_iterate(m: np.ndarray) -> np.ndarray:
    """迭代量的对称化，容差放宽到 ITERATE_HERMITIAN_RTOL"""
    return hermitianize(m, rtol=SolverConfig.ITERATE_HERMITIAN_RTOL)


def symmetric_part(m: np.ndarray) -> np.ndarray:
    """不做漂移检查的 Hermite 部分"""
    arr = as_matrix(m)
    return freeze((arr + arr.conj().T) / 2)


def eigenvalues(m: np.ndarray) -> np.ndarray:
    arr = require_square(m)
    try:
        return scipy.linalg.eigvals(arr)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise EigenSolverFailureError(f"eigenvalue computation failed: {e}") from e


def spectrum(m: np.ndarray) -> SpectrumSummary:
    """
    计算谱摘要

    rho_disk 只统计严格位于开单位圆盘内的特征值，交集为空时为 None。
    """
    eigs = eigenvalues(m)
    moduli = np.abs(eigs)
    inside = moduli[moduli < 1.0]
    return SpectrumSummary(
        eigenvalues=eigs,
        rho=float(moduli.max()) if moduli.size else 0.0,
        mu=float(moduli.min()) if moduli.size else 0.0,
        rho_disk=float(inside.max()) if inside.size else None,
    )


def spectral_radius(m: np.ndarray) -> float:
    return spectrum(m).rho


def spectrum_distance(left: np.ndarray, right: np.ndarray) -> float:
    """
    两组特征值最优配对后的最大距离

    配对由 |λᵢ − μⱼ| 上的线性指派给出，近重特征值的排序扰动不影响结果。
    """
    lhs = np.asarray(left, dtype=np.complex128).reshape(-1)
    rhs = np.asarray(right, dtype=np.complex128).reshape(-1)
    if lhs.shape != rhs.shape:
        raise DimensionMismatchError(
            f"spectra have different sizes ({lhs.size} vs {rhs.size})"
        )
    if lhs.size == 0:
        return 0.0
    cost = np.abs(lhs[:, None] - rhs[None, :])
    rows, cols = scipy.optimize.linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


def min_eigenvalue(m: np.ndarray) -> float:
    """Hermite 矩阵的最小特征值"""
    arr = symmetric_part(m)
    if arr.size == 0:
        return 0.0
    return float(scipy.linalg.eigvalsh(arr).min())


def is_psd(m: np.ndarray, tol: float = 0.0) -> bool:
    """最小特征值 ≥ −tol 时为真"""
    return min_eigenvalue(m) >= -tol


def is_pd(m: np.ndarray) -> bool:
    return min_eigenvalue(m) > 0.0


def condition_number(m: np.ndarray) -> float:
    """2-范数条件数，奇异矩阵返回 inf"""
    arr = as_matrix(m)
    if arr.size == 0:
        return 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        cond = float(np.linalg.cond(arr))
    return cond if np.isfinite(cond) else float("inf")


def relative_error(x: np.ndarray, reference: np.ndarray) -> float:
    """‖x − ref‖ / max(‖ref‖, tiny)"""
    denom = spectral_norm(reference)
    diff = spectral_norm(as_matrix(x) - as_matrix(reference))
    if denom == 0.0:
        return diff
    return diff / denom


def stein_apply(a: np.ndarray, x: np.ndarray) -> np.ndarray:
    """S_a(x) = x − aᴴxa"""
    a = require_square(a, "a")
    x = require_square(x, "x")
    require_same_order(a, x, "stein_apply")
    return symmetric_part(x - a.conj().T @ x @ a)


def stein_operator_singular(a: np.ndarray, tol: float = 1e-12) -> bool:
    """1 ∈ {λᵢ·conj(λⱼ)} 时 Stein 算子奇异"""
    eigs = eigenvalues(a)
    products = np.outer(eigs, eigs.conj())
    return bool(np.min(np.abs(1.0 - products)) <= tol) if eigs.size else False


def solve_stein(a: np.ndarray, q: np.ndarray) -> np.ndarray:
    """
    求解 Stein 方程 X − aᴴXa = q

    把方程按列展开为 n²×n² 线性系统 (I − aᵀ⊗aᴴ)·vec(X) = vec(q) 后直接求解。

    Args:
        a: n×n 矩阵
        q: n×n Hermite 右端项

    Returns:
        np.ndarray: Hermite 解 X

    Raises:
        DimensionMismatchError: a 与 q 阶数不同
        SingularSteinOperatorError: 存在 λᵢ·conj(λⱼ) = 1
    """
    a = require_square(a, "a")
    q = require_square(q, "q")
    require_same_order(a, q, "solve_stein")
    n = a.shape[0]
    if stein_operator_singular(a):
        raise SingularSteinOperatorError(
            "Stein operator is singular: 1 ∈ {λᵢ·conj(λⱼ)}",
            details={"eigenvalues": eigenvalues(a).tolist()},
        )

    lifted = np.eye(n * n, dtype=np.complex128) - np.kron(a.T, a.conj().T)
    rhs = q.reshape(-1, order="F")
    try:
        vec_x = scipy.linalg.solve(lifted, rhs)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as e:
        raise SingularSteinOperatorError(f"Kronecker-lifted solve failed: {e}") from e

    x = symmetric_part(vec_x.reshape(n, n, order="F"))
    residual = spectral_norm(x - a.conj().T @ x @ a - q)
    if residual > 1e-12 * max(1.0, spectral_norm(q)):
        logger.warning(
            "Stein residual %.3e above 1e-12 relative (cond of lift %.3e)",
            residual,
            condition_number(lifted),
        )
    return x


def checked_solve(
    lhs: np.ndarray,
    rhs: np.ndarray,
    error: type[Exception],
    what: str,
    limit: Optional[float] = SolverConfig.COND_LIMIT,
) -> np.ndarray:
    """
    带条件数检查的线性求解

    limit 为 None 时只检查结果有限。
    """
    lhs = as_matrix(lhs)
    if limit is not None:
        cond = condition_number(lhs)
        if not cond < limit:
            raise error(f"{what} is numerically singular (cond={cond:.3e})")
    try:
        out = scipy.linalg.solve(lhs, rhs)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as e:
        raise error(f"{what} is singular: {e}") from e
    if not np.all(np.isfinite(out)):
        raise error(f"{what} solve produced non-finite entries")
    return np.asarray(out, dtype=np.complex128)
