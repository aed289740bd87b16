"""
对偶 DARE 变换

一类对偶 (Â, Ĝ, Ĥ) 的解与原问题的解通过 Y = −X 对应；二类对偶交换系数角色，
解通过 Y = −X⁻¹ 对应。
"""

import logging

import numpy as np
import scipy.linalg

from .config import SolverConfig
from .exceptions import (
    CrossCheckFailedError,
    SingularAError,
    SingularInnerMatrixError,
    SingularPencilError,
    SingularXError,
)
from .matrix_kernel import (
    as_matrix,
    checked_solve,
    condition_number,
    eigenvalues,
    spectral_norm,
    spectral_radius,
    spectrum_distance,
    symmetric_part,
)
from .riccati import closed_loop, riccati_apply
from .riccati_models import DareProblem
from .solution_models import DualFirstKind, DualSecondKind, TildeCoefficients

logger = logging.getLogger(__name__)


def _inverse(m: np.ndarray, error: type[Exception], what: str) -> np.ndarray:
    return checked_solve(m, np.eye(m.shape[0], dtype=np.complex128), error, what)


def _right_solve(
    m: np.ndarray, j: np.ndarray, error: type[Exception], what: str
) -> np.ndarray:
    """m·j⁻¹"""
    return checked_solve(j.conj().T, m.conj().T, error, what).conj().T


def _agree(left: np.ndarray, right: np.ndarray) -> bool:
    scale = max(spectral_norm(left), spectral_norm(right))
    diff = spectral_norm(left - right)
    return diff == 0.0 or diff <= SolverConfig.CROSS_CHECK_RTOL * scale


def build_first_kind(p: DareProblem) -> DualFirstKind:
    """
    构造一类对偶 DARE

    H^{(A)} = A⁻ᴴHA⁻¹，B̂ = A⁻¹B，R̂ = R + BᴴH^{(A)}B，
    Â = A⁻¹ − B̂R̂⁻¹BᴴH^{(A)}，Ĥ = H^{(A)} − H^{(A)}BR̂⁻¹BᴴH^{(A)}。

    Â 与中间系数形式 Ã − B̃R̃⁻¹C̃ 交叉检查，Ĥ 与 ÂᴴHA⁻¹ 交叉检查。

    Args:
        p: 原问题，A 必须非奇异

    Returns:
        DualFirstKind: 对偶问题与中间系数

    Raises:
        SingularAError: A 数值奇异
        CrossCheckFailedError: 两种构造不一致
    """
    cond = condition_number(p.a)
    if not cond < SolverConfig.COND_LIMIT:
        raise SingularAError(
            f"A is numerically singular (cond={cond:.3e})", details={"cond": cond}
        )
    a_inv = _inverse(p.a, SingularAError, "A")
    h_upper = symmetric_part(a_inv.conj().T @ p.h @ a_inv)
    b_hat = a_inv @ p.b
    c_tilde = p.b.conj().T @ h_upper
    r_hat = symmetric_part(p.r + c_tilde @ p.b)

    correction = checked_solve(r_hat, c_tilde, SingularInnerMatrixError, "R̂")
    a_hat = a_inv - b_hat @ correction
    h_hat = symmetric_part(h_upper - c_tilde.conj().T @ correction)

    tilde = TildeCoefficients(
        a=a_inv,
        b=b_hat,
        c=c_tilde,
        r=symmetric_part(p.r + c_tilde @ p.b),
        h=h_upper,
    )
    a_hat_tilde = tilde.a - tilde.b @ scipy.linalg.solve(
        tilde.r, tilde.c, assume_a="her"
    )
    if not _agree(a_hat, a_hat_tilde):
        raise CrossCheckFailedError(
            "Â = A⁻¹ − B̂R̂⁻¹BᴴH^(A) disagrees with Ã − B̃R̃⁻¹C̃",
            details={"difference": spectral_norm(a_hat - a_hat_tilde)},
        )
    h_hat_direct = symmetric_part(a_hat.conj().T @ p.h @ a_inv)
    if not _agree(h_hat, h_hat_direct):
        raise CrossCheckFailedError(
            "Ĥ disagrees with ÂᴴHA⁻¹",
            details={"difference": spectral_norm(h_hat - h_hat_direct)},
        )

    problem = DareProblem(
        a=a_hat,
        b=b_hat,
        r=r_hat,
        h=h_hat,
        name=f"{p.name} (dual, first kind)" if p.name else "dual, first kind",
        kind="dual_first",
    )
    logger.debug("first-kind dual built, cond(A)=%.3e", cond)
    return DualFirstKind(problem=problem, h_upper=h_upper, tilde=tilde)


def feedback_from_tilde(first: DualFirstKind, f_tilde: np.ndarray) -> np.ndarray:
    """
    中间系数形式下的反馈换算为一类对偶问题的反馈

    Â − B̂F = Ã − B̃F̃ 当且仅当 F = F̃ − R̃⁻¹C̃。
    """
    tilde = first.tilde
    correction = checked_solve(tilde.r, tilde.c, SingularInnerMatrixError, "R̃")
    return as_matrix(f_tilde) - correction


def build_second_kind(p: DareProblem) -> DualSecondKind:
    """
    构造二类对偶 DARE：D₂(Y) = AY(I+HY)⁻¹Aᴴ + G

    B 取 H 的特征分解因子（小于 CLIP_EIGEN·max(1,‖H‖) 的特征值截断为 0），
    R 取单位阵，因而对偶问题的 G 等于 H。
    """
    lam, vec = scipy.linalg.eigh(p.h)
    threshold = SolverConfig.CLIP_EIGEN * max(1.0, spectral_norm(p.h))
    lam = np.where(lam > threshold, lam, 0.0)
    factor = vec * np.sqrt(lam)
    problem = DareProblem(
        a=p.a.conj().T,
        b=factor,
        r=np.eye(p.n, dtype=np.complex128),
        h=p.g,
        name=f"{p.name} (dual, second kind)" if p.name else "dual, second kind",
        kind="dual_second",
    )
    return DualSecondKind(problem=problem)


def verify_duality(
    p: DareProblem, x: np.ndarray, require_nonsingular: bool = True
) -> dict[str, float]:
    """
    对偶恒等式残差

    - dual1：Y = −X 时 D₁(Y) − Y = (I+XG)A⁻ᴴ(R(X)−X)(A + GA⁻ᴴ(H−X))⁻¹，对任意 X 成立
    - reciprocity：σ((I+ĜY)⁻¹Â) 与 σ(T_X⁻¹) 的距离，只在解处为零
    - dual2：Y = −X⁻¹ 时 X − R(X) = Aᴴ[(Y−G)⁻¹ − (D₂(Y)−G)⁻¹]A
    - dualcloseloop：σ((I+HY)⁻¹Aᴴ) 与 σ(T_X⁻¹) 的距离，只在解处为零

    矩阵残差按 max(1, ‖X‖, ‖R(X)‖) 归一，谱距离按 max(1, ρ(T_X⁻¹)) 归一。
    X 奇异时，require_nonsingular 为真则抛出 SingularXError，否则省略 dual2
    与 dualcloseloop 两项。

    Raises:
        SingularAError: A 数值奇异
        SingularXError: X 数值奇异且 require_nonsingular 为真
    """
    x = symmetric_part(as_matrix(x))
    first = build_first_kind(p)
    a_inv_h = first.tilde.a.conj().T
    image = riccati_apply(p, x)
    scale = max(1.0, spectral_norm(x), spectral_norm(image))
    residuals: dict[str, float] = {}

    lhs = riccati_apply(first.problem, -x) + x
    j = p.a + p.g @ a_inv_h @ (p.h - x)
    rhs = _right_solve(
        (p.identity + x @ p.g) @ a_inv_h @ (image - x),
        j,
        SingularPencilError,
        "A + GA⁻ᴴ(H−X)",
    )
    residuals["dual1"] = spectral_norm(lhs - rhs) / scale

    t_inv = _inverse(closed_loop(p, x).t, SingularAError, "T_X")
    spectral_scale = max(1.0, spectral_radius(t_inv))
    target = eigenvalues(t_inv)

    dual = first.problem
    dual_loop = checked_solve(
        dual.identity - dual.g @ x, dual.a, SingularPencilError, "I+ĜY"
    )
    residuals["reciprocity"] = (
        spectrum_distance(eigenvalues(dual_loop), target) / spectral_scale
    )

    if not condition_number(x) < SolverConfig.COND_LIMIT:
        if require_nonsingular:
            raise SingularXError(
                "X is numerically singular, Y = −X⁻¹ is undefined",
                details={"cond": condition_number(x)},
            )
        logger.debug("X singular, second-kind checks omitted")
        return residuals

    y = -_inverse(x, SingularXError, "X")
    second = build_second_kind(p).problem
    d2 = riccati_apply(second, y)
    bracket = _inverse(y - p.g, SingularPencilError, "Y−G") - _inverse(
        d2 - p.g, SingularPencilError, "D₂(Y)−G"
    )
    residuals["dual2"] = (
        spectral_norm((x - image) - p.a.conj().T @ bracket @ p.a) / scale
    )

    second_loop = checked_solve(
        p.identity + p.h @ y, p.a.conj().T, SingularPencilError, "I+HY"
    )
    residuals["dualcloseloop"] = (
        spectrum_distance(eigenvalues(second_loop), target) / spectral_scale
    )
    return residuals
