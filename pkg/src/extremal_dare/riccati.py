"""
Riccati 算子层公式

R(X)、F_X、T_X、Stein 形式恒等式、K 项以及归一化残差。
"""

import logging

import numpy as np

from .common_models import HermitianMatrix
from .config import SolverConfig
from .exceptions import SingularInnerMatrixError, SingularPencilError
from .matrix_kernel import (
    as_matrix,
    checked_solve,
    condition_number,
    hermitianize_iterate,
    spectral_norm,
    stein_apply,
    symmetric_part,
)
from .riccati_models import ClosedLoop, DareProblem, ResidualValue

logger = logging.getLogger(__name__)

__all__ = [
    "riccati_apply",
    "riccati_apply_gain_form",
    "closed_loop",
    "closed_loop_matrix",
    "stein_apply",
    "k_term",
    "identity_residuals",
    "nres",
    "inner_matrix",
    "in_domain",
    "solution_difference_residual",
]


def _pencil(p: DareProblem, x: np.ndarray) -> np.ndarray:
    return p.identity + p.g @ x


def in_domain(p: DareProblem, x: HermitianMatrix) -> bool:
    """I+GX 的条件数低于阈值时视为 X ∈ dom(R)"""
    return condition_number(_pencil(p, as_matrix(x))) < SolverConfig.COND_LIMIT


def riccati_apply(p: DareProblem, x: HermitianMatrix) -> np.ndarray:
    """
    R(X) = AᴴX(I+GX)⁻¹A + H

    Raises:
        SingularPencilError: I+GX 数值奇异
    """
    x = as_matrix(x)
    resolvent = checked_solve(_pencil(p, x), p.a, SingularPencilError, "I+GX")
    return hermitianize_iterate(p.h + p.a.conj().T @ x @ resolvent)


def riccati_apply_gain_form(p: DareProblem, x: HermitianMatrix) -> np.ndarray:
    """R(X) = H + AᴴXA − AᴴXB(R+BᴴXB)⁻¹BᴴXA"""
    x = as_matrix(x)
    bhxa = p.b.conj().T @ x @ p.a
    correction = bhxa.conj().T @ checked_solve(
        inner_matrix(p, x), bhxa, SingularInnerMatrixError, "R+BᴴXB"
    )
    return symmetric_part(p.h + p.a.conj().T @ x @ p.a - correction)


def inner_matrix(p: DareProblem, x: HermitianMatrix) -> np.ndarray:
    """R + BᴴXB"""
    x = as_matrix(x)
    return symmetric_part(p.r + p.b.conj().T @ x @ p.b)


def closed_loop(p: DareProblem, x: HermitianMatrix) -> ClosedLoop:
    """
    F_X = (R+BᴴXB)⁻¹BᴴXA 与 T_X = A − BF_X

    Raises:
        SingularInnerMatrixError: R+BᴴXB 数值奇异
    """
    x = as_matrix(x)
    f = checked_solve(
        inner_matrix(p, x),
        p.b.conj().T @ x @ p.a,
        SingularInnerMatrixError,
        "R+BᴴXB",
    )
    return ClosedLoop(f=f, t=p.a - p.b @ f)


def closed_loop_matrix(p: DareProblem, x: HermitianMatrix) -> np.ndarray:
    """T_X 的预解式形式 (I+GX)⁻¹A，与 A − BF_X 相等"""
    x = as_matrix(x)
    return checked_solve(_pencil(p, x), p.a, SingularPencilError, "I+GX")


def k_term(p: DareProblem, f: np.ndarray, x: HermitianMatrix) -> np.ndarray:
    """K_F(X) = (F−F_X)ᴴ(R+BᴴXB)(F−F_X)"""
    x = as_matrix(x)
    diff = as_matrix(f) - closed_loop(p, x).f
    return symmetric_part(diff.conj().T @ inner_matrix(p, x) @ diff)


def nres(p: DareProblem, z: HermitianMatrix) -> ResidualValue:
    """
    NRes(Z) = ‖Z − R(Z)‖ / (‖Z‖ + ‖AᴴZ(I+GZ)⁻¹A‖ + ‖H‖)

    分母为零（Z = 0 且 H = 0）时 NRes 取 0。
    """
    z = as_matrix(z)
    image = riccati_apply(p, z)
    quadratic = image - p.h
    raw = spectral_norm(z - image)
    denominator = spectral_norm(z) + spectral_norm(quadratic) + spectral_norm(p.h)
    if denominator == 0.0:
        return ResidualValue(nres=0.0, raw=raw)
    return ResidualValue(nres=raw / denominator, raw=raw)


def identity_residuals(
    p: DareProblem,
    f: np.ndarray,
    xhat: HermitianMatrix,
    x: HermitianMatrix,
) -> dict[str, float]:
    """
    Stein 形式恒等式两侧之差的范数

    每个恒等式两侧独立计算：左侧用 R 的预解式形式，右侧用反馈增益与 K 项。
    K1–K3 取对任意 Hermite X 成立的形式，在解集上退化为不含残差项的版本。

    Returns:
        dict[str, float]: 键为 Req-a, Req-b, Req-c, K1, K2, K3
    """
    f = as_matrix(f)
    xhat = as_matrix(xhat)
    x = as_matrix(x)
    h = p.h
    gap = x - riccati_apply(p, x)

    a_f = p.a - p.b @ f
    h_f = h + f.conj().T @ p.r @ f
    req_a = stein_apply(a_f, x) - h_f + k_term(p, f, x)

    loop_hat = closed_loop(p, xhat)
    t_hat, f_hat = loop_hat.t, loop_hat.f
    h_hat = h + f_hat.conj().T @ p.r @ f_hat
    k_hat_x = k_term(p, f_hat, x)
    k_hat_0 = k_term(p, f_hat, np.zeros_like(x))
    req_b = stein_apply(t_hat, x) - h_hat + k_hat_x

    u_hat = xhat @ t_hat
    u = x @ closed_loop(p, x).t
    h_hat_u = h + u_hat.conj().T @ p.g @ u_hat
    du = u_hat - u
    req_c = (
        stein_apply(t_hat, x)
        - h_hat_u
        + du.conj().T @ (p.g + p.g @ x @ p.g) @ du
    )

    k1 = stein_apply(t_hat, x) - h + k_hat_x - k_hat_0

    k2_lhs = stein_apply(t_hat, xhat)
    k2_rhs = xhat - riccati_apply(p, xhat) + h + k_hat_0

    loop_x = closed_loop(p, x)
    k3_lhs = stein_apply(loop_x.t, x)
    k3_rhs = gap + h + k_term(p, loop_x.f, np.zeros_like(x))

    return {
        "Req-a": spectral_norm(gap - req_a),
        "Req-b": spectral_norm(gap - req_b),
        "Req-c": spectral_norm(gap - req_c),
        "K1": spectral_norm(gap - k1),
        "K2": spectral_norm(k2_lhs - k2_rhs),
        "K3": spectral_norm(k3_lhs - k3_rhs),
    }


def solution_difference_residual(
    p: DareProblem, xhat: HermitianMatrix, x: HermitianMatrix
) -> float:
    """两个解之差满足 S_{T_X̂}(X̂−X) = K(X̂,X)，返回该式残差"""
    xhat = as_matrix(xhat)
    x = as_matrix(x)
    loop_hat = closed_loop(p, xhat)
    lhs = stein_apply(loop_hat.t, xhat - x)
    rhs = k_term(p, loop_hat.f, x)
    return spectral_norm(lhs - rhs)
