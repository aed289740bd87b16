"""
不动点迭代与 Newton 迭代

原问题 FPI X_{k+1} = R(X_k)、两类对偶问题上的 FPI、基于 Stein 方程的初值与
Newton 基线，以及收敛速率估计。
"""

import logging
import math
from typing import Callable, Optional, Sequence

import numpy as np

from .common_models import Direction, RateMode, Termination
from .config import SolverConfig
from .dual import build_first_kind, build_second_kind
from .exceptions import (
    BreakdownError,
    DareError,
    DareIterationError,
    DareNumericalError,
    InsufficientHistoryError,
    MonotonicityViolatedError,
    NotDStableError,
    SteinBreakdownError,
)
from .iteration_models import IterationOptions, IterationReport
from .matrix_kernel import (
    as_matrix,
    freeze,
    is_psd,
    min_eigenvalue,
    solve_stein,
    spectral_norm,
    spectral_radius,
    symmetric_part,
)
from .riccati import closed_loop, closed_loop_matrix, nres, riccati_apply
from .riccati_models import DareProblem
from .structure import analyze, default_stabilizing_feedback, is_dstable

logger = logging.getLogger(__name__)

Step = Callable[[np.ndarray], np.ndarray]
Checkpoint = Callable[[int, np.ndarray], None]


def _loop_radius(p: DareProblem, x: np.ndarray) -> Optional[float]:
    """ρ((I+GX)⁻¹A)"""
    try:
        return spectral_radius(closed_loop_matrix(p, x))
    except DareError:
        return None


def _psd_tol(m: np.ndarray) -> float:
    return SolverConfig.PSD_TOL * max(1.0, spectral_norm(m))


def _infer_direction(
    previous: np.ndarray, current: np.ndarray
) -> Optional[Direction]:
    """由第一步差值的半定性确定单调方向"""
    diff = current - previous
    tol = SolverConfig.MONOTONE_RTOL * max(1.0, spectral_norm(current))
    if is_psd(diff, tol):
        return "nondecreasing"
    if is_psd(-diff, tol):
        return "nonincreasing"
    return None


def _monotone_defect(
    previous: np.ndarray, current: np.ndarray, direction: Direction
) -> float:
    diff = current - previous
    if direction == "nonincreasing":
        diff = -diff
    return min_eigenvalue(diff)


def _monotone_tol(previous: np.ndarray, current: np.ndarray) -> float:
    scale = max(1.0, spectral_norm(previous), spectral_norm(current))
    return SolverConfig.MONOTONE_RTOL * scale


def _run(
    p: DareProblem,
    step: Step,
    x0: np.ndarray,
    opts: IterationOptions,
    method: str,
    direction: Optional[Direction] = None,
    infer_direction: bool = False,
    checkpoint: Optional[Checkpoint] = None,
) -> IterationReport:
    """
    迭代公共循环

    每步后计算 NRes 与 ρ(T)；NRes ≤ tol 时收敛，残差在 stagnation_window 步内
    下降不足时判为停滞。direction 给定或可由第一步推断时逐步检查单调性。
    """
    x = symmetric_part(as_matrix(x0))
    history: list[np.ndarray] = [x]
    nres_history = [nres(p, x).nres]
    rho_history: list[Optional[float]] = [_loop_radius(p, x)]

    def report(termination: Termination, iterations: int) -> IterationReport:
        rate: Optional[float] = None
        if len(nres_history) >= 4:
            try:
                rate = rate_estimate(nres_history, "r_linear")
            except InsufficientHistoryError:
                rate = None
        return IterationReport(
            method=method,
            x=freeze(x),
            history=history if opts.record_history else None,
            nres_history=nres_history,
            rho_t_history=rho_history,
            iterations=iterations,
            termination=termination,
            rate_estimate=rate,
            direction=direction,
            tol=opts.tol,
        )

    if nres_history[0] <= opts.tol:
        logger.info("%s: initial guess already within tol", method)
        return report(Termination.CONVERGED, 0)

    window = opts.stagnation_window
    for k in range(1, opts.max_iter + 1):
        try:
            x_new = step(x)
            if checkpoint is not None:
                checkpoint(k, x_new)
        except DareIterationError as e:
            termination = (
                Termination.MONOTONICITY_VIOLATED
                if isinstance(e, MonotonicityViolatedError)
                else Termination.BREAKDOWN
            )
            raise type(e)(str(e), report=report(termination, k - 1)) from e
        except DareNumericalError as e:
            raise BreakdownError(
                f"{method} broke down at k={k}: {e}",
                report=report(Termination.BREAKDOWN, k - 1),
            ) from e

        if direction is None and infer_direction and k == 1:
            direction = _infer_direction(x, x_new)
            logger.debug("%s: inferred %s sequence", method, direction)
        if direction is not None and opts.monotonicity_check:
            defect = _monotone_defect(x, x_new, direction)
            if defect < -_monotone_tol(x, x_new):
                raise MonotonicityViolatedError(
                    f"{method}: {direction} order violated at k={k} "
                    f"(min eig {defect:.3e})",
                    report=report(Termination.MONOTONICITY_VIOLATED, k - 1),
                )

        x = x_new
        history.append(x)
        try:
            value = nres(p, x).nres
        except DareNumericalError as e:
            raise BreakdownError(
                f"{method}: residual undefined at k={k}: {e}",
                report=report(Termination.BREAKDOWN, k - 1),
            ) from e
        nres_history.append(value)
        rho_history.append(_loop_radius(p, x))
        logger.debug("%s k=%d nres=%.3e", method, k, value)

        if value <= opts.tol:
            logger.info("%s converged after %d steps", method, k)
            return report(Termination.CONVERGED, k)
        if (
            len(nres_history) > window
            and value > opts.stagnation_ratio * nres_history[-1 - window]
        ):
            logger.info("%s stagnated at k=%d (nres %.3e)", method, k, value)
            return report(Termination.STAGNATED, k)

    logger.info("%s reached max_iter=%d", method, opts.max_iter)
    return report(Termination.MAX_ITER, opts.max_iter)


def _fpi_direction(p: DareProblem, x0: np.ndarray) -> Optional[Direction]:
    """0 ⪯ X₀ ⪯ H 时序列单调不减"""
    tol = _psd_tol(x0)
    if is_psd(x0, tol) and is_psd(p.h - x0, tol):
        return "nondecreasing"
    return None


def _fpi(
    p: DareProblem,
    x0: np.ndarray,
    opts: Optional[IterationOptions],
    method: str,
    direction: Optional[Direction] = None,
    checkpoint: Optional[Checkpoint] = None,
) -> IterationReport:
    opts = opts or IterationOptions()
    x0 = symmetric_part(as_matrix(x0))
    if direction is None:
        direction = _fpi_direction(p, x0)
    return _run(
        p,
        lambda x: riccati_apply(p, x),
        x0,
        opts,
        method,
        direction=direction,
        infer_direction=direction is None and is_psd(x0, _psd_tol(x0)),
        checkpoint=checkpoint,
    )


def fpi_run(
    p: DareProblem,
    x0: np.ndarray,
    opts: Optional[IterationOptions] = None,
    direction: Optional[Direction] = None,
) -> IterationReport:
    """
    不动点迭代 X_{k+1} = R(X_k)

    0 ⪯ X₀ ⪯ H 时序列单调不减；从镇定反馈的 Stein 初值出发单调不增，此时
    调用方应传入 direction="nonincreasing"。未给出方向且 X₀ ⪰ 0 时由第一步
    差值的半定性推断。

    Args:
        p: DARE 问题
        x0: 初值，需在 R 的定义域内
        opts: 迭代选项
        direction: 预期的单调方向，给出时从第一步起检查

    Returns:
        IterationReport: 迭代报告

    Raises:
        BreakdownError: 迭代中 I+GX 奇异
        MonotonicityViolatedError: 单调性被破坏
    """
    return _fpi(p, x0, opts, "fpi", direction=direction)


def fpi_dual1_run(
    p: DareProblem,
    y0: np.ndarray,
    opts: Optional[IterationOptions] = None,
    direction: Optional[Direction] = None,
) -> IterationReport:
    """
    一类对偶问题上的 FPI Y_{k+1} = D₁(Y_k)

    从 0 ⪯ Y₀ ⪯ Ĥ 出发单调增加到 −X₋,M；从镇定反馈的 Stein 初值出发单调
    减少到 −X₋,m。报告中的矩阵是 Y，调用方取负号。
    """
    dual = build_first_kind(p).problem
    return _fpi(dual, y0, opts, "fpi_dual1", direction=direction)


def fpi_dual2_run(
    p: DareProblem, z0: np.ndarray, opts: Optional[IterationOptions] = None
) -> IterationReport:
    """
    二类对偶问题上的 FPI Z_{k+1} = D₂(Z_k)

    (A,B) 可控且 Z₀ ⪰ 0 时检查 Z_n > 0。
    """
    dual = build_second_kind(p).problem
    z0 = symmetric_part(as_matrix(z0))
    checkpoint: Optional[Checkpoint] = None
    if is_psd(z0, _psd_tol(z0)) and analyze(p).controllable:

        def checkpoint(k: int, z: np.ndarray) -> None:
            if k != p.n:
                return
            lowest = min_eigenvalue(z)
            if not lowest > -SolverConfig.MONOTONE_RTOL * spectral_norm(z):
                raise MonotonicityViolatedError(
                    f"Z_{k} is not positive definite (min eig {lowest:.3e}) "
                    "although (A,B) is controllable"
                )

    return _fpi(dual, z0, opts, "fpi_dual2", checkpoint=checkpoint)


def stein_initial(p: DareProblem, f: np.ndarray) -> np.ndarray:
    """
    Stein 初值：X − A_FᴴXA_F = H + FᴴRF，A_F = A − BF

    Raises:
        NotDStableError: A_F 不是 d-稳定的
        SingularSteinOperatorError: Stein 算子奇异
    """
    f = as_matrix(f)
    a_f = p.a - p.b @ f
    if not is_dstable(a_f):
        raise NotDStableError(
            f"A−BF is not d-stable (ρ={spectral_radius(a_f):.6g})",
            details={"rho": spectral_radius(a_f)},
        )
    x = solve_stein(a_f, p.h + f.conj().T @ p.r @ f)
    if not is_psd(x, _psd_tol(x)):
        logger.warning(
            "Stein initial guess is not PSD (min eig %.3e)", min_eigenvalue(x)
        )
    return x


def _newton_update(
    p: DareProblem, x: np.ndarray, require_dstable: bool
) -> np.ndarray:
    try:
        loop = closed_loop(p, x)
    except DareNumericalError as e:
        raise SteinBreakdownError(f"closed loop undefined: {e}") from e
    if require_dstable and not is_dstable(loop.t):
        raise SteinBreakdownError(
            f"closed loop is not d-stable (ρ={spectral_radius(loop.t):.6g})"
        )
    try:
        return solve_stein(loop.t, p.h + loop.f.conj().T @ p.r @ loop.f)
    except DareNumericalError as e:
        raise SteinBreakdownError(f"Stein solve failed: {e}") from e


def newton_step(p: DareProblem, x: np.ndarray) -> np.ndarray:
    """
    一步 Newton：求解 S_{T_X}(X₊) = H + F_XᴴRF_X

    Raises:
        SteinBreakdownError: 闭环不是 d-稳定的或 Stein 方程不可解
    """
    return _newton_update(p, x, require_dstable=True)


def newton_run(
    p: DareProblem,
    x0: Optional[np.ndarray] = None,
    opts: Optional[IterationOptions] = None,
    direction: Optional[Direction] = None,
) -> IterationReport:
    """
    Newton 迭代，每步一次 Stein 求解

    x0 缺省时取 stein_initial(p, default_stabilizing_feedback(p))，序列单调
    不增。给出 x0 而未给出 direction 时由第一步推断方向。

    Raises:
        SteinBreakdownError: 某步闭环失去 d-稳定性
    """
    opts = opts or IterationOptions()
    if x0 is None:
        x0 = stein_initial(p, default_stabilizing_feedback(p))
        direction = direction or "nonincreasing"
    return _run(
        p,
        lambda x: newton_step(p, x),
        x0,
        opts,
        "newton",
        direction=direction,
        infer_direction=direction is None,
    )


def newton_refine(
    p: DareProblem,
    x: np.ndarray,
    tol: float,
    steps: int = SolverConfig.REFINE_STEPS,
) -> np.ndarray:
    """
    对已接近某个解的 X 做至多 steps 步 Newton 校正

    不要求 T_X d-稳定，只要 Stein 算子 S_{T_X} 非奇异，因此也适用于非镇定的
    极值解。NRes 不再下降、相对步长超过 REFINE_RTOL 或 Stein 方程不可解时
    停止，返回残差最小的矩阵。

    Args:
        p: DARE 问题
        x: 近似解
        tol: NRes 达到 tol 后不再校正
        steps: 最多步数

    Returns:
        np.ndarray: 校正后的 Hermite 矩阵
    """
    x = symmetric_part(as_matrix(x))
    try:
        best = nres(p, x).nres
    except DareError:
        return x
    for k in range(1, steps + 1):
        if best <= tol:
            break
        try:
            candidate = symmetric_part(_newton_update(p, x, require_dstable=False))
            value = nres(p, candidate).nres
        except DareError as e:
            logger.debug("refinement stopped at step %d: %s", k, e)
            break
        step = spectral_norm(candidate - x) / max(1.0, spectral_norm(x))
        if value >= best or step > SolverConfig.REFINE_RTOL:
            logger.debug(
                "refinement step %d rejected (nres %.3e, step %.3e)", k, value, step
            )
            break
        logger.debug("refinement step %d: nres %.3e -> %.3e", k, best, value)
        x, best = candidate, value
    return x


def rate_estimate(
    history: Sequence[float], mode: RateMode, r: Optional[int] = None
) -> float:
    """
    收敛速率估计

    r_linear：历史后半段相邻误差比的几何平均；
    r_superlinear：最后 3 个点上 err_k^(1/r^(k+1)) 的最大值，k 为历史下标。

    Args:
        history: 误差或残差序列
        mode: 估计方式
        r: r_superlinear 的加速因子

    Raises:
        InsufficientHistoryError: 正项少于 4 个
    """
    indexed = [(i, float(v)) for i, v in enumerate(history) if v > 0]
    if len(indexed) < 4:
        raise InsufficientHistoryError(
            f"need at least 4 positive entries, got {len(indexed)}"
        )

    if mode == "r_linear":
        tail = indexed[len(indexed) // 2 :]
        (i0, first), (i1, last) = tail[0], tail[-1]
        return (last / first) ** (1.0 / (i1 - i0))

    if r is None or r < 2:
        raise ValueError("r_superlinear needs r ≥ 2")
    log_r = math.log(r)
    return max(
        value ** math.exp(-(i + 1) * log_r) for i, value in indexed[-3:]
    )
