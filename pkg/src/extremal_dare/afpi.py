"""
加速不动点迭代 AFPI(r)

三元组 (A_k, G_k, H_k) 上的二元算子 F、其 r 重复合 F_r，以及半群性质与
离散流性质的数值验证。r = 2 时递推与 SDA 完全一致。
"""

import logging
import math
from typing import Optional

import numpy as np

from .common_models import Termination
from .config import SolverConfig
from .dual import build_second_kind
from .exceptions import BreakdownError, DareError, SingularDeltaError
from .iteration_models import AfpiReport, AfpiStep, IterationOptions, TripleState
from .matrix_kernel import (
    as_matrix,
    checked_solve,
    freeze,
    hermitianize_iterate,
    spectral_norm,
    spectrum,
    symmetric_part,
)
from .random_problems import random_triple
from .riccati import closed_loop_matrix, nres, riccati_apply
from .riccati_models import DareProblem

logger = logging.getLogger(__name__)


def initial_triple(p: DareProblem) -> TripleState:
    """X₀ = (A, G, H)"""
    return TripleState(a_k=p.a, g_k=p.g, h_k=p.h)


def binary_f(xk: TripleState, x0: TripleState) -> TripleState:
    """
    二元算子 F(X_k, X_0)

    返回 (A₀ΔA_k, G₀ + A₀ΔG_kA₀ᴴ, H_k + A_kᴴH₀ΔA_k)，其中 Δ = (I + G_kH₀)⁻¹。

    Raises:
        SingularDeltaError: I + G_kH₀ 数值奇异
        BreakdownError: 结果出现 Inf/NaN
    """
    a_k, g_k, h_k = xk.as_tuple()
    a_0, g_0, h_0 = x0.as_tuple()
    n = a_k.shape[0]
    delta_lhs = np.eye(n, dtype=np.complex128) + g_k @ h_0
    solved = checked_solve(
        delta_lhs,
        np.hstack([a_k, g_k]),
        SingularDeltaError,
        "I+G_kH_0",
        limit=SolverConfig.COND_LIMIT,
    )
    delta_a, delta_g = solved[:, :n], solved[:, n:]

    a_new = a_0 @ delta_a
    g_new = g_0 + a_0 @ delta_g @ a_0.conj().T
    h_new = h_k + a_k.conj().T @ h_0 @ delta_a
    if not (
        np.all(np.isfinite(a_new))
        and np.all(np.isfinite(g_new))
        and np.all(np.isfinite(h_new))
    ):
        raise BreakdownError("binary operator produced non-finite entries")
    return TripleState(
        a_k=a_new,
        g_k=hermitianize_iterate(g_new),
        h_k=hermitianize_iterate(h_new),
    )


def compose_fr(x: TripleState, r: int) -> TripleState:
    """
    F_r(X)：F_2(X) = F(X, X)，F_{ℓ+1}(X) = F(X, F_ℓ(X))

    Raises:
        SingularDeltaError: 第 ℓ 次内层复合失败，index 为 ℓ
    """
    if r < 2:
        raise ValueError(f"r must be at least 2, got {r}")
    current = x
    for ell in range(1, r):
        try:
            current = binary_f(x, current)
        except SingularDeltaError as e:
            raise SingularDeltaError(str(e), index=ell, details=e.details) from e
    return current


def xhat_update(state: TripleState, xhat0: np.ndarray) -> np.ndarray:
    """X̂ = A_kᴴX̂₀(I + G_kX̂₀)⁻¹A_k + H_k，始终使用固定的 X̂₀"""
    a_k, g_k, h_k = state.as_tuple()
    n = a_k.shape[0]
    resolvent = checked_solve(
        np.eye(n, dtype=np.complex128) + g_k @ xhat0,
        a_k,
        BreakdownError,
        "I+G_kX̂_0",
        limit=None,
    )
    return symmetric_part(a_k.conj().T @ xhat0 @ resolvent + h_k)


def _spectral_pair(
    p: DareProblem, x: np.ndarray
) -> tuple[Optional[float], Optional[float]]:
    try:
        spec = spectrum(closed_loop_matrix(p, x))
    except DareError:
        return None, None
    return spec.rho, spec.mu


def _safe_nres(p: DareProblem, x: np.ndarray) -> Optional[float]:
    try:
        return nres(p, x).nres
    except DareError:
        return None


class _SequenceTracker:
    """单个序列的停止判定，并记录 NRes 最小的迭代值"""

    def __init__(self, name: str, initial: np.ndarray):
        self.name = name
        self.current = initial
        self.best: Optional[np.ndarray] = None
        self.best_nres = math.inf
        self.best_k = 0
        self.iterations = 0
        self.termination = Termination.RUNNING

    @property
    def running(self) -> bool:
        return self.termination == Termination.RUNNING

    def update(self, k: int, x: np.ndarray, value: Optional[float], tol: float):
        self.current = x
        self.iterations = k
        if value is None:
            return
        if value < self.best_nres:
            self.best, self.best_nres, self.best_k = x, value, k
        if value <= tol:
            self.termination = Termination.CONVERGED
        elif (
            self.best_nres <= SolverConfig.DIVERGENCE_NRES
            and value > SolverConfig.DIVERGENCE_RATIO * self.best_nres
        ):
            # 舍入误差放大后残差回升
            logger.warning(
                "%s sequence residual rose to %.3e at k=%d; keeping k=%d (%.3e)",
                self.name,
                value,
                k,
                self.best_k,
                self.best_nres,
            )
            self.termination = Termination.STAGNATED

    def limit(self) -> np.ndarray:
        return self.current if self.best is None else self.best


def afpi_run(
    p: DareProblem,
    xhat0: np.ndarray,
    r: int,
    opts: Optional[IterationOptions] = None,
    track_g: bool = False,
    primal: Optional[DareProblem] = None,
) -> AfpiReport:
    """
    AFPI(r)

    三元组按 X_{k+1} = F_r(X_k) 从 (A, G, H) 递推；每个外层步用固定的 X̂₀
    生成 X̂_{k+1}。X̂ 与 H 序列各自在 NRes ≤ tol 时停止，停止后冻结。
    已达到 NRes ≤ DIVERGENCE_NRES 的序列若残差再回升 DIVERGENCE_RATIO 倍，
    按 STAGNATED 停止。未收敛的序列报告 NRes 最小的迭代值作为极限。
    track_g 时 G 序列按二类对偶问题的 NRes 作为第三个序列跟踪。

    Args:
        p: DARE 问题
        xhat0: X̂ 序列的初值
        r: 加速因子，r ≥ 2
        opts: 迭代选项
        track_g: 是否跟踪 G 序列
        primal: p 为一类对偶问题时传入原问题；NRes 与谱诊断改在原问题上
            按 −Y 计算

    Returns:
        AfpiReport: 各序列极限、逐步诊断和终止原因

    Raises:
        SingularDeltaError: 尚无序列收敛时 Δ 奇异
        BreakdownError: 尚无序列收敛时出现 Inf/NaN
    """
    if r < 2:
        raise ValueError(f"r must be at least 2, got {r}")
    opts = opts or IterationOptions()
    xhat0 = symmetric_part(as_matrix(xhat0))
    dual2 = build_second_kind(p).problem if track_g else None
    measured, sign = (p, 1.0) if primal is None else (primal, -1.0)

    state = initial_triple(p)
    xhat_seq = _SequenceTracker("X̂", xhat0)
    h_seq = _SequenceTracker("H", state.h_k)
    g_seq = state.g_k
    g_term = Termination.RUNNING if track_g else None
    g_count = 0
    steps: list[AfpiStep] = []
    xhat_hist: list[np.ndarray] = [xhat0]
    h_hist: list[np.ndarray] = [state.h_k]
    g_nres: list[float] = []

    def any_running() -> bool:
        return xhat_seq.running or h_seq.running or g_term == Termination.RUNNING

    def any_converged() -> bool:
        return Termination.CONVERGED in (
            xhat_seq.termination,
            h_seq.termination,
            g_term,
        )

    for k in range(1, opts.max_iter + 1):
        try:
            state = compose_fr(state, r)
        except (SingularDeltaError, BreakdownError) as e:
            if not any_converged():
                raise
            logger.warning("AFPI(%d) stopped at k=%d: %s", r, k, e)
            for seq in (xhat_seq, h_seq):
                if seq.running:
                    seq.termination = Termination.BREAKDOWN
            if g_term == Termination.RUNNING:
                g_term = Termination.BREAKDOWN
            break

        step: dict[str, Optional[float]] = {"norm_a": spectral_norm(state.a_k)}

        if xhat_seq.running:
            try:
                xhat = xhat_update(state, xhat0)
            except BreakdownError as e:
                logger.warning("X̂ update broke down at k=%d: %s", k, e)
                xhat_seq.termination = Termination.BREAKDOWN
            else:
                value = _safe_nres(measured, sign * xhat)
                step["nres_xhat"] = value
                step["rho_t_xhat"], step["mu_t_xhat"] = _spectral_pair(
                    measured, sign * xhat
                )
                step["norm_xhat"] = spectral_norm(xhat)
                xhat_hist.append(xhat)
                xhat_seq.update(k, xhat, value, opts.tol)

        if h_seq.running:
            h_k = state.h_k
            value = _safe_nres(measured, sign * h_k)
            step["nres_h"] = value
            step["rho_t_h"], step["mu_t_h"] = _spectral_pair(measured, sign * h_k)
            step["norm_h"] = spectral_norm(h_k)
            h_hist.append(h_k)
            h_seq.update(k, h_k, value, opts.tol)

        if dual2 is not None and g_term == Termination.RUNNING:
            g_seq = state.g_k
            g_count = k
            value = _safe_nres(dual2, g_seq)
            step["nres_g"] = value
            if value is not None:
                g_nres.append(value)
                window = opts.stagnation_window
                if value <= opts.tol:
                    g_term = Termination.CONVERGED
                elif (
                    len(g_nres) > window
                    and value > opts.stagnation_ratio * g_nres[-1 - window]
                ):
                    g_term = Termination.STAGNATED

        steps.append(AfpiStep(k=k, **step))
        logger.debug(
            "AFPI(%d) k=%d nres_xhat=%s nres_h=%s ‖A_k‖=%.3e",
            r,
            k,
            step.get("nres_xhat"),
            step.get("nres_h"),
            step["norm_a"],
        )
        if not any_running():
            break

    for seq in (xhat_seq, h_seq):
        if seq.running:
            seq.termination = Termination.MAX_ITER
    if g_term == Termination.RUNNING:
        g_term = Termination.MAX_ITER

    report = AfpiReport(
        r=r,
        xhat_limit=freeze(xhat_seq.limit()),
        h_limit=freeze(h_seq.limit()),
        g_limit=freeze(g_seq),
        steps=steps,
        iterations_xhat=xhat_seq.iterations,
        iterations_h=h_seq.iterations,
        iterations_g=g_count,
        termination_xhat=xhat_seq.termination,
        termination_h=h_seq.termination,
        termination_g=g_term,
        xhat_history=xhat_hist if opts.record_history else None,
        h_history=h_hist if opts.record_history else None,
        tol=opts.tol,
        negated=primal is not None,
    )
    logger.info(
        "AFPI(%d) on %s: X̂ %s after %d, H %s after %d",
        r,
        p.name or "problem",
        report.termination_xhat.value,
        report.iterations_xhat,
        report.termination_h.value,
        report.iterations_h,
    )
    return report


# ====================== 性质验证 ======================
def _triple_distance(left: TripleState, right: TripleState) -> float:
    return max(
        spectral_norm(left.a_k - right.a_k),
        spectral_norm(left.g_k - right.g_k),
        spectral_norm(left.h_k - right.h_k),
    )


def associativity_residual(y: TripleState, z: TripleState, w: TripleState) -> float:
    """‖F(F(Y,Z),W) − F(Y,F(Z,W))‖"""
    return _triple_distance(
        binary_f(binary_f(y, z), w), binary_f(y, binary_f(z, w))
    )


def verify_semigroup(samples: int, seed: Optional[int] = None, n: int = 4) -> float:
    """
    随机三元组上半群结合律的最大残差

    Args:
        samples: 样本数
        seed: 随机种子；缺省时取 DARE_SEED
        n: 矩阵阶数

    Returns:
        float: 两种结合顺序的最大差
    """
    if seed is None:
        seed = SolverConfig().seed
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        for attempt in range(SolverConfig.SEMIGROUP_RESAMPLES):
            y, z, w = (random_triple(rng, n) for _ in range(3))
            try:
                worst = max(worst, associativity_residual(y, z, w))
                break
            except SingularDeltaError:
                if attempt == SolverConfig.SEMIGROUP_RESAMPLES - 1:
                    raise
                logger.debug("resampling singular triple (attempt %d)", attempt + 1)
    return worst


def verify_flow(p: DareProblem, xhat0: np.ndarray, r: int, k_max: int) -> float:
    """
    离散流性质：X̂_k 与 FPI 第 r^k 步一致，H_k 与从 0 出发的 FPI 第 r^k 步一致

    用朴素 FPI 作为暴力参照，返回按 max(1,‖·‖) 归一的最大差。
    """
    if k_max == 0:
        return 0.0
    budget = r**k_max
    if budget > SolverConfig.FLOW_ORACLE_BUDGET:
        raise ValueError(
            f"r^k_max = {budget} exceeds the oracle budget "
            f"{SolverConfig.FLOW_ORACLE_BUDGET}"
        )
    xhat0 = symmetric_part(as_matrix(xhat0))
    from_xhat = [xhat0]
    from_zero = [np.zeros_like(xhat0)]
    for _ in range(budget):
        from_xhat.append(riccati_apply(p, from_xhat[-1]))
        from_zero.append(riccati_apply(p, from_zero[-1]))

    worst = 0.0
    state = initial_triple(p)
    for k in range(1, k_max + 1):
        state = compose_fr(state, r)
        index = r**k
        oracle_x = from_xhat[index]
        oracle_h = from_zero[index]
        worst = max(
            worst,
            spectral_norm(xhat_update(state, xhat0) - oracle_x)
            / max(1.0, spectral_norm(oracle_x)),
            spectral_norm(state.h_k - oracle_h) / max(1.0, spectral_norm(oracle_h)),
        )
    return worst
