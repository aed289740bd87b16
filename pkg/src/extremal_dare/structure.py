"""
结构性质判定

PBH 秩检验判定可镇定、可检测与反镇定秩条件，Krylov 秩判定可控性。
"""

import logging
from typing import Callable, Optional

import numpy as np

from .afpi import afpi_run
from .common_models import DenseMatrix
from .config import SolverConfig
from .exceptions import (
    DareError,
    FeedbackSearchFailedError,
    NotStabilizableError,
)
from .iteration_models import IterationOptions
from .matrix_kernel import (
    as_matrix,
    condition_number,
    eigenvalues,
    require_square,
    spectral_norm,
    spectrum,
)
from .riccati import closed_loop
from .riccati_models import DareProblem
from .solution_models import StructureReport, Witness, WitnessTest

logger = logging.getLogger(__name__)


def _numerical_rank(m: np.ndarray, rtol: Optional[float] = None) -> int:
    """奇异值阈值 max(rows, cols)·eps·σ_max 下的秩；给出 rtol 时阈值取 rtol·σ_max"""
    if m.size == 0:
        return 0
    sv = np.linalg.svd(m, compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    if rtol is None:
        rtol = max(m.shape) * np.finfo(float).eps
    threshold = rtol * sv[0]
    return int(np.sum(sv > threshold))


def _distinct(eigs: np.ndarray, tol: float = 1e-8) -> list[complex]:
    out: list[complex] = []
    for lam in eigs:
        if all(abs(lam - seen) > tol * max(1.0, abs(seen)) for seen in out):
            out.append(complex(lam))
    return out


def pbh_rank_defect(
    a: np.ndarray, b: np.ndarray, lam: complex, rtol: Optional[float] = None
) -> int:
    """n − rank[A−λI, B]"""
    n = a.shape[0]
    pencil = np.hstack([a - lam * np.eye(n), b])
    return n - _numerical_rank(pencil, rtol)


def _pbh_witnesses(
    a: np.ndarray,
    b: np.ndarray,
    test: WitnessTest,
    include: Callable[[np.ndarray], np.ndarray],
    rtol: Optional[float] = None,
) -> list[Witness]:
    eigs = eigenvalues(a)
    witnesses = []
    for lam in _distinct(eigs[include(np.abs(eigs))]):
        defect = pbh_rank_defect(a, b, lam, rtol)
        if defect > 0:
            witnesses.append(
                Witness(
                    test=test,
                    eigenvalue_re=lam.real,
                    eigenvalue_im=lam.imag,
                    rank_defect=defect,
                )
            )
    return witnesses


def controllability_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """[B, AB, …, A^{n−1}B]"""
    blocks = [b]
    for _ in range(a.shape[0] - 1):
        blocks.append(a @ blocks[-1])
    return np.hstack(blocks)


def analyze(p: DareProblem, c: Optional[DenseMatrix] = None) -> StructureReport:
    """
    结构性质报告

    Args:
        p: DARE 问题
        c: 输出矩阵；缺省时使用 p.c，两者都没有时不判定可检测性

    Returns:
        StructureReport: 各项判定与失败见证
    """
    a, b = p.a, p.b
    n = p.n
    unstable_edge = 1.0 - SolverConfig.BOUNDARY_BAND

    stab = _pbh_witnesses(a, b, "stabilizable", lambda mod: mod >= unstable_edge)

    krylov_rank = _numerical_rank(controllability_matrix(a, b))
    controllable = krylov_rank == n
    ctrb = _pbh_witnesses(a, b, "controllable", lambda mod: mod >= 0.0)
    if controllable == bool(ctrb):
        logger.warning(
            "Krylov rank (%d) and PBH disagree on controllability of %s",
            krylov_rank,
            p.name or "problem",
        )
    if controllable:
        ctrb = []

    antistab = _pbh_witnesses(
        a,
        b,
        "antistab",
        lambda mod: (mod > SolverConfig.BOUNDARY_BAND)
        & (mod <= 1.0 + SolverConfig.BOUNDARY_BAND),
    )

    output = c if c is not None else p.c
    detectable: Optional[bool] = None
    detect: list[Witness] = []
    if output is not None:
        c_mat = as_matrix(output)
        detect = _pbh_witnesses(
            a.conj().T, c_mat.conj().T, "detectable", lambda mod: mod >= unstable_edge
        )
        detectable = not detect

    report = StructureReport(
        stabilizable=not stab,
        detectable=detectable,
        controllable=controllable,
        antistab_rank_ok=not antistab,
        a_nonsingular=condition_number(a) < SolverConfig.COND_LIMIT,
        witnesses=stab + detect + ctrb + antistab,
    )
    logger.debug("structure of %s: %s", p.name or "problem", report)
    return report


def unstable_unobservable_modes(a: np.ndarray, h: np.ndarray) -> list[Witness]:
    """
    Av = λv、Hv = 0 且 |λ| > 1 的模态

    存在这样的模态时最小半正定解的闭环矩阵保留特征值 λ，与最大解不同。
    """
    return _pbh_witnesses(
        as_matrix(a).conj().T,
        as_matrix(h),
        "detectable",
        lambda mod: mod > 1.0 + SolverConfig.BOUNDARY_BAND,
        rtol=SolverConfig.SPECTRAL_TOL,
    )


def is_dstable(m: np.ndarray) -> bool:
    """ρ(m) < 1 − 1e-10"""
    return spectrum(require_square(m)).rho < 1.0 - SolverConfig.BOUNDARY_BAND


def default_stabilizing_feedback(p: DareProblem) -> np.ndarray:
    """
    构造镇定反馈 F，使 A−BF d-稳定

    A 已 d-稳定时直接返回 F = 0；否则在正则化问题 (A, B, R, H+δI) 上从 0 运行
    AFPI(2)，其 H 序列极限是正则化问题的镇定解，取 F 为对应的反馈增益。

    Raises:
        NotStabilizableError: (A,B) 不可镇定
        FeedbackSearchFailedError: 正则化迭代未得到 d-稳定闭环
    """
    report = analyze(p)
    if not report.stabilizable:
        reasons = ", ".join(w.describe() for w in report.witnesses_for("stabilizable"))
        raise NotStabilizableError(f"(A,B) is not stabilizable: {reasons}")

    if is_dstable(p.a):
        return np.zeros((p.m, p.n), dtype=np.complex128)

    delta = max(1e-8, 1e-8 * spectral_norm(p.h))
    regularized = DareProblem(
        a=p.a,
        b=p.b,
        r=p.r,
        h=p.h + delta * p.identity,
        name=f"{p.name} (regularized)",
        kind="dual_first" if p.kind == "dual_first" else "primal",
    )
    zero = np.zeros((p.n, p.n), dtype=np.complex128)
    try:
        run = afpi_run(regularized, zero, 2, IterationOptions(tol=1e-14, max_iter=100))
    except DareError as e:
        raise FeedbackSearchFailedError(
            f"regularized iteration failed: {e}"
        ) from e

    f = closed_loop(p, run.h_limit).f
    if not is_dstable(p.a - p.b @ f):
        raise FeedbackSearchFailedError(
            "regularized solution did not yield ρ(A−BF) < 1 "
            f"(termination {run.termination_h.value})"
        )
    logger.info("default stabilizing feedback found after %d steps", run.iterations_h)
    return f
