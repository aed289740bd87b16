"""
验收套件

内置示例上的精确性检查与随机实例上的性质检查，由 `verify --suite paper` 调用。
"""

import logging
from typing import Callable, Optional

import numpy as np
from pydantic import Field

from .afpi import afpi_run, verify_flow, verify_semigroup
from .builtin_examples import builtin_example
from .common_models import FrozenModel
from .config import SolverConfig
from .driver import ExtremalSolver
from .dual import verify_duality
from .exceptions import DareError, DareIterationError
from .iteration import fpi_run, newton_run, stein_initial
from .iteration_models import AfpiReport, IterationOptions
from .matrix_kernel import min_eigenvalue, relative_error, spectral_norm
from .random_problems import random_complex, random_psd, random_stabilizable_problem
from .riccati import identity_residuals, inner_matrix, nres
from .structure import default_stabilizing_feedback

logger = logging.getLogger(__name__)

Criterion = Callable[[np.random.Generator], "CriterionResult"]

FLOW_PAIRS = {
    "ex1": ((2, 3), (3, 2), (2, 5), (4, 3), (8, 2)),
    "ex4": ((2, 6), (4, 4), (8, 3), (16, 3)),
}
EX3_ITERATIONS = {2: 50, 4: 25, 8: 17, 100: 8}


class CriterionResult(FrozenModel):
    """单项验收结果"""

    name: str = Field(..., description="验收项名称")
    passed: bool = Field(..., description="是否通过")
    detail: str = Field("", description="说明")


def _result(name: str, failures: list[str], detail: str) -> CriterionResult:
    if failures:
        return CriterionResult(name=name, passed=False, detail="; ".join(failures))
    return CriterionResult(name=name, passed=True, detail=detail)


# ====================== 内置示例 ======================
def criterion_ex1_exactness(rng: np.random.Generator) -> CriterionResult:
    p, expected = builtin_example("ex1")
    xhat0 = stein_initial(p, expected.feedback)
    run = afpi_run(p, xhat0, 2, IterationOptions(tol=expected.tol))
    err_x = relative_error(run.xhat_limit, expected.solutions["x_pM"])
    err_h = relative_error(run.h_limit, expected.solutions["x_pm"])
    final = run.nres_xhat_history()[-1]
    failures = []
    if err_x > 1e-12:
        failures.append(f"X̂ relative error {err_x:.2e}")
    if err_h > 1e-12:
        failures.append(f"H relative error {err_h:.2e}")
    if final > 1e-15 or run.iterations_xhat > 6:
        failures.append(f"X̂ NRes {final:.2e} after {run.iterations_xhat} steps")
    return _result(
        "ex1 exactness",
        failures,
        f"X̂ err {err_x:.1e}, H err {err_h:.1e}, k={run.iterations_xhat}",
    )


def criterion_ex1_diagnostics(rng: np.random.Generator) -> CriterionResult:
    p, expected = builtin_example("ex1")
    xhat0 = stein_initial(p, expected.feedback)
    run = afpi_run(p, xhat0, 2, IterationOptions(tol=expected.tol))
    failures = []
    for step in run.steps:
        if step.rho_t_xhat is not None and abs(step.rho_t_xhat - 0.5) > 1e-10:
            failures.append(f"k={step.k}: ρ(T_X̂)={step.rho_t_xhat:.12g}")
        if step.rho_t_h is not None and abs(step.rho_t_h - 3.0) > 1e-8:
            failures.append(f"k={step.k}: ρ(T_H)={step.rho_t_h:.12g}")
    return _result("ex1 diagnostics", failures, f"{len(run.steps)} steps checked")


def criterion_ex2(rng: np.random.Generator) -> CriterionResult:
    p, expected = builtin_example("ex2")
    xhat0 = stein_initial(p, expected.feedback)
    run = afpi_run(p, xhat0, 2, IterationOptions(tol=expected.tol))
    err_h = relative_error(run.h_limit, expected.solutions["x_pm"])
    final = nres(p, run.xhat_limit).nres
    failures = []
    if err_h > 1e-10:
        failures.append(f"H relative error {err_h:.2e}")
    if final > 1e-14 or run.iterations_xhat > 5:
        failures.append(f"X̂ NRes {final:.2e} after {run.iterations_xhat} steps")
    return _result("ex2", failures, f"H err {err_h:.1e}, X̂ NRes {final:.1e}")


def criterion_ex3_counts(rng: np.random.Generator) -> CriterionResult:
    p, expected = builtin_example("ex3", eps=0.0)
    xhat0 = stein_initial(p, expected.feedback)
    opts = IterationOptions(tol=expected.tol)
    counts = {}
    failures = []
    for r, reference in EX3_ITERATIONS.items():
        run = afpi_run(p, xhat0, r, opts)
        counts[r] = run.iterations_xhat
        if not run.xhat_converged or spectral_norm(run.xhat_limit) > 1e-10:
            failures.append(f"r={r}: X̂ did not reach 0")
        if abs(counts[r] - reference) > 0.2 * reference:
            failures.append(f"r={r}: {counts[r]} iterations, expected ~{reference}")
    ordered = [counts[r] for r in sorted(counts)]
    if any(a <= b for a, b in zip(ordered, ordered[1:])):
        failures.append(f"counts not strictly decreasing in r: {ordered}")
    return _result("ex3 iteration counts", failures, f"counts {counts}")


def criterion_ex3_eps1(rng: np.random.Generator) -> CriterionResult:
    p, expected = builtin_example("ex3", eps=1.0)
    xhat0 = stein_initial(p, expected.feedback)
    run = afpi_run(p, xhat0, 100, IterationOptions(tol=1e-300, max_iter=7))
    norms = [s.norm_xhat for s in run.steps if s.norm_xhat is not None]
    failures = []
    if len(norms) < 7:
        failures.append(f"only {len(norms)} steps recorded")
    else:
        for k in range(1, 7):
            ratio = norms[k] / norms[k - 1]
            if not 5e-3 <= ratio <= 2e-2:
                failures.append(f"k={k + 1}: ratio {ratio:.2e}")
        if norms[6] > 1e-12:
            failures.append(f"‖X̂_7‖ = {norms[6]:.2e}")

    try:
        newton = newton_run(
            p, xhat0, IterationOptions(tol=expected.tol), direction="nonincreasing"
        )
        newton_note = f"newton {newton.termination.value}"
    except DareIterationError as e:
        newton_note = f"newton breakdown: {type(e).__name__}"
    return _result("ex3 ε=1 decay", failures, newton_note)


def criterion_ex4(rng: np.random.Generator) -> CriterionResult:
    p, expected = builtin_example("ex4")
    result = ExtremalSolver().solve_all(
        p,
        r=4,
        opts=IterationOptions(tol=expected.tol),
        feedback=expected.feedback,
        dual_feedback=expected.dual_feedback,
    )
    failures = []
    for name, reference in expected.solutions.items():
        found = result.get(name)
        if found is None:
            failures.append(f"{name} skipped: {result.skipped.get(name)}")
            continue
        err = relative_error(found, reference)
        if err > 1e-10:
            failures.append(f"{name} relative error {err:.2e}")

    dual_run = result.reports.get("dual_first")
    if not isinstance(dual_run, AfpiReport) or (
        max(dual_run.iterations_xhat, dual_run.iterations_h) > 4
    ):
        failures.append("dual AFPI(4) needed more than 4 outer iterations")
    for name, mu in (("x_mM", 0.5), ("x_mm", 2.0)):
        diag = result.diagnostics.get(name)
        if diag is None or abs(diag.mu_t - mu) > 1e-8:
            failures.append(f"μ(T) for {name} is not {mu}")
    if result.route_disagreement is None or result.route_disagreement > 1e-8:
        failures.append(f"route agreement {result.route_disagreement}")
    return _result("ex4 all extremal solutions", failures, "four solutions match")


# ====================== 性质检查 ======================
def criterion_semigroup(rng: np.random.Generator) -> CriterionResult:
    seed = int(rng.integers(2**31))
    worst = max(verify_semigroup(25, seed=seed + n, n=n) for n in (3, 5))
    failures = [] if worst <= 1e-9 else [f"associativity residual {worst:.2e}"]
    return _result("semigroup", failures, f"max residual {worst:.1e}")


def criterion_flow(rng: np.random.Generator) -> CriterionResult:
    failures = []
    worst = 0.0
    for example_id, pairs in FLOW_PAIRS.items():
        p, expected = builtin_example(example_id)
        xhat0 = stein_initial(p, expected.feedback)
        for r, k in pairs:
            value = verify_flow(p, xhat0, r, k)
            worst = max(worst, value)
            if value > 1e-9:
                failures.append(f"{example_id} r={r} k={k}: {value:.2e}")
    return _result("discrete flow", failures, f"max discrepancy {worst:.1e}")


def criterion_identities(rng: np.random.Generator) -> CriterionResult:
    failures = []
    worst = 0.0
    for i in range(100):
        n = int(rng.integers(1, 7))
        m = int(rng.integers(1, n + 1))
        p = random_stabilizable_problem(rng, n, m)
        f = random_complex(rng, m, n)
        xhat, x = random_psd(rng, n), random_psd(rng, n)
        for key, value in identity_residuals(p, f, xhat, x).items():
            worst = max(worst, value)
            if value > 1e-10:
                failures.append(f"instance {i}: {key} = {value:.2e}")

    dual_worst = 0.0
    for i in range(50):
        n = int(rng.integers(1, 6))
        m = int(rng.integers(1, n + 1))
        p = random_stabilizable_problem(rng, n, m)
        xhat0 = stein_initial(p, default_stabilizing_feedback(p))
        x = afpi_run(p, xhat0, 2).xhat_limit
        for key, value in verify_duality(p, x).items():
            dual_worst = max(dual_worst, value)
            if value > 1e-9:
                failures.append(f"dual instance {i}: {key} = {value:.2e}")
    return _result(
        "identities",
        failures[:10],
        f"max identity residual {worst:.1e}, max dual residual {dual_worst:.1e}",
    )


def criterion_monotonicity(rng: np.random.Generator) -> CriterionResult:
    failures = []
    solver = ExtremalSolver()
    sweep = IterationOptions(max_iter=60)
    for i in range(50):
        n = int(rng.integers(1, 6))
        m = int(rng.integers(1, n + 1))
        p = random_stabilizable_problem(rng, n, m)
        try:
            fpi_run(p, np.zeros((n, n)), sweep)
            fpi_run(
                p,
                stein_initial(p, default_stabilizing_feedback(p)),
                sweep,
                direction="nonincreasing",
            )
        except DareIterationError as e:
            failures.append(f"instance {i}: {e}")
            continue

        result = solver.solve_all(p)
        violations = result.ordering_violations()
        if violations:
            failures.append(f"instance {i}: ordering {violations}")
        for name, x in result.present().items():
            value = nres(p, x).nres
            if value > 1e-13:
                failures.append(f"instance {i}: {name} NRes {value:.2e}")
            if not min_eigenvalue(inner_matrix(p, x)) > 0:
                failures.append(f"instance {i}: {name} has R+BᴴXB not PD")
    return _result("monotonicity and ordering", failures[:10], "50 instances")


CRITERIA: dict[str, Criterion] = {
    "1": criterion_ex1_exactness,
    "2": criterion_ex1_diagnostics,
    "3": criterion_ex2,
    "4": criterion_ex3_counts,
    "5": criterion_ex3_eps1,
    "6": criterion_ex4,
    "7": criterion_semigroup,
    "8": criterion_flow,
    "9": criterion_identities,
    "10": criterion_monotonicity,
}


def run_acceptance(
    seed: Optional[int] = None, only: Optional[list[str]] = None
) -> list[CriterionResult]:
    """
    运行验收套件

    Args:
        seed: 随机种子；缺省时取 DARE_SEED 或默认种子
        only: 只运行这些编号的验收项

    Returns:
        list[CriterionResult]: 每项一个结果；抛出 DareError 的项记为失败
    """
    seed = SolverConfig(seed=seed).seed
    results = []
    for key, criterion in CRITERIA.items():
        if only and key not in only:
            continue
        rng = np.random.default_rng([seed, int(key)])
        try:
            outcome = criterion(rng)
        except DareError as e:
            outcome = CriterionResult(
                name=criterion.__name__.removeprefix("criterion_"),
                passed=False,
                detail=f"{type(e).__name__}: {e}",
            )
        logger.info("criterion %s: %s", key, "pass" if outcome.passed else "FAIL")
        results.append(outcome.model_copy(update={"name": f"{key}. {outcome.name}"}))
    return results
