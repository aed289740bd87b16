"""
极值解求解驱动

按各定理的前提逐个尝试四个极值解：前提在数值上不成立时记录到 skipped，
成立时运行相应迭代并对结果做事后检查。
"""

import logging
from typing import Callable, NamedTuple, Optional, get_args

import numpy as np

from .afpi import afpi_run
from .common_models import SolutionName, Termination, ValidMethods, ValidTargets
from .config import SolverConfig
from .dual import build_first_kind
from .exceptions import DareError, NotDStableError, SingularXError
from .iteration import (
    fpi_dual1_run,
    fpi_dual2_run,
    fpi_run,
    newton_refine,
    newton_run,
    stein_initial,
)
from .iteration_models import AfpiReport, IterationOptions, IterationReport
from .matrix_kernel import (
    as_matrix,
    checked_solve,
    condition_number,
    is_psd,
    min_eigenvalue,
    relative_error,
    spectral_norm,
    spectrum,
    symmetric_part,
)
from .riccati import closed_loop_matrix, inner_matrix, nres
from .riccati_models import DareProblem
from .solution_models import (
    ExtremalSolutions,
    RunReport,
    SolutionDiagnostics,
    StructureReport,
    VerificationRecord,
)
from .structure import (
    analyze,
    default_stabilizing_feedback,
    unstable_unobservable_modes,
)

logger = logging.getLogger(__name__)

_USABLE = (Termination.CONVERGED, Termination.STAGNATED, Termination.MAX_ITER)


class _Candidate(NamedTuple):
    matrix: np.ndarray
    route: str
    iterations: Optional[int]


class ExtremalSolver:
    """DARE 四个极值解的求解器"""

    def __init__(self, config: Optional[SolverConfig] = None):
        self.config = config or SolverConfig()

    # ====================== 求解 ======================
    def solve_all(
        self,
        p: DareProblem,
        r: int = 2,
        opts: Optional[IterationOptions] = None,
        feedback: Optional[np.ndarray] = None,
        dual_feedback: Optional[np.ndarray] = None,
        method: ValidMethods = "afpi",
        target: ValidTargets = "all",
    ) -> ExtremalSolutions:
        """
        求解全部极值解

        - X₊,M、X₊,m：可镇定时以 Stein 初值运行 AFPI，X̂ 极限为 X₊,M，H 极限为 X₊,m
        - X₋,M、X₋,m（一类对偶）：A 非奇异且反镇定秩条件成立、Ĥ ⪰ 0 时在对偶问题上
          运行 AFPI，取 −H 极限与 −X̂ 极限
        - X₋,m（二类对偶）：可控且 A 非奇异时由 −G∞⁻¹ 给出，与一类对偶结果交叉检查

        Args:
            p: DARE 问题
            r: AFPI 加速因子
            opts: 迭代选项
            feedback: 原问题的镇定反馈，缺省时自动构造
            dual_feedback: 一类对偶问题的镇定反馈，缺省时自动构造
            method: afpi、fpi 或 newton
            target: all、psd 或 nsd

        Returns:
            ExtremalSolutions: 通过检查的极值解；其余记录在 skipped
        """
        if r < 2:
            raise ValueError(f"r must be at least 2, got {r}")
        if method not in get_args(ValidMethods):
            raise ValueError(f"unknown method '{method}'")
        if target not in get_args(ValidTargets):
            raise ValueError(f"unknown target '{target}'")
        opts = opts or IterationOptions()

        structure = analyze(p)
        candidates: dict[str, _Candidate] = {}
        skipped: dict[str, str] = {}
        reports: dict[str, RunReport] = {}

        want_nsd = target in ("all", "nsd")
        route_a_possible = (
            want_nsd and structure.controllable and structure.a_nonsingular
        )

        primal_run: Optional[AfpiReport] = None
        if target in ("all", "psd"):
            primal_run = self._solve_psd(
                p,
                structure,
                r,
                opts,
                feedback,
                method,
                route_a_possible,
                candidates,
                skipped,
                reports,
            )

        route_disagreement: Optional[float] = None
        if want_nsd:
            self._solve_nsd(
                p,
                structure,
                r,
                opts,
                dual_feedback,
                method,
                candidates,
                skipped,
                reports,
            )
            if route_a_possible:
                route_disagreement = self._merge_route_a(
                    p, r, opts, method, primal_run, candidates, skipped, reports
                )

        # 事后检查，未通过的解移入 skipped
        solutions: dict[str, np.ndarray] = {}
        diagnostics: dict[str, SolutionDiagnostics] = {}
        verification: dict[str, VerificationRecord] = {}
        distinct = self._distinctness(p, candidates)
        for name, candidate in candidates.items():
            candidate = self._refine(p, candidate, opts)
            record = self.verify_solution(
                p, candidate.matrix, name, opts, distinct=distinct.get(name, False)
            )
            verification[name] = record
            if record.passed:
                solutions[name] = candidate.matrix
                diagnostics[name] = self._diagnostics(p, candidate)
            else:
                skipped[name] = "verification failed: " + ", ".join(
                    record.failed_checks
                )
                logger.warning(
                    "%s on %s failed checks %s",
                    name,
                    p.name or "problem",
                    record.failed_checks,
                )

        result = ExtremalSolutions(
            **solutions,
            diagnostics=diagnostics,
            verification=verification,
            skipped=skipped,
            structure=structure,
            reports=reports,
            route_disagreement=route_disagreement,
        )

        violations = result.ordering_violations()
        if violations:
            logger.warning("ordering chain violated: %s", ", ".join(violations))
        minimal = diagnostics.get("x_pm")
        if minimal is not None and minimal.rho_t <= 1.0 + SolverConfig.SPECTRAL_TOL:
            logger.info(
                "ρ(T) of X₊,m is %.6g ≤ 1, X₊,M = X₊,m expected", minimal.rho_t
            )
        for name, reason in skipped.items():
            logger.info("%s skipped: %s", name, reason)
        return result

    def _solve_psd(
        self,
        p: DareProblem,
        structure: StructureReport,
        r: int,
        opts: IterationOptions,
        feedback: Optional[np.ndarray],
        method: str,
        track_g: bool,
        candidates: dict[str, _Candidate],
        skipped: dict[str, str],
        reports: dict[str, RunReport],
    ) -> Optional[AfpiReport]:
        names: tuple[SolutionName, ...] = ("x_pM", "x_pm")
        if not structure.stabilizable:
            witnesses = structure.witnesses_for("stabilizable")
            reason = "(A,B) is not stabilizable: " + "; ".join(
                w.describe() for w in witnesses
            )
            skipped.update({name: reason for name in names})
            return None

        try:
            xhat0 = self._initial_guess(p, feedback)
        except DareError as e:
            reason = f"no stabilizing initial guess: {e}"
            skipped.update({name: reason for name in names})
            return None

        zero = np.zeros_like(xhat0)
        if method == "afpi":
            try:
                run = afpi_run(p, xhat0, r, opts, track_g=track_g)
            except DareError as e:
                skipped.update({name: f"AFPI({r}) failed: {e}" for name in names})
                return None
            reports["primal"] = run
            route = f"afpi({r})"
            self._accept(
                candidates,
                skipped,
                "x_pM",
                run.xhat_limit,
                run.termination_xhat,
                route,
                run.iterations_xhat,
            )
            self._accept(
                candidates,
                skipped,
                "x_pm",
                run.h_limit,
                run.termination_h,
                route,
                run.iterations_h,
            )
            return run

        if method == "newton":
            self._attempt(
                "x_pM",
                "newton",
                lambda: newton_run(p, xhat0, opts, direction="nonincreasing"),
                candidates,
                skipped,
                reports,
            )
        else:
            self._attempt(
                "x_pM",
                "fpi",
                lambda: fpi_run(p, xhat0, opts, direction="nonincreasing"),
                candidates,
                skipped,
                reports,
            )
        self._attempt(
            "x_pm",
            "fpi",
            lambda: fpi_run(p, zero, opts),
            candidates,
            skipped,
            reports,
        )
        return None

    def _solve_nsd(
        self,
        p: DareProblem,
        structure: StructureReport,
        r: int,
        opts: IterationOptions,
        dual_feedback: Optional[np.ndarray],
        method: str,
        candidates: dict[str, _Candidate],
        skipped: dict[str, str],
        reports: dict[str, RunReport],
    ) -> None:
        """一类对偶路线：X₋,M = −H 极限，X₋,m = −X̂ 极限"""
        names: tuple[SolutionName, ...] = ("x_mM", "x_mm")

        def skip(reason: str) -> None:
            skipped.update({name: reason for name in names})

        if not structure.a_nonsingular:
            skip("A is singular")
            return
        if not structure.antistab_rank_ok:
            skip("; ".join(w.describe() for w in structure.witnesses_for("antistab")))
            return

        try:
            dual = build_first_kind(p).problem
        except DareError as e:
            skip(f"first-kind dual unavailable: {e}")
            return
        if not is_psd(dual.h, SolverConfig.PSD_TOL * max(1.0, spectral_norm(dual.h))):
            skip("Ĥ is not positive semidefinite")
            return

        try:
            y0 = self._initial_guess(dual, dual_feedback)
        except DareError as e:
            skip(f"no stabilizing initial guess for the dual: {e}")
            return

        zero = np.zeros_like(y0)
        if method == "afpi":
            try:
                run = afpi_run(dual, y0, r, opts, primal=p)
            except DareError as e:
                skip(f"dual AFPI({r}) failed: {e}")
                return
            reports["dual_first"] = run
            route = f"dual afpi({r})"
            self._accept(
                candidates,
                skipped,
                "x_mM",
                -run.h_limit,
                run.termination_h,
                route,
                run.iterations_h,
            )
            self._accept(
                candidates,
                skipped,
                "x_mm",
                -run.xhat_limit,
                run.termination_xhat,
                route,
                run.iterations_xhat,
            )
            return

        self._attempt(
            "x_mM",
            "fpi_dual1",
            lambda: fpi_dual1_run(p, zero, opts),
            candidates,
            skipped,
            reports,
            negate=True,
        )
        if method == "newton":
            self._attempt(
                "x_mm",
                "dual newton",
                lambda: newton_run(dual, y0, opts, direction="nonincreasing"),
                candidates,
                skipped,
                reports,
                negate=True,
            )
        else:
            self._attempt(
                "x_mm",
                "fpi_dual1",
                lambda: fpi_dual1_run(p, y0, opts, direction="nonincreasing"),
                candidates,
                skipped,
                reports,
                negate=True,
            )

    def _merge_route_a(
        self,
        p: DareProblem,
        r: int,
        opts: IterationOptions,
        method: str,
        primal_run: Optional[AfpiReport],
        candidates: dict[str, _Candidate],
        skipped: dict[str, str],
        reports: dict[str, RunReport],
    ) -> Optional[float]:
        """二类对偶路线 X₋,m = −G∞⁻¹，与一类对偶结果比较"""
        try:
            g_limit, iterations = self._g_limit(
                p, r, opts, method, primal_run, reports
            )
        except DareError as e:
            logger.warning("route −G∞⁻¹ unavailable: %s", e)
            return None

        cond = condition_number(g_limit)
        if not cond < SolverConfig.INVERSE_COND_LIMIT:
            logger.warning(
                "G∞ ill-conditioned (cond=%.3e), route −G∞⁻¹ skipped", cond
            )
            return None
        eye = np.eye(p.n, dtype=np.complex128)
        x_route_a = symmetric_part(
            -checked_solve(g_limit, eye, SingularXError, "G∞")
        )

        existing = candidates.get("x_mm")
        if existing is None:
            candidates["x_mm"] = _Candidate(x_route_a, "second_kind", iterations)
            skipped.pop("x_mm", None)
            return None

        disagreement = relative_error(x_route_a, existing.matrix)
        if disagreement > SolverConfig.ROUTE_AGREEMENT_RTOL:
            logger.warning(
                "X₋,m routes disagree (relative %.3e), keeping first-kind result",
                disagreement,
            )
        return disagreement

    def _g_limit(
        self,
        p: DareProblem,
        r: int,
        opts: IterationOptions,
        method: str,
        primal_run: Optional[AfpiReport],
        reports: dict[str, RunReport],
    ) -> tuple[np.ndarray, int]:
        if method == "afpi":
            run = primal_run
            if run is None or run.termination_g is None:
                zero = np.zeros((p.n, p.n), dtype=np.complex128)
                run = afpi_run(p, zero, r, opts, track_g=True)
                reports["route_a"] = run
            termination = run.termination_g
            last = [s.nres_g for s in run.steps if s.nres_g is not None]
            usable = termination in _USABLE or (
                bool(last) and last[-1] <= 10 * opts.tol
            )
            if not usable:
                status = termination.value if termination else "untracked"
                raise DareError(f"G sequence ended with {status}")
            return as_matrix(run.g_limit), run.iterations_g

        zero = np.zeros((p.n, p.n), dtype=np.complex128)
        report = fpi_dual2_run(p, zero, opts)
        reports["route_a"] = report
        if report.termination not in _USABLE:
            raise DareError(f"second-kind FPI ended with {report.termination.value}")
        return as_matrix(report.x), report.iterations

    @staticmethod
    def _initial_guess(
        problem: DareProblem, feedback: Optional[np.ndarray]
    ) -> np.ndarray:
        """给定反馈的 Stein 初值；反馈不能镇定时改用自动构造的反馈"""
        if feedback is not None:
            try:
                return stein_initial(problem, feedback)
            except NotDStableError as e:
                logger.warning(
                    "given feedback does not stabilize %s, constructing one: %s",
                    problem.name or "problem",
                    e,
                )
        return stein_initial(problem, default_stabilizing_feedback(problem))

    def _refine(
        self, p: DareProblem, candidate: _Candidate, opts: IterationOptions
    ) -> _Candidate:
        refined = newton_refine(p, candidate.matrix, opts.tol, self.config.refine_steps)
        return candidate._replace(matrix=refined)

    @staticmethod
    def _distinctness(
        p: DareProblem, candidates: dict[str, _Candidate]
    ) -> dict[str, bool]:
        """
        由不可检测模态判定极值解是否互异

        (H, A) 有 |λ| > 1 的不可检测模态时 X₊,m ≠ X₊,M；(Ĥ, Â) 有时 X₋,M ≠ X₋,m。
        """
        distinct = {"x_pm": bool(unstable_unobservable_modes(p.a, p.h))}
        if "x_mM" in candidates:
            try:
                dual = build_first_kind(p).problem
            except DareError:
                distinct["x_mM"] = False
            else:
                distinct["x_mM"] = bool(unstable_unobservable_modes(dual.a, dual.h))
        return distinct

    @staticmethod
    def _accept(
        candidates: dict[str, _Candidate],
        skipped: dict[str, str],
        name: str,
        matrix: np.ndarray,
        termination: Termination,
        route: str,
        iterations: Optional[int],
    ) -> None:
        if termination not in _USABLE:
            skipped[name] = f"{route} ended with {termination.value}"
            return
        candidates[name] = _Candidate(symmetric_part(matrix), route, iterations)

    def _attempt(
        self,
        name: str,
        route: str,
        run: Callable[[], IterationReport],
        candidates: dict[str, _Candidate],
        skipped: dict[str, str],
        reports: dict[str, RunReport],
        negate: bool = False,
    ) -> None:
        try:
            report = run()
        except DareError as e:
            skipped[name] = f"{route} failed: {e}"
            logger.warning("%s via %s failed: %s", name, route, e)
            return
        reports[name] = report
        matrix = -report.x if negate else report.x
        self._accept(
            candidates,
            skipped,
            name,
            matrix,
            report.termination,
            route,
            report.iterations,
        )

    # ====================== 检查 ======================
    def verify_solution(
        self,
        p: DareProblem,
        x: np.ndarray,
        kind: SolutionName,
        opts: Optional[IterationOptions] = None,
        distinct: bool = False,
    ) -> VerificationRecord:
        """
        解的事后检查

        - nres：NRes ≤ 10·tol
        - inner_pd：R + BᴴXB ≻ 0
        - sign：X₊ 类半正定，X₋ 类半负定
        - spectral：x_pM 要求 ρ(T_X) ≤ 1+SPECTRAL_TOL，x_mm 要求 μ(T_X) ≥ 1−SPECTRAL_TOL；
          distinct 时 x_pm 要求 ρ(T_X) ≥ 1−SPECTRAL_TOL，x_mM 要求
          μ(T_X) ≤ 1+SPECTRAL_TOL

        Args:
            p: DARE 问题
            x: 待检查的解
            kind: 解的名称
            opts: 迭代选项，取其 tol
            distinct: 该极值解已知与同号的另一个极值解不同
        """
        opts = opts or IterationOptions()
        x = symmetric_part(as_matrix(x))
        checks: dict[str, bool] = {}
        values: dict[str, float] = {}

        try:
            value = nres(p, x).nres
            values["nres"] = value
            checks["nres"] = value <= 10 * opts.tol
        except DareError:
            checks["nres"] = False

        inner_min = min_eigenvalue(inner_matrix(p, x))
        values["inner_min_eig"] = inner_min
        checks["inner_pd"] = inner_min > 0.0

        tol = SolverConfig.PSD_TOL * max(1.0, spectral_norm(x))
        values["min_eig"] = min_eigenvalue(x)
        values["max_eig"] = -min_eigenvalue(-x)
        checks["sign"] = is_psd(x, tol) if kind.startswith("x_p") else is_psd(-x, tol)

        if kind in ("x_pM", "x_mm") or distinct:
            try:
                spec = spectrum(closed_loop_matrix(p, x))
            except DareError:
                checks["spectral"] = False
            else:
                values["rho_t"] = spec.rho
                values["mu_t"] = spec.mu
                edge = SolverConfig.SPECTRAL_TOL
                if kind == "x_pM":
                    checks["spectral"] = spec.rho <= 1.0 + edge
                elif kind == "x_mm":
                    checks["spectral"] = spec.mu >= 1.0 - edge
                elif kind == "x_pm":
                    checks["spectral"] = spec.rho >= 1.0 - edge
                else:
                    checks["spectral"] = spec.mu <= 1.0 + edge

        return VerificationRecord(kind=kind, checks=checks, values=values)

    @staticmethod
    def _diagnostics(p: DareProblem, candidate: _Candidate) -> SolutionDiagnostics:
        spec = spectrum(closed_loop_matrix(p, candidate.matrix))
        return SolutionDiagnostics(
            nres=nres(p, candidate.matrix).nres,
            rho_t=spec.rho,
            mu_t=spec.mu,
            rho_disk_t=spec.rho_disk,
            route=candidate.route,
            iterations=candidate.iterations,
        )


def solve_all(
    p: DareProblem,
    r: int = 2,
    opts: Optional[IterationOptions] = None,
    feedback: Optional[np.ndarray] = None,
    dual_feedback: Optional[np.ndarray] = None,
    method: ValidMethods = "afpi",
    target: ValidTargets = "all",
) -> ExtremalSolutions:
    """使用默认配置的 ExtremalSolver.solve_all"""
    return ExtremalSolver().solve_all(
        p,
        r=r,
        opts=opts,
        feedback=feedback,
        dual_feedback=dual_feedback,
        method=method,
        target=target,
    )


def verify_solution(
    p: DareProblem,
    x: np.ndarray,
    kind: SolutionName,
    opts: Optional[IterationOptions] = None,
    distinct: bool = False,
) -> VerificationRecord:
    """使用默认配置的 ExtremalSolver.verify_solution"""
    return ExtremalSolver().verify_solution(p, x, kind, opts, distinct=distinct)
