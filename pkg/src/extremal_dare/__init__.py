"""
Extremal DARE Python 包

离散代数 Riccati 方程 X = AᴴX(I+GX)⁻¹A + H 的四个极值 Hermite 解：
最大/最小半正定解与最大/最小半负定解，基于加速不动点迭代 AFPI(r)
与两类对偶方程。
"""

__version__ = "0.1.0"
__author__ = "drunkenQCat"
__email__ = "songjh123123@outlook.com"

# 导出主要类
from .driver import ExtremalSolver, solve_all, verify_solution
from .riccati_models import ClosedLoop, DareProblem, ResidualValue
from .riccati import (
    closed_loop,
    closed_loop_matrix,
    identity_residuals,
    k_term,
    nres,
    riccati_apply,
    solution_difference_residual,
)
from .structure import (
    analyze,
    default_stabilizing_feedback,
    pbh_rank_defect,
    unstable_unobservable_modes,
)
from .dual import (
    build_first_kind,
    build_second_kind,
    feedback_from_tilde,
    verify_duality,
)
from .iteration import (
    fpi_dual1_run,
    fpi_dual2_run,
    fpi_run,
    newton_refine,
    newton_run,
    newton_step,
    rate_estimate,
    stein_initial,
)
from .afpi import (
    afpi_run,
    binary_f,
    compose_fr,
    initial_triple,
    verify_flow,
    verify_semigroup,
    xhat_update,
)
from .matrix_kernel import hermitianize, solve_stein, spectrum
from .common_models import SpectrumSummary, Termination
from .iteration_models import (
    AfpiReport,
    AfpiStep,
    IterationOptions,
    IterationReport,
    TripleState,
)
from .solution_models import (
    DualFirstKind,
    DualSecondKind,
    ExtremalSolutions,
    SolutionDiagnostics,
    StructureReport,
    VerificationRecord,
    Witness,
)
from .builtin_examples import ExpectedValues, builtin_example
from .report import SolveReport, emit_problem, parse_problem, write_history_csv
from .config import ExampleConfig, SolverConfig
from .exceptions import (
    DareError,
    DareIterationError,
    DareNumericalError,
    DareValidationError,
    NotStabilizableError,
    ProblemParseError,
    ProblemValidationError,
    SteinBreakdownError,
    UnknownExampleError,
)

__all__ = [
    # 求解器
    "ExtremalSolver",
    "solve_all",
    "verify_solution",
    # Riccati 算子
    "DareProblem",
    "ClosedLoop",
    "ResidualValue",
    "riccati_apply",
    "closed_loop",
    "closed_loop_matrix",
    "k_term",
    "nres",
    "identity_residuals",
    "solution_difference_residual",
    # 结构分析与对偶
    "analyze",
    "default_stabilizing_feedback",
    "pbh_rank_defect",
    "unstable_unobservable_modes",
    "build_first_kind",
    "build_second_kind",
    "feedback_from_tilde",
    "verify_duality",
    # 迭代
    "fpi_run",
    "fpi_dual1_run",
    "fpi_dual2_run",
    "newton_run",
    "newton_step",
    "newton_refine",
    "stein_initial",
    "rate_estimate",
    "afpi_run",
    "binary_f",
    "compose_fr",
    "initial_triple",
    "xhat_update",
    "verify_flow",
    "verify_semigroup",
    # 矩阵工具
    "hermitianize",
    "solve_stein",
    "spectrum",
    # 模型
    "SpectrumSummary",
    "Termination",
    "AfpiReport",
    "AfpiStep",
    "IterationOptions",
    "IterationReport",
    "TripleState",
    "DualFirstKind",
    "DualSecondKind",
    "ExtremalSolutions",
    "SolutionDiagnostics",
    "StructureReport",
    "VerificationRecord",
    "Witness",
    # 问题与报告
    "ExpectedValues",
    "builtin_example",
    "SolveReport",
    "emit_problem",
    "parse_problem",
    "write_history_csv",
    # 配置
    "ExampleConfig",
    "SolverConfig",
    # 异常
    "DareError",
    "DareIterationError",
    "DareNumericalError",
    "DareValidationError",
    "NotStabilizableError",
    "ProblemParseError",
    "ProblemValidationError",
    "SteinBreakdownError",
    "UnknownExampleError",
    # 元数据
    "__version__",
    "__author__",
    "__email__",
]
