"""
问题文件读写、收敛历史导出与 JSON 报告
"""

import csv
import json
import logging
from pathlib import Path
from typing import Optional, Union

from pydantic import Field, ValidationError

from .common_models import FrozenModel, HermitianMatrix
from .exceptions import ProblemParseError, ProblemValidationError
from .iteration_models import AfpiReport, IterationReport
from .problem_file_models import ProblemFile
from .riccati_models import DareProblem
from .solution_models import ExtremalSolutions, StructureReport

logger = logging.getLogger(__name__)

HISTORY_HEADER = (
    "k",
    "nres_xhat",
    "nres_h",
    "rho_t_xhat",
    "rho_t_h",
    "mu_t_xhat",
    "norm_Ak",
)


# ====================== 问题文件 ======================
def parse_problem(text: str) -> DareProblem:
    """
    解析问题文件

    Args:
        text: JSON 文本

    Returns:
        DareProblem: 问题；只给出 C 时 H = CᴴC

    Raises:
        ProblemParseError: JSON 格式错误
        ProblemValidationError: 维数不符、R 非正定、H 与 C 同时给出等，field 为出错字段
    """
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as e:
        raise ProblemParseError(f"malformed problem file: {e}") from e
    if not isinstance(payload, dict):
        raise ProblemParseError("problem file must be a JSON object")

    try:
        problem_file = ProblemFile.model_validate(payload)
    except ValidationError as e:
        first = e.errors()[0]
        field = ".".join(str(part) for part in first["loc"]) or None
        message = first["msg"]
        raise ProblemValidationError(
            f"{field}: {message}" if field else message, field=field
        ) from e

    try:
        return problem_file.to_problem()
    except ValidationError as e:
        raise ProblemValidationError(e.errors()[0]["msg"]) from e


def emit_problem(p: DareProblem) -> str:
    """问题写为 JSON 文本，浮点数按 repr 输出以保证可逆"""
    problem_file = ProblemFile.from_problem(p)
    return json.dumps(
        problem_file.model_dump(by_alias=True, exclude_none=True), indent=2
    )


def read_problem_file(path: Union[str, Path]) -> DareProblem:
    """
    读取问题文件

    Raises:
        ProblemParseError: 文件不存在或无法读取
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ProblemParseError(f"cannot read problem file {path}: {e}") from e
    return parse_problem(text)


def write_problem_file(p: DareProblem, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(emit_problem(p) + "\n", encoding="utf-8")
    return path


# ====================== 收敛历史 ======================
def _fmt(value: Optional[float]) -> str:
    return "" if value is None else f"{value:.5e}"


def history_rows(report: Union[AfpiReport, IterationReport]) -> list[list[str]]:
    """
    收敛历史表格，每个外层迭代一行

    AFPI 报告填写全部列；FPI/Newton 报告只有 nres_xhat 与 rho_t_xhat，
    初值 (k=0) 不输出。
    """
    if isinstance(report, AfpiReport):
        return [
            [
                str(step.k),
                _fmt(step.nres_xhat),
                _fmt(step.nres_h),
                _fmt(step.rho_t_xhat),
                _fmt(step.rho_t_h),
                _fmt(step.mu_t_xhat),
                _fmt(step.norm_a),
            ]
            for step in report.steps
        ]

    rows = []
    for k, value in enumerate(report.nres_history[1:], start=1):
        rho = report.rho_t_history[k] if report.rho_t_history else None
        rows.append([str(k), _fmt(value), "", _fmt(rho), "", "", ""])
    return rows


def write_history_csv(
    report: Union[AfpiReport, IterationReport], path: Union[str, Path]
) -> Path:
    """收敛历史写为 CSV"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(HISTORY_HEADER)
        writer.writerows(history_rows(report))
    return path


# ====================== JSON 报告 ======================
class SolutionEntry(FrozenModel):
    """报告中的单个解"""

    matrix: HermitianMatrix = Field(..., description="解矩阵")
    nres: float = Field(..., ge=0, description="NRes")
    rho_t: float = Field(..., ge=0, description="ρ(T_X)")
    mu_t: float = Field(..., ge=0, description="μ(T_X)")
    route: Optional[str] = Field(None, description="求解路线")
    iterations: Optional[int] = Field(None, description="迭代数")


class SolveReport(FrozenModel):
    """solve 命令的 JSON 报告"""

    problem: str = Field("", description="问题名称")
    solutions: dict[str, SolutionEntry] = Field(default_factory=dict)
    skipped: dict[str, str] = Field(default_factory=dict)
    structure: StructureReport = Field(..., description="结构报告")
    iterations: dict[str, int] = Field(
        default_factory=dict, description="各序列迭代数"
    )
    wall_ms: float = Field(..., ge=0, description="墙钟时间 (毫秒)")
    route: Optional[str] = Field(None, description="X₋,m 的求解路线")
    route_disagreement: Optional[float] = Field(None)

    @classmethod
    def from_solutions(
        cls, p: DareProblem, result: ExtremalSolutions, wall_ms: float
    ) -> "SolveReport":
        solutions = {}
        for name, matrix in result.present().items():
            diag = result.diagnostics[name]
            solutions[name] = SolutionEntry(
                matrix=matrix,
                nres=diag.nres,
                rho_t=diag.rho_t,
                mu_t=diag.mu_t,
                route=diag.route,
                iterations=diag.iterations,
            )

        iterations: dict[str, int] = {}
        for key, run in result.reports.items():
            if isinstance(run, AfpiReport):
                iterations[f"{key}.xhat"] = run.iterations_xhat
                iterations[f"{key}.h"] = run.iterations_h
                if run.termination_g is not None:
                    iterations[f"{key}.g"] = run.iterations_g
            else:
                iterations[key] = run.iterations

        x_mm = result.diagnostics.get("x_mm")
        return cls(
            problem=p.name,
            solutions=solutions,
            skipped=result.skipped,
            structure=result.structure,
            iterations=iterations,
            wall_ms=wall_ms,
            route=x_mm.route if x_mm else None,
            route_disagreement=result.route_disagreement,
        )

    def write(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.model_dump_json(indent=2) + "\n", encoding="utf-8")
        logger.info("report written to %s", path)
        return path
