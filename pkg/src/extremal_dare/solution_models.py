"""
结构分析、对偶变换与极值解模型
"""

from typing import Literal, Optional, Union

import numpy as np
from pydantic import Field

from .common_models import (
    DenseMatrix,
    FrozenModel,
    HermitianMatrix,
    SolutionName,
)
from .iteration_models import AfpiReport, IterationReport
from .riccati_models import DareProblem

WitnessTest = Literal["stabilizable", "detectable", "controllable", "antistab"]
RunReport = Union[AfpiReport, IterationReport]


# ====================== 结构分析 ======================
class Witness(FrozenModel):
    """PBH 检验失败的见证特征值"""

    test: WitnessTest = Field(..., description="失败的检验")
    eigenvalue_re: float = Field(..., description="特征值实部")
    eigenvalue_im: float = Field(0.0, description="特征值虚部")
    rank_defect: int = Field(..., ge=1, description="秩亏")

    @property
    def eigenvalue(self) -> complex:
        return complex(self.eigenvalue_re, self.eigenvalue_im)

    def describe(self) -> str:
        lam = self.eigenvalue
        text = f"{lam.real:.6g}" if lam.imag == 0 else f"{lam:.6g}"
        return f"rank[A−λI,B] deficient at λ={text}"


class StructureReport(FrozenModel):
    """结构性质报告"""

    stabilizable: bool = Field(..., description="(A,B) 可镇定")
    detectable: Optional[bool] = Field(
        None, description="(A,C) 可检测；未提供 C 时为 None"
    )
    controllable: bool = Field(..., description="(A,B) 可控")
    antistab_rank_ok: bool = Field(
        ..., description="闭单位圆盘内非零特征值处 rank[A−λI,B]=n"
    )
    a_nonsingular: bool = Field(..., description="A 非奇异")
    witnesses: list[Witness] = Field(default_factory=list, description="失败见证")

    def witnesses_for(self, test: WitnessTest) -> list[Witness]:
        return [w for w in self.witnesses if w.test == test]


# ====================== 对偶变换 ======================
class TildeCoefficients(FrozenModel):
    """对偶问题的中间系数 (Ã, B̃, C̃, R̃, H̃)"""

    a: DenseMatrix = Field(..., description="Ã = A⁻¹")
    b: DenseMatrix = Field(..., description="B̃ = A⁻¹B")
    c: DenseMatrix = Field(..., description="C̃ = BᴴH̃")
    r: HermitianMatrix = Field(..., description="R̃ = R + C̃B")
    h: HermitianMatrix = Field(..., description="H̃ = A⁻ᴴHA⁻¹")


class DualFirstKind(FrozenModel):
    """一类对偶 DARE，解对应关系 Y = −X"""

    problem: DareProblem = Field(..., description="对偶问题 (Â, B̂, R̂, Ĥ)")
    h_upper: HermitianMatrix = Field(..., description="H^{(A)} = A⁻ᴴHA⁻¹")
    tilde: TildeCoefficients = Field(..., description="中间系数")


class DualSecondKind(FrozenModel):
    """二类对偶 DARE，解对应关系 Y = −X⁻¹"""

    problem: DareProblem = Field(..., description="系数角色互换 (Aᴴ, H, G)")


# ====================== 极值解 ======================
class SolutionDiagnostics(FrozenModel):
    """单个解的诊断量"""

    nres: float = Field(..., ge=0, description="NRes")
    rho_t: float = Field(..., ge=0, description="ρ(T_X)")
    mu_t: float = Field(..., ge=0, description="μ(T_X)")
    rho_disk_t: Optional[float] = Field(None, description="ρ_D(T_X)")
    route: Optional[str] = Field(None, description="求解路线")
    iterations: Optional[int] = Field(None, description="迭代数")


class VerificationRecord(FrozenModel):
    """解的事后检查结果"""

    kind: SolutionName = Field(..., description="解的类别")
    checks: dict[str, bool] = Field(default_factory=dict, description="各项检查")
    values: dict[str, float] = Field(default_factory=dict, description="检查数值")

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    @property
    def failed_checks(self) -> list[str]:
        return [name for name, ok in self.checks.items() if not ok]


class ExtremalSolutions(FrozenModel):
    """四个极值解及其分类信息"""

    x_pm: Optional[HermitianMatrix] = Field(None, description="X₊,m 最小半正定解")
    x_pM: Optional[HermitianMatrix] = Field(None, description="X₊,M 最大半正定解")
    x_mM: Optional[HermitianMatrix] = Field(None, description="X₋,M 最大半负定解")
    x_mm: Optional[HermitianMatrix] = Field(None, description="X₋,m 最小半负定解")
    diagnostics: dict[str, SolutionDiagnostics] = Field(default_factory=dict)
    verification: dict[str, VerificationRecord] = Field(default_factory=dict)
    skipped: dict[str, str] = Field(default_factory=dict, description="跳过原因")
    structure: StructureReport = Field(..., description="结构报告")
    reports: dict[str, RunReport] = Field(default_factory=dict, description="迭代报告")
    route_disagreement: Optional[float] = Field(
        None, description="X₋,m 两条路线的相对差"
    )

    def get(self, name: SolutionName) -> Optional[np.ndarray]:
        return getattr(self, name)

    def present(self) -> dict[str, np.ndarray]:
        names: tuple[SolutionName, ...] = ("x_mm", "x_mM", "x_pm", "x_pM")
        return {n: m for n in names if (m := self.get(n)) is not None}

    def ordering_violations(self, rtol: float = 1e-9) -> list[str]:
        """按 x_mm ⪯ x_mM ⪯ 0 ⪯ x_pm ⪯ x_pM 检查，返回违反的相邻对"""
        n = self.structure_order()
        if n is None:
            return []
        negative: tuple[SolutionName, ...] = ("x_mm", "x_mM")
        positive: tuple[SolutionName, ...] = ("x_pm", "x_pM")
        chain: list[tuple[str, np.ndarray]] = [
            (name, m) for name in negative if (m := self.get(name)) is not None
        ]
        chain.append(("0", np.zeros((n, n), dtype=np.complex128)))
        chain += [(name, m) for name in positive if (m := self.get(name)) is not None]

        violations = []
        for (lo_name, lo), (hi_name, hi) in zip(chain, chain[1:]):
            diff = hi - lo
            scale = max(1.0, float(np.linalg.norm(lo, 2)), float(np.linalg.norm(hi, 2)))
            min_eig = float(np.linalg.eigvalsh((diff + diff.conj().T) / 2).min())
            if min_eig < -rtol * scale:
                violations.append(f"{lo_name} ⪯ {hi_name}")
        return violations

    def structure_order(self) -> Optional[int]:
        present = self.present()
        if not present:
            return None
        return int(next(iter(present.values())).shape[0])
