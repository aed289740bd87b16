"""
内置示例问题

四个示例的系数矩阵、推荐反馈与已知闭式解。
"""

from typing import Optional

import numpy as np
import scipy.linalg
from pydantic import Field

from .common_models import DenseMatrix, FrozenModel, HermitianMatrix
from .config import ExampleConfig
from .dual import build_first_kind, feedback_from_tilde
from .exceptions import ProblemValidationError, UnknownExampleError
from .riccati_models import DareProblem

SQRT17 = np.sqrt(17.0)


class ExpectedValues(FrozenModel):
    """示例的已知结果"""

    example_id: str = Field(..., description="示例 ID")
    solutions: dict[str, HermitianMatrix] = Field(
        default_factory=dict, description="已知闭式极值解"
    )
    feedback: Optional[DenseMatrix] = Field(None, description="推荐的镇定反馈 F")
    dual_feedback: Optional[DenseMatrix] = Field(
        None, description="一类对偶问题 (Â, B̂) 的镇定反馈"
    )
    tol: float = Field(..., gt=0, description="推荐的 NRes 停止阈值")
    skipped: list[str] = Field(
        default_factory=list, description="预期无法求出的极值解"
    )


def _example_1() -> tuple[DareProblem, dict]:
    problem = DareProblem(
        a=np.diag([3.0, 0.5]),
        b=[[1.0], [0.0]],
        r=[[1.0]],
        c=[[0.0, 1.0]],
        name=ExampleConfig.get_example_name("ex1"),
    )
    expected = {
        "solutions": {
            "x_pM": np.diag([8.0, 4.0 / 3.0]),
            "x_pm": np.diag([0.0, 4.0 / 3.0]),
        },
        "feedback": [[3.0, 0.0]],
        "skipped": ["x_mM", "x_mm"],
    }
    return problem, expected


def _example_2() -> tuple[DareProblem, dict]:
    a = np.zeros((5, 5))
    a[0, 0] = a[1, 1] = 2.9
    a[0, 1] = 1.0
    a[4, 4] = 1.0
    h = np.zeros((5, 5))
    h[2, 2] = h[3, 3] = 200.0
    h[2, 3] = h[3, 2] = -0.5
    h[4, 4] = 1.0
    x_pm = h.copy()
    x_pm[4, 4] = (1.0 + np.sqrt(5.0)) / 2.0
    problem = DareProblem(
        a=a,
        b=np.diag([np.sqrt(2.0), 1.0, 0.0, 0.0, 1.0]),
        r=np.eye(5),
        h=h,
        name=ExampleConfig.get_example_name("ex2"),
    )
    expected = {
        "solutions": {"x_pm": x_pm},
        "feedback": np.diag([2.0, 3.0, 0.0, 0.0, 0.5]),
        "skipped": ["x_mM", "x_mm"],
    }
    return problem, expected


def _example_3(eps: float) -> tuple[DareProblem, dict]:
    c, s = np.sqrt(3.0) / 2.0, 0.5
    a = scipy.linalg.block_diag(
        [[-1.0, 0.0, 0.0], [0.0, 1.0, eps], [0.0, 0.0, 1.0]],
        [[c, s], [-s, c]],
        [[0.5, 1.0, 0.0], [0.0, 0.5, 1.0], [0.0, 0.0, 0.5]],
    )
    b = np.eye(8) + np.eye(8, k=-1)
    b[1, 2] = eps
    problem = DareProblem(
        a=a,
        b=b,
        r=np.eye(8),
        h=np.zeros((8, 8)),
        name=f"{ExampleConfig.get_example_name('ex3')} (ε={eps:g})",
    )
    zero = np.zeros((8, 8))
    expected = {
        "solutions": {"x_pM": zero, "x_pm": zero},
        "feedback": np.diag([-1.0, 1.0, 1.0, 1.0, 1.0, 0.1, 0.1, 0.1]),
    }
    return problem, expected


def _example_4() -> tuple[DareProblem, dict]:
    x_plus = np.array(
        [
            [4.5 + 9.0 * SQRT17 / 8.0, 3.0 + 3.0 * SQRT17 / 4.0],
            [3.0 + 3.0 * SQRT17 / 4.0, 2.0 + SQRT17 / 2.0],
        ]
    )
    x_minus_max = np.array(
        [
            [4.5 - 9.0 * SQRT17 / 8.0, 3.0 - 3.0 * SQRT17 / 4.0],
            [3.0 - 3.0 * SQRT17 / 4.0, 2.0 - SQRT17 / 2.0],
        ]
    )
    x_minus_min = np.array(
        [
            [-103.0 / 12.0 - SQRT17 / 8.0, -39.0 / 4.0 - SQRT17 / 4.0],
            [-39.0 / 4.0 - SQRT17 / 4.0, -43.0 / 4.0 - SQRT17 / 2.0],
        ]
    )
    problem = DareProblem(
        a=[[4.0, 3.0], [-4.5, -3.5]],
        b=[[6.0], [-5.0]],
        r=[[1.0]],
        h=[[9.0, 6.0], [6.0, 4.0]],
        name=ExampleConfig.get_example_name("ex4"),
    )
    expected = {
        "solutions": {
            "x_pM": x_plus,
            "x_pm": x_plus,
            "x_mM": x_minus_max,
            "x_mm": x_minus_min,
        },
        "feedback": [[-0.58, -0.68]],
        # F̃ 镇定中间系数形式 Ã − B̃F̃
        "dual_feedback": feedback_from_tilde(
            build_first_kind(problem), [[0.62, 0.52]]
        ),
    }
    return problem, expected


def builtin_example(
    example_id: str, eps: float = 0.0
) -> tuple[DareProblem, ExpectedValues]:
    """
    获取内置示例

    Args:
        example_id: ex1、ex2、ex3 或 ex4
        eps: ex3 的参数 ε ≥ 0，其余示例忽略

    Returns:
        tuple[DareProblem, ExpectedValues]: 问题与已知结果

    Raises:
        UnknownExampleError: 未知的示例 ID
        ProblemValidationError: ε < 0
    """
    if not ExampleConfig.is_valid_example(example_id):
        available = ", ".join(ExampleConfig.get_all_examples())
        raise UnknownExampleError(
            f"unknown example '{example_id}', available: {available}",
            field="example",
        )

    if example_id == "ex1":
        problem, expected = _example_1()
    elif example_id == "ex2":
        problem, expected = _example_2()
    elif example_id == "ex3":
        if eps < 0:
            raise ProblemValidationError(
                f"ε must be nonnegative, got {eps}", field="eps"
            )
        problem, expected = _example_3(eps)
    else:
        problem, expected = _example_4()

    return problem, ExpectedValues(
        example_id=example_id,
        tol=ExampleConfig.get_recommended_tol(example_id),
        **expected,
    )
