"""
DARE 极值解求解器异常类
"""

from typing import Any


class DareError(Exception):
    """DARE 求解器基础异常类"""

    pass


# ====================== 数值异常 ======================
class DareNumericalError(DareError):
    """数值计算异常"""

    def __init__(self, message: str, details: dict[str, Any] | None = None):
        super().__init__(message)
        self.details = details or {}


class NonSquareError(DareNumericalError):
    """矩阵不是方阵"""

    pass


class AsymmetryTooLargeError(DareNumericalError):
    """矩阵偏离 Hermite 对称过大"""

    pass


class DimensionMismatchError(DareNumericalError):
    """矩阵维数不匹配"""

    pass


class EigenSolverFailureError(DareNumericalError):
    """特征值求解未收敛"""

    pass


class SingularSteinOperatorError(DareNumericalError):
    """Stein 算子奇异"""

    pass


class SingularPencilError(DareNumericalError):
    """I+GX 数值奇异，X 不在 R 的定义域内"""

    pass


class SingularInnerMatrixError(DareNumericalError):
    """R+BᴴXB 数值奇异"""

    pass


class SingularAError(DareNumericalError):
    """A 数值奇异"""

    pass


class SingularXError(DareNumericalError):
    """X 数值奇异"""

    pass


class CrossCheckFailedError(DareNumericalError):
    """两种构造方式结果不一致"""

    pass


class NotDStableError(DareNumericalError):
    """闭环矩阵不是 d-稳定的"""

    pass


class SingularDeltaError(DareNumericalError):
    """I+G_kH_0 数值奇异"""

    def __init__(
        self,
        message: str,
        index: int | None = None,
        details: dict[str, Any] | None = None,
    ):
        super().__init__(message, details=details)
        self.index = index


class InsufficientHistoryError(DareNumericalError):
    """历史数据不足以估计收敛速率"""

    pass


# ====================== 结构异常 ======================
class NotStabilizableError(DareError):
    """(A,B) 不可镇定"""

    pass


class FeedbackSearchFailedError(DareError):
    """未能找到镇定反馈"""

    pass


# ====================== 迭代异常 ======================
class DareIterationError(DareError):
    """迭代过程异常"""

    def __init__(self, message: str, report: Any = None):
        super().__init__(message)
        self.report = report


class BreakdownError(DareIterationError):
    """迭代中途崩溃"""

    pass


class SteinBreakdownError(DareIterationError):
    """Newton 步的 Stein 方程无法求解"""

    pass


class MonotonicityViolatedError(DareIterationError):
    """迭代序列单调性被破坏"""

    pass


# ====================== 输入异常 ======================
class DareValidationError(DareError):
    """输入验证异常"""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class ProblemParseError(DareValidationError):
    """问题文件解析失败"""

    pass


class ProblemValidationError(DareValidationError):
    """问题文件内容无效"""

    pass


class UnknownExampleError(DareValidationError):
    """未知的内置示例"""

    pass
