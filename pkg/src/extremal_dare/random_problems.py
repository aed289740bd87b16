"""
随机测试数据生成

半群验证、验收套件与测试共用的随机矩阵和随机 DARE 问题。
"""

from typing import Optional

import numpy as np
import scipy.linalg

from .iteration_models import TripleState
from .matrix_kernel import spectral_norm, spectral_radius, symmetric_part
from .riccati_models import DareProblem


def random_complex(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    """实部、虚部独立标准正态的复矩阵"""
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """复高斯矩阵 QR 分解的 Q 因子，按 R 的对角相位归一"""
    q, r = scipy.linalg.qr(random_complex(rng, n, n))
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_stable_matrix(
    rng: np.random.Generator, n: int, radius: float = 0.9
) -> np.ndarray:
    """谱半径不超过 radius 的随机矩阵"""
    a = random_complex(rng, n, n)
    rho = spectral_radius(a)
    return a * (radius * rng.uniform(0.2, 1.0) / rho) if rho > 0 else a


def random_psd(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    """谱范数不超过 scale 的随机半正定矩阵"""
    factor = random_complex(rng, n, n)
    m = factor @ factor.conj().T
    return symmetric_part(m * (scale * rng.uniform(0.1, 1.0) / spectral_norm(m)))


def random_triple(rng: np.random.Generator, n: int) -> TripleState:
    """ρ(A) ≤ 0.9、G 与 H 半正定且范数不超过 1 的三元组"""
    return TripleState(
        a_k=random_stable_matrix(rng, n),
        g_k=random_psd(rng, n),
        h_k=random_psd(rng, n),
    )


def random_stabilizable_problem(
    rng: np.random.Generator,
    n: int,
    m: int,
    p: Optional[int] = None,
    name: str = "random",
) -> DareProblem:
    """
    随机 DARE 问题

    A = Q₁·diag(s)·Q₂，奇异值 s ∈ [0.3, 2.5]，因此 A 非奇异且一般含单位圆外特征值；
    随机 B 使 (A,B) 几乎必然可控；H = CᴴC，C 为 p×n 随机矩阵。

    Args:
        rng: 随机数生成器
        n: 状态维数
        m: 输入维数
        p: 输出维数，缺省为 n
        name: 问题名称
    """
    p = n if p is None else p
    s = rng.uniform(0.3, 2.5, size=n)
    a = random_unitary(rng, n) @ np.diag(s) @ random_unitary(rng, n)
    b = random_complex(rng, n, m)
    r_factor = random_complex(rng, m, m)
    r = r_factor @ r_factor.conj().T + np.eye(m)
    c = random_complex(rng, p, n) / np.sqrt(n)
    return DareProblem(a=a, b=b, r=(r + r.conj().T) / 2, c=c, name=name)
