"""
Extremal DARE CLI 工具
"""

import argparse
import json
import logging
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from pydantic import ValidationError

from .acceptance import run_acceptance
from .builtin_examples import ExpectedValues, builtin_example
from .config import ExampleConfig, SolverConfig
from .driver import ExtremalSolver
from .exceptions import (
    DareError,
    DareValidationError,
    ProblemParseError,
    ProblemValidationError,
)
from .iteration_models import IterationOptions
from .problem_file_models import FeedbackFile
from .report import SolveReport, read_problem_file, write_history_csv
from .riccati_models import DareProblem
from .structure import analyze

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_CONVERGENCE = 3
EXIT_ACCEPTANCE = 4

SOLUTION_LABELS = {
    "x_pM": "X₊,M",
    "x_pm": "X₊,m",
    "x_mM": "X₋,M",
    "x_mm": "X₋,m",
}


class _Parser(argparse.ArgumentParser):
    """用法错误以退出码 1 结束"""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        print(f"❌ 参数错误: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def main() -> None:
    """主函数"""
    sys.exit(run_cli())


def run_cli(argv: Optional[Sequence[str]] = None) -> int:
    """
    执行命令行

    Returns:
        int: 退出码，0 成功、1 用法错误、2 输入校验错误、3 收敛失败、4 验收失败
    """
    parser = create_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        config = SolverConfig()
    except ValueError as e:
        print(f"❌ 配置错误: {e}", file=sys.stderr)
        return EXIT_USAGE
    configure_logging(args.verbose, config.log_level)

    if args.command == "solve":
        return handle_solve_command(args, config)
    if args.command == "check":
        return handle_check_command(args)
    if args.command == "verify":
        return handle_verify_command(args, config)
    parser.print_help()
    return EXIT_USAGE


def configure_logging(verbose: int, level: str) -> None:
    """-v 为 INFO，-vv 为 DEBUG；未给出时使用 DARE_LOG_LEVEL"""
    if verbose >= 2:
        level = "DEBUG"
    elif verbose == 1:
        level = "INFO"
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def create_parser() -> argparse.ArgumentParser:
    """创建命令行解析器"""
    parser = _Parser(
        prog="extremal-dare",
        description="离散代数 Riccati 方程极值解求解工具",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
示例:
  extremal-dare solve --example ex1 --method afpi --r 2
  extremal-dare solve --example ex3 --eps 1 --r 100 --history ex3.csv
  extremal-dare solve --problem problem.json --target nsd --json report.json
  extremal-dare check --problem problem.json
  extremal-dare verify --suite paper
        """,
    )
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="日志详细程度 (-v, -vv)"
    )

    subparsers = parser.add_subparsers(dest="command", help="可用命令")

    # 求解命令
    solve_parser = subparsers.add_parser("solve", help="求解极值解")
    source = solve_parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--problem", help="问题文件 (JSON)")
    source.add_argument(
        "--example", choices=ExampleConfig.get_all_examples(), help="内置示例"
    )
    solve_parser.add_argument("--eps", type=float, default=0.0, help="ex3 的参数 ε")
    solve_parser.add_argument(
        "--method", choices=["afpi", "fpi", "newton"], default="afpi", help="迭代方法"
    )
    solve_parser.add_argument("--r", type=int, default=2, help="AFPI 加速因子 (≥2)")
    solve_parser.add_argument(
        "--target", choices=["all", "psd", "nsd"], default="all", help="求解目标"
    )
    solve_parser.add_argument(
        "--tol", type=float, help="NRes 停止阈值 (默认 1e-14，示例使用推荐值)"
    )
    solve_parser.add_argument("--max-iter", type=int, default=200, help="最大迭代次数")
    solve_parser.add_argument("--feedback", help="镇定反馈 F 的 JSON 文件")
    solve_parser.add_argument("--history", help="收敛历史 CSV 输出路径")
    solve_parser.add_argument("--json", help="JSON 报告输出路径")

    # 结构检查命令
    check_parser = subparsers.add_parser("check", help="结构性质检查")
    check_source = check_parser.add_mutually_exclusive_group(required=True)
    check_source.add_argument("--problem", help="问题文件 (JSON)")
    check_source.add_argument(
        "--example", choices=ExampleConfig.get_all_examples(), help="内置示例"
    )
    check_parser.add_argument("--eps", type=float, default=0.0, help="ex3 的参数 ε")

    # 验收命令
    verify_parser = subparsers.add_parser("verify", help="运行验收套件")
    verify_parser.add_argument(
        "--suite", choices=["paper"], default="paper", help="验收套件"
    )
    verify_parser.add_argument(
        "--only", nargs="+", help="只运行指定编号的验收项 (1-10)"
    )
    verify_parser.add_argument("--seed", type=int, help="随机种子 (默认 DARE_SEED)")

    return parser


def load_problem(
    args: argparse.Namespace,
) -> tuple[DareProblem, Optional[ExpectedValues]]:
    """按 --problem 或 --example 载入问题"""
    if args.problem:
        return read_problem_file(args.problem), None
    return builtin_example(args.example, eps=args.eps)


def load_feedback(path: str) -> np.ndarray:
    """读取反馈矩阵：JSON 行列表，复数元素写作 [re, im]"""
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise ProblemParseError(f"cannot read feedback file {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ProblemParseError(f"malformed feedback file: {e}") from e
    try:
        return FeedbackFile(f=payload).f
    except ValidationError as e:
        raise ProblemValidationError(
            f"feedback: {e.errors()[0]['msg']}", field="feedback"
        ) from e


def handle_solve_command(args: argparse.Namespace, config: SolverConfig) -> int:
    """处理求解命令"""
    try:
        if args.r < 2:
            print(f"❌ 参数错误: --r 必须不小于 2，当前为 {args.r}", file=sys.stderr)
            return EXIT_USAGE
        p, expected = load_problem(args)
        feedback = load_feedback(args.feedback) if args.feedback else None
        dual_feedback = None
        if expected is not None:
            feedback = feedback if feedback is not None else expected.feedback
            dual_feedback = expected.dual_feedback
        tol = args.tol or (expected.tol if expected else 1e-14)
        opts = IterationOptions(tol=tol, max_iter=args.max_iter)

        print(f"正在求解: {p.name or args.problem}")
        print(f"方法: {args.method}  r={args.r}  目标: {args.target}  tol={tol:g}")

        start = time.perf_counter()
        result = ExtremalSolver(config).solve_all(
            p,
            r=args.r,
            opts=opts,
            feedback=feedback,
            dual_feedback=dual_feedback,
            method=args.method,
            target=args.target,
        )
        wall_ms = (time.perf_counter() - start) * 1000.0

        print_summary(result.present(), result.diagnostics, result.skipped)
        print(f"耗时: {wall_ms:.1f} 毫秒")

        if args.history:
            run = result.reports.get("primal") or next(
                iter(result.reports.values()), None
            )
            if run is None:
                print("❌ 没有可导出的收敛历史", file=sys.stderr)
            else:
                print(f"✅ 收敛历史已保存到: {write_history_csv(run, args.history)}")
        if args.json:
            report = SolveReport.from_solutions(p, result, wall_ms)
            print(f"✅ 报告已保存到: {report.write(args.json)}")

        if not result.present():
            print("❌ 没有得到任何极值解", file=sys.stderr)
            return EXIT_CONVERGENCE
        return EXIT_OK

    except DareValidationError as e:
        print(f"❌ 输入错误: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except ValidationError as e:
        print(f"❌ 参数错误: {e.errors()[0]['msg']}", file=sys.stderr)
        return EXIT_USAGE
    except DareError as e:
        print(f"❌ 求解失败: {e}", file=sys.stderr)
        return EXIT_CONVERGENCE


def print_summary(solutions: dict, diagnostics: dict, skipped: dict[str, str]) -> None:
    """打印解的汇总表"""
    print("\n极值解:")
    print("-" * 72)
    print(f"{'解':<6} {'NRes':>11} {'ρ(T)':>11} {'μ(T)':>11} {'迭代':>6}  路线")
    for name, label in SOLUTION_LABELS.items():
        if name in solutions:
            d = diagnostics[name]
            iterations = "" if d.iterations is None else str(d.iterations)
            print(
                f"✅ {label:<4} {d.nres:>11.3e} {d.rho_t:>11.4g} {d.mu_t:>11.4g} "
                f"{iterations:>6}  {d.route or ''}"
            )
    for name, label in SOLUTION_LABELS.items():
        if name in skipped:
            print(f"❌ {label:<4} 跳过: {skipped[name]}")


def handle_check_command(args: argparse.Namespace) -> int:
    """处理结构检查命令"""
    try:
        p, _ = load_problem(args)
    except DareValidationError as e:
        print(f"❌ 输入错误: {e}", file=sys.stderr)
        return EXIT_VALIDATION

    report = analyze(p)
    print(f"问题: {p.name or args.problem}  (n={p.n}, m={p.m})")
    print("-" * 40)
    rows = [
        ("(A,B) 可镇定", report.stabilizable),
        ("(A,C) 可检测", report.detectable),
        ("(A,B) 可控", report.controllable),
        ("反镇定秩条件", report.antistab_rank_ok),
        ("A 非奇异", report.a_nonsingular),
    ]
    for label, value in rows:
        mark = "—" if value is None else ("✅" if value else "❌")
        print(f"{mark} {label}")
    if report.witnesses:
        print("\n见证:")
        for w in report.witnesses:
            print(f"  [{w.test}] {w.describe()} (秩亏 {w.rank_defect})")
    return EXIT_OK


def handle_verify_command(args: argparse.Namespace, config: SolverConfig) -> int:
    """处理验收命令"""
    seed = args.seed if args.seed is not None else config.seed
    print(f"运行验收套件 '{args.suite}' (seed={seed})")
    print("-" * 60)
    results = run_acceptance(seed=seed, only=args.only)
    for outcome in results:
        mark = "✅" if outcome.passed else "❌"
        print(f"{mark} {outcome.name}: {outcome.detail}")

    failed = [outcome for outcome in results if not outcome.passed]
    print(f"\n通过: {len(results) - len(failed)}/{len(results)}")
    return EXIT_ACCEPTANCE if failed else EXIT_OK


if __name__ == "__main__":
    main()
