"""
测试命令行工具
"""

import json
import os
from unittest.mock import patch

import pytest

from extremal_dare.acceptance import CriterionResult
from extremal_dare.cli import (
    EXIT_ACCEPTANCE,
    EXIT_CONVERGENCE,
    EXIT_OK,
    EXIT_USAGE,
    EXIT_VALIDATION,
    create_parser,
    run_cli,
)


class TestParser:
    """测试参数解析"""

    def test_solve_defaults(self):
        """测试求解命令默认值"""
        args = create_parser().parse_args(["solve", "--example", "ex4"])

        assert args.method == "afpi"
        assert args.r == 2
        assert args.target == "all"
        assert args.tol is None
        assert args.max_iter == 200

    def test_problem_and_example_exclusive(self):
        """测试 --problem 与 --example 互斥"""
        assert run_cli(["solve", "--problem", "p.json", "--example", "ex1"]) == (
            EXIT_USAGE
        )

    def test_unknown_example(self, capsys):
        """测试未知示例"""
        assert run_cli(["solve", "--example", "ex9"]) == EXIT_USAGE
        assert "参数错误" in capsys.readouterr().err

    def test_no_command(self):
        """测试未给出命令"""
        assert run_cli([]) == EXIT_USAGE

    def test_help(self):
        """测试帮助信息"""
        assert run_cli(["--help"]) == EXIT_OK


class TestSolveCommand:
    """测试求解命令"""

    def test_solve_example(self, capsys):
        """测试求解内置示例"""
        assert run_cli(["solve", "--example", "ex1"]) == EXIT_OK

        out = capsys.readouterr().out
        assert "✅ X₊,M" in out
        assert "❌ X₋,m 跳过" in out
        assert "λ=0.5" in out

    def test_solve_with_outputs(self, tmp_path):
        """测试写出报告与收敛历史"""
        report_path = tmp_path / "report.json"
        history_path = tmp_path / "history.csv"

        code = run_cli(
            [
                "solve",
                "--example",
                "ex4",
                "--r",
                "4",
                "--json",
                str(report_path),
                "--history",
                str(history_path),
            ]
        )

        assert code == EXIT_OK
        payload = json.loads(report_path.read_text(encoding="utf-8"))
        assert set(payload["solutions"]) == {"x_pM", "x_pm", "x_mM", "x_mm"}
        assert payload["route"] == "dual afpi(4)"
        lines = history_path.read_text(encoding="utf-8").splitlines()
        assert lines[0].startswith("k,nres_xhat,nres_h")

    def test_solve_problem_file(self, tmp_path):
        """测试求解问题文件"""
        path = tmp_path / "problem.json"
        path.write_text(
            json.dumps(
                {
                    "n": 2,
                    "m": 1,
                    "A": [[3.0, 0.0], [0.0, 0.5]],
                    "B": [[1.0], [0.0]],
                    "R": [[1.0]],
                    "C": [[0.0, 1.0]],
                }
            ),
            encoding="utf-8",
        )

        assert run_cli(["solve", "--problem", str(path), "--method", "newton"]) == (
            EXIT_OK
        )

    def test_feedback_file(self, tmp_path):
        """测试指定镇定反馈"""
        path = tmp_path / "feedback.json"
        path.write_text(json.dumps([[3.0, 0.0]]), encoding="utf-8")

        assert run_cli(
            ["solve", "--example", "ex1", "--feedback", str(path)]
        ) == EXIT_OK

    def test_invalid_feedback_file(self, tmp_path, capsys):
        """测试反馈文件不是行列表"""
        path = tmp_path / "feedback.json"
        path.write_text(json.dumps([3.0, 0.0]), encoding="utf-8")

        code = run_cli(["solve", "--example", "ex1", "--feedback", str(path)])

        assert code == EXIT_VALIDATION
        assert "feedback" in capsys.readouterr().err

    def test_complex_feedback_file(self, tmp_path):
        """测试复数元素的反馈文件"""
        path = tmp_path / "feedback.json"
        path.write_text(json.dumps([[[3.0, 0.0], 0.0]]), encoding="utf-8")

        assert run_cli(
            ["solve", "--example", "ex1", "--feedback", str(path)]
        ) == EXIT_OK

    def test_missing_problem_file(self, tmp_path, capsys):
        """测试问题文件不存在"""
        code = run_cli(["solve", "--problem", str(tmp_path / "missing.json")])

        assert code == EXIT_VALIDATION
        assert "输入错误" in capsys.readouterr().err

    def test_invalid_problem_file(self, tmp_path):
        """测试问题文件内容无效"""
        path = tmp_path / "bad.json"
        path.write_text(
            json.dumps(
                {"n": 1, "m": 1, "A": [2.0], "B": [1.0], "R": [0.0], "H": [1.0]}
            ),
            encoding="utf-8",
        )

        assert run_cli(["solve", "--problem", str(path)]) == EXIT_VALIDATION

    def test_invalid_r(self, capsys):
        """测试 r < 2"""
        assert run_cli(["solve", "--example", "ex1", "--r", "1"]) == EXIT_USAGE
        assert "--r" in capsys.readouterr().err

    def test_no_solution(self, tmp_path):
        """测试不可镇定问题没有半正定解"""
        path = tmp_path / "unstabilizable.json"
        path.write_text(
            json.dumps(
                {
                    "n": 2,
                    "m": 1,
                    "A": [[2.0, 0.0], [0.0, 2.0]],
                    "B": [[1.0], [0.0]],
                    "R": [[1.0]],
                    "H": [[1.0, 0.0], [0.0, 1.0]],
                }
            ),
            encoding="utf-8",
        )

        code = run_cli(["solve", "--problem", str(path), "--target", "psd"])

        assert code == EXIT_CONVERGENCE

    def test_invalid_seed_env(self, capsys):
        """测试无效的 DARE_SEED"""
        with patch.dict(os.environ, {"DARE_SEED": "not-a-number"}):
            code = run_cli(["solve", "--example", "ex1"])

        assert code == EXIT_USAGE
        assert "配置错误" in capsys.readouterr().err


class TestCheckCommand:
    """测试结构检查命令"""

    def test_check_example(self, capsys):
        """测试检查内置示例"""
        assert run_cli(["check", "--example", "ex1"]) == EXIT_OK

        out = capsys.readouterr().out
        assert "✅ (A,B) 可镇定" in out
        assert "❌ (A,C) 可检测" in out
        assert "λ=0.5" in out

    def test_check_without_output_matrix(self, capsys):
        """测试未给出 C 时不判定可检测性"""
        assert run_cli(["check", "--example", "ex4"]) == EXIT_OK

        assert "— (A,C) 可检测" in capsys.readouterr().out

    def test_check_missing_file(self, tmp_path):
        """测试问题文件不存在"""
        code = run_cli(["check", "--problem", str(tmp_path / "missing.json")])

        assert code == EXIT_VALIDATION


class TestVerifyCommand:
    """测试验收命令"""

    def test_verify_subset(self, capsys):
        """测试只运行部分验收项"""
        assert run_cli(["verify", "--only", "1", "2", "--seed", "5"]) == EXIT_OK

        out = capsys.readouterr().out
        assert "seed=5" in out
        assert "通过: 2/2" in out

    def test_verify_failure(self, capsys):
        """测试验收失败"""
        failing = [CriterionResult(name="1. ex1 exactness", passed=False, detail="x")]

        with patch(
            "extremal_dare.cli.run_acceptance", return_value=failing
        ) as mock_run:
            code = run_cli(["verify"])

        assert code == EXIT_ACCEPTANCE
        mock_run.assert_called_once()
        assert "❌ 1. ex1 exactness" in capsys.readouterr().out

    def test_verify_seed_from_env(self):
        """测试种子来自环境变量"""
        with patch.dict(os.environ, {"DARE_SEED": "42"}):
            with patch("extremal_dare.cli.run_acceptance", return_value=[]) as mock_run:
                code = run_cli(["verify"])

        assert code == EXIT_OK
        assert mock_run.call_args.kwargs["seed"] == 42

    @pytest.mark.slow
    def test_verify_full_suite(self):
        """测试完整验收套件"""
        assert run_cli(["verify", "--suite", "paper"]) == EXIT_OK
