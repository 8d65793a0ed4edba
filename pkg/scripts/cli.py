"""Development commands exposed as Poetry scripts."""

import argparse
import os
import subprocess
import sys
from typing import List

PACKAGE = "copula_qaoa"
SUITES = {"unit": "tests/unit", "integration": "tests/integration", "e2e": "tests/e2e"}


def run_command(command: List[str], description: str) -> int:
    """Run ``command`` and return its exit code.

    Args:
    ----
        command: Program and arguments
        description: Label printed before the command

    Returns:
    -------
        The exit code of the command

    """
    print(f"Running: {description}")
    print(f"Command: {' '.join(command)}")
    print("-" * 40)
    return subprocess.run(command, text=True, check=False).returncode


def run_tests() -> int:
    """Run pytest; ``--fast`` skips the desk-scale acceptance runs."""
    parser = argparse.ArgumentParser(description="Run the copula-QAOA test suite")
    parser.add_argument("--coverage", "-c", action="store_true", help="report coverage")
    parser.add_argument("--html", "-r", action="store_true", help="also write HTML coverage")
    parser.add_argument("--parallel", "-p", action="store_true", help="run with pytest-xdist")
    parser.add_argument("--fast", "-f", action="store_true", help="deselect slow tests")
    parser.add_argument("--suite", choices=sorted(SUITES), help="run one test directory")
    parser.add_argument("--test", "-t", help="run a specific test path")
    args = parser.parse_args()

    command = ["pytest"]
    if args.parallel:
        command.extend(["-n", "auto"])
    if args.coverage or args.html:
        command.append(f"--cov={PACKAGE}")
    if args.html:
        command.append("--cov-report=html")
    if args.fast:
        command.extend(["-m", "not slow"])
    if args.test:
        command.append(args.test)
    elif args.suite:
        command.append(SUITES[args.suite])
    return run_command(command, "tests")


def run_lint() -> int:
    """Run ruff and mypy; stop at the first failure."""
    steps = [
        (["ruff", "check", PACKAGE, "tests", "scripts"], "Ruff linting"),
        (["ruff", "format", "--check", PACKAGE, "tests", "scripts"], "Ruff format check"),
        (["mypy", PACKAGE], "Mypy type checking"),
    ]
    for command, description in steps:
        code = run_command(command, description)
        if code != 0:
            return code
    return 0


def run_format() -> int:
    """Apply ruff formatting and auto-fixes."""
    code = run_command(["ruff", "format", PACKAGE, "tests", "scripts"], "Ruff formatting")
    if code != 0:
        return code
    return run_command(["ruff", "check", "--fix", PACKAGE, "tests", "scripts"], "Ruff auto-fixes")


def run_check_all() -> int:
    """Run linting, then the test suite, then pre-commit hooks when configured."""
    print("=== Linting ===")
    code = run_lint()
    if code != 0:
        print("Linting failed.")
        return code

    print("\n=== Tests ===")
    code = run_tests()
    if code != 0:
        print("Tests failed.")
        return code

    if os.path.exists(".pre-commit-config.yaml"):
        print("\n=== Pre-commit hooks ===")
        code = run_command(["pre-commit", "run", "--all-files"], "pre-commit hooks")
        if code != 0:
            print("Pre-commit hooks failed.")
            return code

    print("\nAll checks passed.")
    return 0


def list_commands() -> int:
    """Print the command reference."""
    print("=== copula-QAOA command reference ===")
    print("")
    print("Toolkit:")
    print("  poetry run copqaoa gen --n 16 --seed 1 --out inst.txt")
    print("  poetry run copqaoa solve --method dp --instance inst.txt --seed 1 --out runs/dp")
    print("  poetry run copqaoa qaoa-train --instance inst.txt --seed 1 --depth 3 --out runs/p3")
    print("  poetry run copqaoa qaoa-grid --instance inst.txt --seed 1 --out runs/grid")
    print("  poetry run copqaoa uc-scan --n 20 --seed 1 --out runs/uc")
    print("  poetry run copqaoa report --instance inst.txt --samples runs/p3/samples.csv")
    print("  poetry run copqaoa replay runs/p3/manifest.json --out runs/p3-again")
    print("")
    print("Development:")
    print("  poetry run test [--fast] [--suite unit|integration|e2e] [--coverage] [--parallel]")
    print("  poetry run lint")
    print("  poetry run format")
    print("  poetry run check")
    print("  poetry run help")
    print("")
    print("Shell scripts:")
    print("  ./scripts/test.sh       same options as 'poetry run test'")
    print("  ./scripts/lint.sh")
    print("  ./scripts/format.sh")
    print("  ./scripts/check-all.sh")
    return 0


if __name__ == "__main__":
    sys.exit(run_check_all())
