#!/usr/bin/env python3
"""
Separator Toolkit Self-Check

Runs the test suite and a small end-to-end CLI session so a fresh checkout
can be confirmed working in one step.

Usage:
    python selfcheck.py

What this script does:
1. Checks the module files and the Python version
2. Runs pytest over the test_*.py files
3. Generates the lower-bound star, separates it and re-verifies the result
4. Prints a summary
"""

import json
import os
import subprocess
import sys
import tempfile

MODULES = [
    "errors.py",
    "config.py",
    "graph_core.py",
    "ordering.py",
    "reach_graph.py",
    "expander.py",
    "separator_engine.py",
    "applications.py",
    "cli.py",
]


def print_header(title):
    """Print a formatted header"""
    print("\n" + "=" * 60)
    print(f" {title}")
    print("=" * 60)


def print_step(step_num, description):
    """Print a formatted step"""
    print(f"\n[STEP {step_num}] {description}")
    print("-" * 40)


def run_command(arguments, description):
    """Run a Python command; returns (ok, stdout)"""
    try:
        result = subprocess.run([sys.executable] + arguments, capture_output=True, text=True, check=True)
        print(f"[OK] {description}")
        return True, result.stdout
    except subprocess.CalledProcessError as e:
        print(f"[ERROR] {description} failed with exit code {e.returncode}")
        if e.stderr:
            print(f"Error: {e.stderr.strip()}")
        if e.stdout:
            print(e.stdout.strip()[-2000:])
        return False, e.stdout


def check_environment():
    print_step(1, "Checking Environment")
    python_version = sys.version_info
    if python_version < (3, 8):
        print(f"[ERROR] Python 3.8+ required, found {python_version.major}.{python_version.minor}")
        return False
    print(f"[OK] Python {python_version.major}.{python_version.minor}.{python_version.micro}")

    missing = [name for name in MODULES if not os.path.exists(name)]
    for name in missing:
        print(f"[ERROR] {name} not found")
    if not os.path.exists(".env"):
        print("[WARNING] .env file not found - defaults apply (see env.example)")
    return not missing


def run_tests():
    print_step(2, "Running Test Suite")
    ok, _ = run_command(["-m", "pytest", "-q"], "pytest")
    return ok


def run_cli_session():
    print_step(3, "End-to-End CLI Session")
    with tempfile.TemporaryDirectory() as workdir:
        prefix = os.path.join(workdir, "star9")
        ok, _ = run_command(["cli.py", "gen", "star", "9", "--lower-bound-costs", "--out", prefix], "gen star 9")
        if not ok:
            return False
        graph, costs = f"{prefix}.graph", f"{prefix}.costs"
        ok, output = run_command(
            ["cli.py", "separate", "--graph", graph, "--costs", costs, "-t", "5", "-a", "1"], "separate -t 5"
        )
        if not ok:
            return False
        document = json.loads(output)
        print(f"Separator {document['separator']}, outliers {document['outliers']}")
        result = os.path.join(workdir, "result.json")
        with open(result, "w", encoding="utf-8") as f:
            json.dump(document, f)
        ok, _ = run_command(
            ["cli.py", "verify", "--graph", graph, "--costs", costs, "--result", result], "verify result"
        )
        return ok


def main():
    print_header("SEPARATOR TOOLKIT SELF-CHECK")

    steps_success = [check_environment()]
    steps_success.append(run_tests())
    steps_success.append(run_cli_session())

    if all(steps_success):
        print_header("SELF-CHECK COMPLETE")
        print("\nNext steps:")
        print("- python cli.py --help")
        print("- python cli.py analyze --graph <file> --radii 1,2 --exact")
        return 0
    print_header("SELF-CHECK FAILED")
    print("Some steps failed. Please check the errors above.")
    print("\nCommon issues:")
    print("- Python dependencies not installed (pip install -r requirements.txt)")
    print("- SEP_EXACT_CAPS set too low in .env")
    return 1


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        print("\n\n[INTERRUPTED] Self-check cancelled by user")
        sys.exit(1)
