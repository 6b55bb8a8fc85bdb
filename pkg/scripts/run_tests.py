"""
Test Runner for fusionkit Unit Tests
Runs all unit tests with proper organization and reporting

Usage:
    python scripts/run_tests.py
    python scripts/run_tests.py --ticket FK-CORE-001
    python scripts/run_tests.py --fast
"""

import argparse
import subprocess
import sys
from datetime import datetime
from pathlib import Path

ROOT = Path(__file__).parent.parent


def run_pytest_tests(test_pattern=None, fast=False):
    """Run pytest unit tests"""
    print("🧪 Running Unit Tests with pytest...")

    cmd = [sys.executable, '-m', 'pytest', '-v', '--tb=short']

    if test_pattern:
        cmd.extend(['-k', test_pattern])

    if fast:
        cmd.extend(['-m', 'not slow'])

    cmd.append('tests/unittest/')

    try:
        result = subprocess.run(cmd, capture_output=True, text=True, timeout=1800, cwd=ROOT)

        print("STDOUT:")
        print(result.stdout)

        if result.stderr:
            print("STDERR:")
            print(result.stderr)

        return result.returncode == 0
    except subprocess.TimeoutExpired:
        print("❌ Tests timed out")
        return False
    except Exception as e:
        print(f"❌ Error running tests: {e}")
        return False


def main():
    """Main test runner"""
    parser = argparse.ArgumentParser(description='Run fusionkit Tests')
    parser.add_argument('--ticket', help='Run tests for specific ticket (e.g., FK-CORE-001)')
    parser.add_argument('--fast', action='store_true', help='Skip tests marked slow')

    args = parser.parse_args()

    print("🚀 fusionkit - Test Runner")
    print(f"🕐 Started at: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")
    print("=" * 60)

    test_pattern = None
    if args.ticket:
        test_pattern = args.ticket.replace('-', '_')

    success = run_pytest_tests(test_pattern, fast=args.fast)

    print("\n" + "=" * 60)
    print(f"{'✅ PASS' if success else '❌ FAIL'} Unit Tests")
    print(f"\n🕐 Completed at: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")
    return success


if __name__ == '__main__':
    try:
        success = main()
        sys.exit(0 if success else 1)
    except KeyboardInterrupt:
        print("\n⚠️  Testing cancelled by user")
        sys.exit(1)
