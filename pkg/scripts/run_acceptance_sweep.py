"""
Script to run the verification battery over the acceptance grid
Prints one summary line per parameter pair and exits nonzero on any failure
"""

import argparse
import sys
from pathlib import Path

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from common.exceptions import OscillatorError
from common.logging import configure_logging, get_logger
from oscillator.deformation import derive, make_params
from oscillator.verification import run_verification

logger = get_logger(__name__)

ACCEPTANCE_GRID = [
    (0.1, 0.2),
    (0.05, 0.4),
    (0.3, 0.3),
    (0.2, 0.1),
    (0.0, 0.3),
    (0.0, 0.0),
]


def main():
    """Run every pair of the grid and print the summary"""
    parser = argparse.ArgumentParser(description='Run the verification battery over the acceptance grid')
    parser.add_argument('--dim', type=int, default=400, help='Oracle dimension (default: 400)')
    parser.add_argument('--n-max', type=int, default=10, help='Highest level checked (default: 10)')
    args = parser.parse_args()

    configure_logging()
    logger.info("Starting acceptance sweep", pairs=len(ACCEPTANCE_GRID), dim=args.dim)

    failures = 0
    print("\n" + "=" * 60)
    print("Acceptance Sweep Summary")
    print("=" * 60)

    for alpha, beta in ACCEPTANCE_GRID:
        try:
            report = run_verification(derive(make_params(alpha, beta)), n_max=args.n_max, dim=args.dim)
        except OscillatorError as e:
            failures += 1
            print(f"✗ alpha={alpha}, beta={beta}: ERROR - {e}")
            continue

        skipped = sum(1 for check in report.checks if check.status == "skipped")
        if report.passed:
            print(f"✓ alpha={alpha}, beta={beta} ({report.regime.value}): "
                  f"{len(report.checks) - skipped} passed, {skipped} skipped")
        else:
            failures += 1
            print(f"✗ alpha={alpha}, beta={beta} ({report.regime.value}): "
                  f"FAILED {', '.join(report.failed_checks() + report.errored_checks())}")

    print("\n" + "=" * 60)
    if failures:
        print(f"✗ {failures} of {len(ACCEPTANCE_GRID)} parameter pairs failed")
        sys.exit(4)
    print("✓ All parameter pairs passed")


if __name__ == "__main__":
    main()
