#!/usr/bin/env python3
"""Finite-difference checks of the adjoint gradient and the Hessian-vector
product on the benchmark.

Usage: python3 scripts/check_derivatives.py [level [directions [seed]]]
"""

import sys

from ssnbilinear import benchmark_instance, format_verification, verify_derivatives


def main(argv):
    level = int(argv[0]) if len(argv) > 0 else 4
    directions = int(argv[1]) if len(argv) > 1 else 5
    seed = int(argv[2]) if len(argv) > 2 else 1234
    result = verify_derivatives(
        benchmark_instance(), level=level, directions=directions, seed=seed
    )
    print(format_verification(result))
    return 0 if result.passed else 3


if __name__ == "__main__":
    raise SystemExit(main(sys.argv[1:]))
