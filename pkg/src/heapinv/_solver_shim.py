"""Run the z3 Python bindings on an .smt2 file, printing sat/unsat/unknown.

Fallback used when no standalone solver binary is installed; invoked as a
subprocess so the driver's process handling stays uniform.
"""

import sys


def main() -> int:
    try:
        import z3
    except ImportError:
        print("error: z3 bindings not available", file=sys.stderr)
        return 2
    if len(sys.argv) != 2:
        print("usage: python -m heapinv._solver_shim FILE.smt2", file=sys.stderr)
        return 2
    solver = z3.Solver()
    solver.from_file(sys.argv[1])
    print(solver.check())
    return 0


if __name__ == "__main__":
    sys.exit(main())
