"""Run the bundled identity suite on every built-in fixture and print one line each.

    python scripts/verify_fixtures.py [--level quick|full] [--seed N]
"""

from __future__ import annotations

import argparse
import sys
import time

from mpogauge.category import build_fibonacci_mpo
from mpogauge.fixtures import ONSITE_FIXTURES, anomalous_fixture, onsite_fixture
from mpogauge.suite import LEVELS, SuiteConfig, run_suite


def fixtures():
    for name in ONSITE_FIXTURES:
        yield f"on-site {name}", onsite_fixture(name)
    yield "double-line Z2, trivial class", anomalous_fixture(2, 0)
    yield "double-line Z2, nontrivial class", anomalous_fixture(2, 1)
    yield "double-line Z3, nontrivial class", anomalous_fixture(3, 1)
    yield "Fibonacci", build_fibonacci_mpo()


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--level", choices=sorted(LEVELS), default="quick")
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)
    config = SuiteConfig(level=args.level, seed=args.seed)
    ok = True
    for label, rep in fixtures():
        t0 = time.perf_counter()
        rpt = run_suite(rep, config)
        cls = rpt.meta.get("anomaly_class", "-")
        print(f"{label:34s} {rpt.summary_line()}, class {cls}, {time.perf_counter() - t0:.2f}s")
        for s in rpt.meta.get("skipped", []):
            print(f"{'':34s} skipped: {s}")
        ok &= rpt.passed
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
