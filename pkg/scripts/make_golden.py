#!/usr/bin/env python3
"""Regenerate the bundled synthetic fixture and its frozen golden report.

Run from the repository root:

    python3 scripts/make_golden.py

Both outputs are deterministic functions of the generator seed, so a clean
checkout reproduces them byte-for-byte.
"""

from pathlib import Path

from fuzzsig.evaluate import emit_report, run_portfolio
from fuzzsig.fixtures import DEFAULT_SEED, portfolio_fixture
from fuzzsig.market_data import serialize_csv

DATA_DIR = Path(__file__).resolve().parent.parent / "tests" / "data"


def main() -> None:
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    basket = portfolio_fixture(seed=DEFAULT_SEED, symbols=10, periods=52)
    fixture_path = DATA_DIR / "portfolio_fixture.csv"
    fixture_path.write_bytes(serialize_csv(basket))
    report = run_portfolio(basket)
    golden_path = DATA_DIR / "golden_portfolio.csv"
    golden_path.write_bytes(emit_report(report, "csv"))
    print(f"wrote {fixture_path} ({fixture_path.stat().st_size} bytes)")
    print(f"wrote {golden_path} ({golden_path.stat().st_size} bytes)")


if __name__ == "__main__":
    main()
