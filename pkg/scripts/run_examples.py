"""Print the loan walkthroughs: the path table for each, then the oracle verdict.

    python scripts/run_examples.py
"""

import sys
from pathlib import Path

from cogs.cli import main

LOAN = Path(__file__).resolve().parent.parent / "data" / "loan"

EXAMPLES = [
    ("rule Q1 only, no causal rules", ["--rules", str(LOAN / "decision_q1.rules")]),
    ("rules Q1 and Q2 with causal rule C1",
     ["--rules", str(LOAN / "decision.rules"), "--causal", str(LOAN / "causal.rules")]),
]


def run() -> int:
    worst = 0
    for title, extra in EXAMPLES:
        common = ["--schema", str(LOAN / "schema.txt"), "--instance", str(LOAN / "john.instance"), *extra]
        print(f"== {title}")
        worst = max(worst, main(["explain", *common]))
        print("verify: ", end="", flush=True)
        worst = max(worst, main(["verify", *common]))
        print()
    return worst


if __name__ == "__main__":
    sys.exit(run())
