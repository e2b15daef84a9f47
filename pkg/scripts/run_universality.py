"""Compare simulations with the universal critical profile over an eps sweep and fit the exponent."""
from __future__ import annotations

import json
import sys

from _common import parse_config, write

from hampert.universality import UniversalityRun, run_universality


def main(argv=None) -> int:
    cfg, out = parse_config(UniversalityRun, __doc__, argv)
    report = json.loads(run_universality(cfg).to_json())
    write(out, "universality.json", report)
    fit = report["fit"]
    for c in report["comparisons"]:
        print(f"eps {c['eps']:<6} residual {c['residual']:.3e}  amplitude error {c['amplitude_error']:.1%}")
    print(f"slope {fit['slope']:.3f} +- {fit['stderr']:.3f} (target 4/7 = 0.571)")
    return 0 if 0.42 <= fit["slope"] <= 0.72 else 1


if __name__ == "__main__":
    sys.exit(main())
