"""Residual of the string relation on constant-c simulations for two eps values."""
from __future__ import annotations

import sys

from _common import parse_config, write

from hampert.universality import StringRun, string_study


def main(argv=None) -> int:
    cfg, out = parse_config(StringRun, __doc__, argv)
    rep = string_study(cfg)
    write(out, "string.json", rep)
    for e, r in zip(rep["eps"], rep["residuals"]):
        print(f"eps {e:<6} residual {r:.3e}")
    for r in rep["ratios"]:
        print(f"ratio {r:.1f} (2^5 = 32, 2^6 = 64)")
    return 0 if all(16 <= r <= 64 for r in rep["ratios"]) else 1


if __name__ == "__main__":
    sys.exit(main())
