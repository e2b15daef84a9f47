"""Distance between simulations and the quasitriviality map of the characteristic solution."""
from __future__ import annotations

import sys

from _common import parse_config, write

from hampert.universality import QuasiRun, quasitriviality_compare


def main(argv=None) -> int:
    cfg, out = parse_config(QuasiRun, __doc__, argv)
    rep = quasitriviality_compare(cfg)
    write(out, "quasi.json", rep)
    for e, r in zip(rep["eps"], rep["residuals"]):
        print(f"eps {e:<6} sup|u - Q(v)| {r:.3e}")
    need = 5 if cfg.max_order >= 4 else 3
    print(f"slope {rep['slope']:.2f} (need >= {need})")
    return 0 if rep["slope"] >= need else 1


if __name__ == "__main__":
    sys.exit(main())
