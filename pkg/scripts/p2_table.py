"""Tabulate the special fourth-order Painleve solution on a (X, T) grid by continuation in T."""
from __future__ import annotations

import csv
import sys
from dataclasses import dataclass

import numpy as np
from _common import parse_config, write

from hampert.p2 import build_table


@dataclass(frozen=True)
class TableConfig:
    T_min: float = -1.0
    T_max: float = 0.0
    n_T: int = 21
    L: float = 40.0
    N: int = 1601
    X_max: float = 6.0


def main(argv=None) -> int:
    cfg, out = parse_config(TableConfig, __doc__, argv)
    tab = build_table(np.linspace(cfg.T_min, cfg.T_max, cfg.n_T), cfg.L, cfg.N, X_max=cfg.X_max)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "p2_table.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(["X", "T", "U"])
        for j, T in enumerate(tab.T):
            for i, X in enumerate(tab.X):
                w.writerow([f"{X:.17g}", f"{T:.17g}", f"{tab.U[i, j]:.17g}"])
    write(out, "p2_table.json", {"T": tab.T.tolist(), "residuals": tab.residuals,
                                 "U00": float(tab.spline().ev(0.0, 0.0))})
    print(f"U(0; 0) = {float(tab.spline().ev(0.0, 0.0)):.10f}, "
          f"max Newton residual {max(tab.residuals):.2e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
