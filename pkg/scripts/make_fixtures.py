"""Regenerate the golden ASCII renderings of every builder under fixtures/.

Run after an intentional change to a transcription table; the golden-file
tests then pin the new rendering.
"""
from __future__ import annotations

import argparse
from dataclasses import dataclass
from pathlib import Path

from hampert.diffalg import render
from hampert.models import (ModelParams, build_hf_density, build_K_generator,
                            build_quasitriviality_map, build_riem2_rhs, build_second_poisson,
                            build_string_density, p_constraint_poly)


@dataclass
class FixtureConfig:
    out: Path = Path(__file__).resolve().parent.parent / "fixtures"


def renderings() -> dict[str, str]:
    """File name -> rendering for each builder with formal parameters."""
    return {
        "h_f_s_free.txt": build_hf_density(ModelParams(s_choice="free")).render(),
        "h_f_s_zero.txt": build_hf_density(ModelParams(s_choice="zero")).render(),
        "riem2.txt": build_riem2_rhs().render(),
        "K_generator.txt": build_K_generator().render(),
        "quasitriviality_map.txt": build_quasitriviality_map().render(),
        "second_poisson.txt": build_second_poisson().render(),
        "string_density.txt": build_string_density().render(),
        "string_density_printed.txt": build_string_density(include_missing_term=False).render(),
        "p_constraint.txt": render(p_constraint_poly()),
    }


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=FixtureConfig.out)
    cfg = FixtureConfig(out=ap.parse_args(argv).out)
    cfg.out.mkdir(parents=True, exist_ok=True)
    for name, text in renderings().items():
        (cfg.out / name).write_text(text + "\n", encoding="utf-8")
        print(f"wrote {cfg.out / name}")


if __name__ == "__main__":
    main()
