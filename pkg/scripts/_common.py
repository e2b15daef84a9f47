"""Shared plumbing for the study scripts: dataclass configs from argv, JSON output."""
from __future__ import annotations

import argparse
import dataclasses
import json
from pathlib import Path

from hampert.cli import dumps


def parse_config(cls, description: str, argv=None):
    """One ``--field value`` option per dataclass field, plus ``--out``.

    Tuples are given as comma-separated lists.
    """
    ap = argparse.ArgumentParser(description=description)
    defaults = cls()
    for f in dataclasses.fields(cls):
        ap.add_argument(f"--{f.name.replace('_', '-')}", dest=f.name, default=None,
                        help=f"default {getattr(defaults, f.name)!r}")
    ap.add_argument("--out", type=Path, default=Path("study-output"))
    args = ap.parse_args(argv)
    kwargs = {}
    for f in dataclasses.fields(cls):
        text = getattr(args, f.name)
        if text is None:
            continue
        d = getattr(defaults, f.name)
        if isinstance(d, tuple):
            conv = int if d and isinstance(d[0], int) else float
            kwargs[f.name] = tuple(conv(s) for s in text.split(","))
        elif isinstance(d, bool):
            kwargs[f.name] = text.lower() in ("1", "true", "yes")
        elif isinstance(d, (int, float)):
            kwargs[f.name] = type(d)(text)
        else:
            kwargs[f.name] = text
    return cls(**kwargs), args.out


def write(out: Path, name: str, obj) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    path.write_text(dumps(obj), encoding="utf-8")
    return path


def load(path: Path):
    return json.loads(Path(path).read_text(encoding="utf-8"))
