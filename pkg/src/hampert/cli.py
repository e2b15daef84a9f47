"""Command-line entry point: ``hampert <command> [options]``.

Exit codes: 0 all checks pass, 1 a verification or acceptance check failed,
2 configuration error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import dataclasses
import hashlib
import json
import os
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------- config

def load_config(path: str | None) -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";",))
    cp.optionxform = str  # keys are case sensitive (N, L, Lx)
    if path:
        if not Path(path).is_file():
            raise ConfigError(f"config file {path!r} not found")
        try:
            cp.read(path, encoding="utf-8")
        except configparser.Error as exc:
            raise ConfigError(str(exc)) from exc
    return cp


def _convert(text: str, default):
    text = text.strip()
    try:
        if isinstance(default, bool):
            low = text.lower()
            if low not in ("true", "false", "yes", "no", "1", "0", "on", "off"):
                raise ValueError(text)
            return low in ("true", "yes", "1", "on")
        if isinstance(default, int) and not isinstance(default, bool):
            return int(text)
        if isinstance(default, float):
            return float(text)
        if isinstance(default, tuple):
            items = [s.strip() for s in text.split(",") if s.strip()]
            if default and isinstance(default[0], int) and not isinstance(default[0], bool):
                return tuple(int(s) for s in items)
            return tuple(float(s) for s in items)
    except ValueError as exc:
        raise ConfigError(f"cannot read {text!r} as {type(default).__name__}") from exc
    if default is None and text.lower() in ("none", ""):
        return None
    if default is None and text.lower() in ("true", "false"):
        return text.lower() == "true"
    return text


def build_dataclass(cls, cp: configparser.ConfigParser, section: str, overrides: dict | None = None):
    """Instantiate ``cls`` from a config section; unknown keys are errors."""
    fields = {f.name: f for f in dataclasses.fields(cls)}
    defaults = cls()
    kwargs = {}
    if cp.has_section(section):
        for key, text in cp.items(section):
            if key not in fields:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
            kwargs[key] = _convert(text, getattr(defaults, key))
    for key, val in (overrides or {}).items():
        if val is not None:
            kwargs[key] = val
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[{section}]: {exc}") from exc


def _jsonable(obj):
    if dataclasses.is_dataclass(obj):
        return _jsonable(dataclasses.asdict(obj))
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, (float, int, str, bool)) or obj is None:
        return obj
    return str(obj)


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def content_hash(obj) -> str:
    canon = json.dumps(_jsonable(obj), sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def threads() -> int:
    try:
        return max(1, int(os.environ.get("HAMPERT_THREADS", "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------- run directory

class Run:
    """Owns one output directory and its manifest."""

    def __init__(self, command: str, config: dict, out: str | None):
        self.command = command
        self.config = config
        self.hash = content_hash({"command": command, "config": config})
        self.dir = Path(out) if out else Path("hampert-runs") / f"{command.replace(' ', '-')}-{self.hash[:12]}"
        self.dir.mkdir(parents=True, exist_ok=True)
        self.files: list[str] = []
        self.started = datetime.now(timezone.utc).isoformat()

    def path(self, name: str) -> Path:
        p = (self.dir / name).resolve()
        if self.dir.resolve() not in p.parents and p != self.dir.resolve():
            raise ConfigError(f"refusing to write {name!r} outside {self.dir}")
        p.parent.mkdir(parents=True, exist_ok=True)
        self.files.append(name)
        return p

    def write_json(self, name: str, obj) -> None:
        self.path(name).write_text(dumps(obj), encoding="utf-8")

    def write_csv(self, name: str, header, rows) -> None:
        with open(self.path(name), "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\r\n")
            w.writerow(header)
            for row in rows:
                w.writerow([f"{v:.17g}" if isinstance(v, (float, np.floating)) else v for v in row])

    def finish(self, passed: bool, summary: dict) -> None:
        inventory = []
        for name in sorted(set(self.files)):
            data = (self.dir / name).read_bytes()
            inventory.append({"file": name, "sha256": hashlib.sha256(data).hexdigest(),
                              "bytes": len(data)})
        manifest = {"command": self.command, "config": self.config, "input_hash": self.hash,
                    "started": self.started, "finished": datetime.now(timezone.utc).isoformat(),
                    "outputs": inventory, "passed": passed, "summary": summary}
        (self.dir / "manifest.json").write_text(dumps(manifest), encoding="utf-8")


# ---------------------------------------------------------------- commands

def cmd_verify(args, cp) -> int:
    from .models import Mutation
    from . import verify as V
    mutation = None
    if args.mutate:
        try:
            mutation = Mutation.parse(args.mutate)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    cfg = {"theorem": args.theorem, "mutate": args.mutate, "unconstrained": args.unconstrained}
    run = Run(f"verify {args.theorem}", cfg, args.out)
    if args.theorem == "commuting-second":
        report = V.verify_commuting_second(mutation, constrained=not args.unconstrained)
        passed = report.passed if not args.unconstrained else (not report.passed and bool(
            report.notes.get("factor_check")))
    else:
        report = V.verify(args.theorem, mutation)
        passed = report.passed
    run.write_json("report.json", report.to_dict())
    run.finish(passed, {"status": report.status, "millis": report.millis})
    print(report.to_json())
    if not passed and report.first_failure() is not None:
        f = report.first_failure()
        print(f"FAIL {args.theorem}: order {f.order} ({f.check}) witness {f.witness}", file=sys.stderr)
    return EXIT_OK if passed else EXIT_FAIL


@dataclasses.dataclass(frozen=True)
class CatastropheConfig:
    a: str = "u"
    b: str = "-u-u^3"
    v_bracket: tuple = (-10.0, 10.0)


def cmd_catastrophe(args, cp) -> int:
    from .characteristics import CharacteristicData, find_catastrophe
    cfg = build_dataclass(CatastropheConfig, cp, "catastrophe",
                          {"a": args.a, "b": args.b,
                           "v_bracket": tuple(args.bracket) if args.bracket else None})
    data = _char_data(cfg.a, cfg.b, cfg.v_bracket)
    cpnt = find_catastrophe(data)
    run = Run("catastrophe", dataclasses.asdict(cfg), args.out)
    out = cpnt.to_dict()
    run.write_json("catastrophe.json", out)
    passed = max(cpnt.residuals) <= 1e-10
    run.finish(passed, out)
    print(dumps(out), end="")
    return EXIT_OK if passed else EXIT_FAIL


def _char_data(a, b, bracket):
    from . import exprfn
    from .characteristics import CharacteristicData
    try:
        return CharacteristicData(exprfn.parse(a), exprfn.parse(b), tuple(map(float, bracket)))
    except exprfn.ExprSyntaxError as exc:
        raise ConfigError(str(exc)) from exc


@dataclasses.dataclass(frozen=True)
class P2RunConfig:
    T: float = -10.0
    L: float = 40.0
    N: int = 1601
    tol: float = 1e-10
    T_min: float = -1.0
    T_max: float = 0.0
    n_T: int = 21
    T_start: float = -10.0
    delta: float = 0.0  # 0: 1e-3 max(1, |T|)


def cmd_p2(args, cp) -> int:
    from . import p2
    cfg = build_dataclass(P2RunConfig, cp, "p2", {"T": args.T, "L": args.L, "N": args.N})
    run = Run(f"p2 {args.action}", dataclasses.asdict(cfg), args.out)
    if args.action == "solve":
        if cfg.T <= -8:
            sol = p2.solve_bvp(cfg.T, cfg.L, cfg.N, tol=cfg.tol)
        else:
            ts = sorted(set([cfg.T_start] + list(np.arange(cfg.T_start, cfg.T, 1.0)[1:]) + [cfg.T]))
            sol = p2.continuation_in_T(ts, cfg.L, cfg.N, tol=cfg.tol)[-1]
        run.write_csv("p2_solution.csv", ["X", "U"], zip(sol.grid, sol.U))
        run.write_json("p2_solution.json", sol.to_meta())
        passed = sol.residual_norm <= max(cfg.tol, p2.rounding_floor(sol.U, sol.h))
        summary = sol.to_meta()
    elif args.action == "table":
        Tv = np.linspace(cfg.T_min, cfg.T_max, cfg.n_T)
        tab = p2.build_table(Tv, cfg.L, cfg.N, T_start=cfg.T_start, tol=cfg.tol)
        rows = [(float(x), float(t), float(tab.U[i, j])) for j, t in enumerate(tab.T)
                for i, x in enumerate(tab.X)]
        run.write_csv("p2_table.csv", ["X", "T", "U"], rows)
        summary = {"T": tab.T.tolist(), "residuals": tab.residuals, "N": int(tab.X.size)}
        run.write_json("p2_table.json", summary)
        passed = True
    else:  # kdv-check
        delta = cfg.delta or p2.default_delta(cfg.T)
        Ts = [cfg.T - delta, cfg.T, cfg.T + delta]
        if Ts[0] <= -8:
            base = p2.solve_bvp(Ts[0], cfg.L, cfg.N, tol=cfg.tol)
        else:
            base = p2.continuation_in_T(sorted(set([cfg.T_start, Ts[0]])), cfg.L, cfg.N, tol=cfg.tol)[-1]
        sols = [base] + [p2.solve_bvp(t, cfg.L, cfg.N, guess=base.U, tol=cfg.tol) for t in Ts[1:]]
        summary = p2.kdv_residual(*sols)
        summary["T"] = cfg.T
        run.write_json("kdv_check.json", summary)
        passed = summary["residual"] <= 1e-4
    run.finish(passed, summary)
    print(dumps(summary), end="")
    return EXIT_OK if passed else EXIT_FAIL


def cmd_simulate(args, cp) -> int:
    from .pde import SimConfig, monitor_invariants, simulate
    cfg = build_dataclass(SimConfig, cp, "simulate", {"eps": args.eps, "t_end": args.t_end})
    traj = simulate(cfg)
    run = Run("simulate", cfg.to_dict(), args.out)
    for i, (t, u) in enumerate(zip(traj.times, traj.u)):
        run.write_csv(f"snapshot_{i:03d}.csv", ["x", "u"], zip(traj.x, u))
    drifts = monitor_invariants(traj)
    manifest = traj.manifest()
    manifest.pop("wall_time")
    manifest["drifts"] = drifts
    run.write_json("trajectory.json", manifest)
    summary = {"drifts": drifts, "steps": traj.steps, "wall_time": traj.wall_time}
    passed = drifts["mean"] <= 1e-12
    run.finish(passed, summary)
    print(dumps(summary), end="")
    return EXIT_OK if passed else EXIT_FAIL


def cmd_universality(args, cp) -> int:
    from . import universality as uv
    summary: dict
    if args.action in ("compare", "fit"):
        run_cfg = build_dataclass(uv.UniversalityRun, cp, "universality")
        if args.action == "compare":
            eps = args.eps if args.eps is not None else run_cfg.eps_list[-1]
            idx = list(run_cfg.eps_list).index(eps) if eps in run_cfg.eps_list else -1
            run_cfg = dataclasses.replace(run_cfg, eps_list=(eps,), N_list=(run_cfg.N_list[idx],))
            report = _universality_single(uv, run_cfg)
            summary = report
            passed = report["amplitude_error"] <= 0.1
        else:
            report = uv.run_universality(run_cfg, workers=threads())
            summary = json.loads(report.to_json())
            slope = report.fit["slope"]
            amp = report.comparisons[-1]["amplitude_error"]
            passed = 0.42 <= slope <= 0.72 and amp <= 0.1
        run = Run(f"universality {args.action}", _jsonable(run_cfg), args.out)
        run.write_json("universality.json", summary)
        if args.action == "fit":
            run.write_csv("loglog.csv", ["log_eps", "log_residual"],
                          [(float(np.log(c["eps"])), float(np.log(c["residual"])))
                           for c in summary["comparisons"]])
    elif args.action == "quasi":
        run_cfg = build_dataclass(uv.QuasiRun, cp, "quasi")
        summary = uv.quasitriviality_compare(run_cfg, workers=threads())
        passed = summary["slope"] >= (5 if run_cfg.max_order >= 4 else 3)
        run = Run("universality quasi", _jsonable(run_cfg), args.out)
        run.write_json("quasi.json", summary)
        run.write_csv("loglog.csv", ["log_eps", "log_residual"],
                      [(float(np.log(e)), float(np.log(r))) for e, r in zip(summary["eps"], summary["residuals"])])
    else:  # string
        run_cfg = build_dataclass(uv.StringRun, cp, "string")
        summary = uv.string_study(run_cfg, workers=threads())
        passed = all(16 <= r <= 64 for r in summary["ratios"])
        run = Run("universality string", _jsonable(run_cfg), args.out)
        run.write_json("string.json", summary)
    run.finish(passed, summary)
    print(dumps(summary), end="")
    return EXIT_OK if passed else EXIT_FAIL


def _universality_single(uv, run_cfg) -> dict:
    report = uv.run_universality(run_cfg, fit=False)
    comp = report.comparisons[0]
    comp["frame"] = report.frame
    return comp


def cmd_specializations(args, cp) -> int:
    from . import exprfn
    from .models import p_from_cq, specializations
    rows = []
    passed = True
    for sp in specializations():
        try:
            p = p_from_cq(sp.c, sp.q)
            ok = exprfn.equal(p, sp.p)
        except ZeroDivisionError:
            p, ok = None, False
        passed &= ok
        rows.append({"name": sp.name, "c": exprfn.render(sp.c), "q": exprfn.render(sp.q),
                     "p_expected": exprfn.render(sp.p),
                     "p_from_cq": exprfn.render(p) if p is not None else None,
                     "s": exprfn.render(sp.s), "match": ok, "note": sp.note})
    run = Run("specializations", {}, args.out)
    run.write_json("specializations.json", rows)
    run.finish(passed, {"all_match": passed})
    print(dumps(rows), end="")
    return EXIT_OK if passed else EXIT_FAIL


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    from .verify import THEOREMS
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI file with one section per command")
    common.add_argument("--out", help="output directory (created; nothing is written elsewhere)")

    ap = argparse.ArgumentParser(prog="hampert", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="exact symbolic checks")
    v.add_argument("theorem", choices=THEOREMS)
    v.add_argument("--mutate", help="table:value:rel, table:#index:rel or table:old=new")
    v.add_argument("--unconstrained", action="store_true",
                   help="commuting-second: drop the constraint on p and check the factor")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("catastrophe", parents=[common], help="locate the gradient catastrophe")
    c.add_argument("--a")
    c.add_argument("--b")
    c.add_argument("--bracket", type=float, nargs=2, metavar=("LO", "HI"))
    c.set_defaults(func=cmd_catastrophe)

    p = sub.add_parser("p2", parents=[common], help="the fourth-order Painleve-type ODE")
    p.add_argument("action", choices=("solve", "table", "kdv-check"))
    p.add_argument("--T", type=float)
    p.add_argument("--L", type=float)
    p.add_argument("--N", type=int)
    p.set_defaults(func=cmd_p2)

    s = sub.add_parser("simulate", parents=[common], help="run the perturbed PDE")
    s.add_argument("--eps", type=float)
    s.add_argument("--t-end", dest="t_end", type=float)
    s.set_defaults(func=cmd_simulate)

    u = sub.add_parser("universality", parents=[common], help="numerical conjecture tests")
    u.add_argument("action", choices=("compare", "fit", "quasi", "string"))
    u.add_argument("--eps", type=float, help="compare: the eps to use")
    u.set_defaults(func=cmd_universality)

    sp = sub.add_parser("specializations", parents=[common], help="worked parameter examples")
    sp.set_defaults(func=cmd_specializations)
    return ap


_EXPR_OPTIONS = ("--a", "--b", "--mutate")


def _attach_expression_values(argv):
    """Let ``--b -u-u^3`` through: argparse would read the value as an option."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _EXPR_OPTIONS and i + 1 < len(argv) and argv[i + 1].startswith("-") \
                and not argv[i + 1].startswith("--"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def dispatch(argv=None) -> int:
    from .characteristics import CharacteristicsError
    from .exprfn import DomainError, ExprSyntaxError
    from .p2 import P2Error
    from .pde import ConfigInvalid, PDEError
    from .universality import UniversalityError
    ap = build_parser()
    try:
        args = ap.parse_args(_attach_expression_values(sys.argv[1:] if argv is None else list(argv)))
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        cp = load_config(args.config)
        return args.func(args, cp)
    except (ConfigError, ConfigInvalid, ExprSyntaxError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (P2Error, PDEError, CharacteristicsError, UniversalityError, DomainError,
            ZeroDivisionError, FloatingPointError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def main() -> None:
    t0 = time.perf_counter()
    code = dispatch()
    if os.environ.get("HAMPERT_TIMING"):
        print(f"elapsed {time.perf_counter() - t0:.2f} s", file=sys.stderr)
    sys.exit(code)


if __name__ == "__main__":
    main()
