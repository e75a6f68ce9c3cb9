"""Command-line front end.

::

    tdhsim simulate --config run.json [--out results.csv]
    tdhsim sweep    --config run.json --param eps --values 1e-3,1e-6 [--out sweep.csv]
    tdhsim verify   --config run.json

Exit codes: 0 success, 2 unreadable or invalid config, 3 a model or
precondition failure, 4 a convergence failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import dataclass, replace

import numpy as np

from . import blockenc as B
from . import matkernel as mk
from . import models as M
from . import tdsim as T
from .errors import ConvergenceError, TDHSimError

COLUMNS = (
    "model", "n", "t", "eps", "error_vs_expm", "error_vs_timeordered", "w_gate_uses",
    "encoding_uses", "jacobi_degree", "ancillas_peak", "commuting_pass", "runtime_ms",
)
SWEEP_PARAMS = ("eps", "t", "n", "steps")
EXIT_OK, EXIT_CONFIG, EXIT_PRECONDITION, EXIT_CONVERGENCE = 0, 2, 3, 4

_CONFIG_KEYS = {"model", "t", "eps", "mode", "force_noncommuting", "oracle_steps", "output_path"}
_REQUIRED_KEYS = {"model", "t", "eps"}


class ConfigError(Exception):
    """The configuration text is malformed or has unknown or missing keys."""


@dataclass(frozen=True)
class RunConfig:
    model: M.ModelSpec
    t: float
    eps: float
    mode: str = "effective-time"
    force_noncommuting: bool = False
    oracle_steps: int = 10_000
    output_path: str = "results.csv"


def parse_config(text: str) -> RunConfig:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    missing = _REQUIRED_KEYS - set(raw)
    if missing:
        raise ConfigError(f"missing config keys: {sorted(missing)}")
    m = raw["model"]
    if not isinstance(m, dict) or set(m) - {"name", "parameters", "notes"} or "name" not in m:
        raise ConfigError("model must be an object with 'name' and 'parameters'")
    spec = M.ModelSpec(str(m["name"]), dict(m.get("parameters", {})), str(m.get("notes", "")))
    try:
        cfg = RunConfig(
            spec, float(raw["t"]), float(raw["eps"]),
            str(raw.get("mode", "effective-time")),
            bool(raw.get("force_noncommuting", False)),
            int(raw.get("oracle_steps", 10_000)),
            str(raw.get("output_path", "results.csv")),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad config value: {exc}") from None
    if cfg.mode not in T.MODES:
        raise ConfigError(f"mode must be one of {T.MODES}")
    if cfg.oracle_steps < 1:
        raise ConfigError("oracle_steps must be positive")
    if spec.name not in M.MODEL_NAMES:
        raise ConfigError(f"unknown model {spec.name!r}")
    return cfg


def config_to_dict(cfg: RunConfig) -> dict:
    model = {"name": cfg.model.name, "parameters": cfg.model.parameters}
    if cfg.model.notes:
        model["notes"] = cfg.model.notes
    return {
        "model": model, "t": cfg.t, "eps": cfg.eps, "mode": cfg.mode,
        "force_noncommuting": cfg.force_noncommuting, "oracle_steps": cfg.oracle_steps,
        "output_path": cfg.output_path,
    }


def load_config(path: str) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return "inf" if not np.isfinite(x) else repr(x)
    return str(x)


def run_row(cfg: RunConfig, deterministic: bool = False) -> dict:
    """Simulate one configuration and compare against both oracles."""
    start = time.perf_counter()
    td = M.build_model(cfg.model)
    report = T.check_commuting(td)
    ledger = B.QueryLedger()
    be = T.simulate_td(td, cfg.t, cfg.eps, ledger, cfg.mode, cfg.force_noncommuting)
    exact = mk.expm_i(T.h_integral(td, cfg.t), 1.0)
    ordered = T.reference_propagator(td, cfg.t, cfg.oracle_steps)
    return {
        "model": cfg.model.name, "n": td.system_qubits, "t": cfg.t, "eps": cfg.eps,
        "error_vs_expm": B.be_verify(be, exact),
        "error_vs_timeordered": B.be_verify(be, ordered),
        "w_gate_uses": ledger.w_gate_uses, "encoding_uses": ledger.encoding_uses,
        "jacobi_degree": ledger.degrees.get("jacobi_anger", 0),
        "ancillas_peak": ledger.ancillas_peak, "commuting_pass": report.passed,
        "runtime_ms": 0 if deterministic else round(1000 * (time.perf_counter() - start), 3),
    }


def trotter_row(cfg: RunConfig, steps: int, deterministic: bool = False) -> dict:
    """Product-formula baseline row; query columns are zero."""
    start = time.perf_counter()
    td = M.build_model(cfg.model)
    report = T.check_commuting(td)
    u = T.trotter1(td, cfg.t, steps)
    exact = mk.expm_i(T.h_integral(td, cfg.t), 1.0)
    ordered = T.reference_propagator(td, cfg.t, cfg.oracle_steps)
    return {
        "model": f"{cfg.model.name}/trotter1/steps={steps}", "n": td.system_qubits,
        "t": cfg.t, "eps": cfg.eps,
        "error_vs_expm": mk.spectral_norm(u - exact),
        "error_vs_timeordered": mk.spectral_norm(u - ordered),
        "w_gate_uses": 0, "encoding_uses": 0, "jacobi_degree": 0, "ancillas_peak": 0,
        "commuting_pass": report.passed,
        "runtime_ms": 0 if deterministic else round(1000 * (time.perf_counter() - start), 3),
    }


def failure_row(cfg: RunConfig, label: str | None = None) -> dict:
    n = cfg.model.parameters.get("n", 0)
    return {
        "model": label or cfg.model.name, "n": n, "t": cfg.t, "eps": cfg.eps,
        "error_vs_expm": float("inf"), "error_vs_timeordered": float("inf"),
        "w_gate_uses": 0, "encoding_uses": 0, "jacobi_degree": 0, "ancillas_peak": 0,
        "commuting_pass": False, "runtime_ms": 0,
    }


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, ConvergenceError):
        return EXIT_CONVERGENCE
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG
    return EXIT_PRECONDITION


def write_rows(path: str, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COLUMNS)
        for row in rows:
            w.writerow([_fmt(row[c]) for c in COLUMNS])
            fh.flush()


def _apply_flags(cfg: RunConfig, args) -> RunConfig:
    if getattr(args, "mode", None):
        cfg = replace(cfg, mode=args.mode)
    if getattr(args, "force_noncommuting", False):
        cfg = replace(cfg, force_noncommuting=True)
    if getattr(args, "oracle_steps", None):
        cfg = replace(cfg, oracle_steps=args.oracle_steps)
    if getattr(args, "out", None):
        cfg = replace(cfg, output_path=args.out)
    return cfg


def cmd_simulate(args) -> int:
    cfg = _apply_flags(load_config(args.config), args)
    try:
        row = run_row(cfg, args.deterministic)
    except (TDHSimError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _exit_code(exc)
    write_rows(cfg.output_path, [row])
    print(f"error_vs_expm={row['error_vs_expm']:.3e} "
          f"error_vs_timeordered={row['error_vs_timeordered']:.3e} -> {cfg.output_path}")
    return EXIT_OK


def _parse_values(param: str, text: str) -> list:
    items = [v.strip() for v in text.split(",") if v.strip()]
    try:
        if param in ("n", "steps"):
            return [int(v) for v in items]
        return [float(v) for v in items]
    except ValueError:
        raise ConfigError(f"cannot parse sweep values {text!r}") from None


def cmd_sweep(args) -> int:
    cfg = _apply_flags(load_config(args.config), args)
    values = _parse_values(args.param, args.values)
    rows, code = [], EXIT_OK
    for v in values:
        label, row_cfg = None, cfg
        if args.param == "steps":
            label = f"{cfg.model.name}/trotter1/steps={v}"
        elif args.param == "n":
            row_cfg = replace(cfg, model=M.with_parameter(cfg.model, "n", v))
        else:
            row_cfg = replace(cfg, **{args.param: v})
        try:
            if args.param == "steps":
                rows.append(trotter_row(cfg, v, args.deterministic))
            else:
                rows.append(run_row(row_cfg, args.deterministic))
        except (TDHSimError, ValueError, RuntimeError) as exc:
            print(f"error at {args.param}={v}: {exc}", file=sys.stderr)
            rows.append(failure_row(row_cfg, label))
            code = code or _exit_code(exc)
    write_rows(cfg.output_path, rows)
    print(f"{len(rows)} rows -> {cfg.output_path}")
    return code


def cmd_verify(args) -> int:
    cfg = _apply_flags(load_config(args.config), args)
    try:
        td = M.build_model(cfg.model)
        T.h_integral(td, cfg.t)
    except (TDHSimError, ValueError) as exc:
        print(f"FAIL model: {exc}")
        return _exit_code(exc)
    print(f"ok   model: {cfg.model.name}, {td.system_qubits} qubits, {len(td.terms)} terms")
    report = T.check_commuting(td)
    print(f"{'ok  ' if report.passed else 'FAIL'} commuting: max ||[H_i, H_j]|| = "
          f"{report.max_commutator_norm:.3e}, time pairs {report.max_time_pair_norm:.3e}")
    if not report.passed and not cfg.force_noncommuting:
        return EXIT_PRECONDITION
    e1, e2, ratio = T.richardson_ratio(td, cfg.t)
    good = 3.0 <= ratio <= 5.0
    print(f"{'ok  ' if good else 'FAIL'} oracle self-convergence: ratio {ratio:.3f} "
          f"(e1={e1:.2e}, e2={e2:.2e})")
    if not good:
        return EXIT_CONVERGENCE
    if report.passed:
        gap = mk.spectral_norm(T.reference_propagator(td, cfg.t, cfg.oracle_steps)
                               - mk.expm_i(T.h_integral(td, cfg.t), 1.0))
        good = gap <= 1e-6
        print(f"{'ok  ' if good else 'FAIL'} time-ordering collapse: {gap:.3e}")
        if not good:
            return EXIT_CONVERGENCE
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tdhsim", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True)
    common.add_argument("--mode", choices=T.MODES)
    common.add_argument("--force-noncommuting", action="store_true")
    common.add_argument("--oracle-steps", type=int)
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("simulate", parents=[common])
    s.add_argument("--out")
    s.add_argument("--deterministic", action="store_true", help="write runtime_ms as 0")
    s.set_defaults(func=cmd_simulate)
    w = sub.add_parser("sweep", parents=[common])
    w.add_argument("--param", required=True, choices=SWEEP_PARAMS)
    w.add_argument("--values", required=True)
    w.add_argument("--out")
    w.add_argument("--deterministic", action="store_true", help="write runtime_ms as 0")
    w.set_defaults(func=cmd_sweep)
    v = sub.add_parser("verify", parents=[common])
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
