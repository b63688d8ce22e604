"""Command-line front end: sweeps, figure presets, and the validation suite.

All output is CSV with `#`-prefixed metadata lines before the header

    snr_db,n,m,scheme,metric,value,std_err,trials,seed,resamples

and every run is a pure function of the seed: no wall clock, no entropy,
so the same invocation always produces byte-identical output.

Exit codes: 0 success, 1 validation failure, 2 usage/config error,
3 output I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Optional, Sequence, TextIO

from .montecarlo import METRICS, SweepResult, SweepSpec, estimate
from .validation import SUITES
from . import __version__

__all__ = ["ExperimentConfig", "main"]

CSV_HEADER = "snr_db,n,m,scheme,metric,value,std_err,trials,seed,resamples"

_STRATEGY_FLAGS = {
    "prefixes": "prefixes",
    "prefixes+singletons": "prefixes_plus_singletons",
    "all-subsets": "all_subsets",
}

_CONFIG_FIELDS = {
    "n_antennas",
    "m_beams",
    "snr_db",
    "r_p_bpcu",
    "r_s_bpcu",
    "trials",
    "seed",
    "schemes",
    "metric",
    "candidate_strategy",
}


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    """Serialized experiment description (JSON key/value tree)."""

    n_antennas: int
    m_beams: int
    snr_db: tuple[float, ...]
    r_p_bpcu: float
    r_s_bpcu: float
    trials: int
    seed: int
    schemes: tuple[str, ...]
    metric: str
    candidate_strategy: str = "prefixes_plus_singletons"

    @classmethod
    def from_file(cls, path: str) -> "ExperimentConfig":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(
                f"config {path} is not valid JSON (line {exc.lineno}): {exc.msg}"
            ) from exc
        if not isinstance(raw, dict):
            raise ConfigError(f"config {path} must be a JSON object")
        unknown = sorted(set(raw) - _CONFIG_FIELDS)
        if unknown:
            raise ConfigError(f"unknown config field(s): {', '.join(unknown)}")
        missing = sorted(
            _CONFIG_FIELDS - {"candidate_strategy"} - set(raw)
        )
        if missing:
            raise ConfigError(f"missing config field(s): {', '.join(missing)}")
        try:
            return cls(
                n_antennas=int(raw["n_antennas"]),
                m_beams=int(raw["m_beams"]),
                snr_db=tuple(float(v) for v in raw["snr_db"]),
                r_p_bpcu=float(raw["r_p_bpcu"]),
                r_s_bpcu=float(raw["r_s_bpcu"]),
                trials=int(raw["trials"]),
                seed=int(raw["seed"]),
                schemes=tuple(str(s) for s in raw["schemes"]),
                metric=str(raw["metric"]),
                candidate_strategy=str(
                    raw.get("candidate_strategy", "prefixes_plus_singletons")
                ),
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"malformed config value: {exc}") from exc

    def to_spec(self) -> SweepSpec:
        try:
            return SweepSpec(
                n_antennas=self.n_antennas,
                m_beams=self.m_beams,
                r_p=self.r_p_bpcu,
                r_s=self.r_s_bpcu,
                snr_grid_db=self.snr_db,
                schemes=self.schemes,
                metric=self.metric,
                trials=self.trials,
                seed=self.seed,
                candidate_strategy=self.candidate_strategy,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


# figure presets: schemes, metric, targets, and which assumptions we had to
# fill in (recorded in the CSV metadata so they are auditable)
_PRESETS = {
    "fig1a": dict(
        schemes=("selection",),
        metric="outage",
        r_p=0.1,
        r_s=1.0,
        assumptions=("r_p_bpcu=0.1 assumed (stated only for the rate figures)",),
    ),
    "fig1b": dict(
        schemes=("selection",),
        metric="ergodic_rate",
        r_p=0.1,
        r_s=1.0,
        assumptions=(
            "r_p_bpcu=0.1 assumed (stated only for the comparison figures)",
            "rate conditioned on the SIC precondition; use --metric "
            "ergodic_rate_unconditioned for the raw mean",
        ),
    ),
    "fig2a": dict(
        schemes=("selection", "scheme1"),
        metric="ergodic_rate",
        r_p=0.1,
        r_s=1.0,
        assumptions=(),
    ),
    "fig2b": dict(
        schemes=("selection", "scheme2"),
        metric="ergodic_rate",
        r_p=0.1,
        r_s=1.0,
        assumptions=(),
    ),
}

_PRESET_M = (2, 4)
_PRESET_SNR = "0:40:5"
_PRESET_TRIALS = 2000


def _parse_snr_grid(text: str) -> tuple[float, ...]:
    """Parse 'a:b:step' (inclusive) or a single dB value."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return (float(parts[0]),)
        if len(parts) != 3:
            raise ValueError
        start, stop, step = (float(p) for p in parts)
        if step <= 0 or stop < start:
            raise ValueError
    except ValueError:
        raise ConfigError(
            f"bad --snr-db {text!r}: expected a single value or start:stop:step"
        ) from None
    grid = []
    value = start
    while value <= stop + 1e-9:
        grid.append(round(value, 9))
        value += step
    return tuple(grid)


def _format_value(v: float) -> str:
    return repr(float(v))


def _write_result(
    out: TextIO, result: SweepResult, metadata: Sequence[str], header: bool = True
) -> None:
    if header:
        for line in metadata:
            out.write(f"# {line}\n")
        out.write(CSV_HEADER + "\n")
    spec = result.spec
    for row in result.rows:
        est = row.estimate
        out.write(
            ",".join(
                (
                    _format_value(row.snr_db),
                    str(spec.n_antennas),
                    str(spec.m_beams),
                    row.scheme,
                    spec.metric,
                    _format_value(est.value),
                    _format_value(est.std_err),
                    str(est.trials),
                    str(spec.seed),
                    str(est.resamples),
                )
            )
            + "\n"
        )


def _open_out(path: str):
    if path == "-":
        return sys.stdout, False
    try:
        return open(path, "w", encoding="utf-8", newline="\n"), True
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def _cmd_sweep(args: argparse.Namespace) -> int:
    cfg = ExperimentConfig.from_file(args.config)
    overrides = {}
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.snr_db is not None:
        overrides["snr_db"] = _parse_snr_grid(args.snr_db)
    if args.metric is not None:
        overrides["metric"] = args.metric
    if args.strategy is not None:
        overrides["candidate_strategy"] = _STRATEGY_FLAGS[args.strategy]
    if overrides:
        cfg = ExperimentConfig(**{**cfg.__dict__, **overrides})
    spec = cfg.to_spec()
    result = estimate(spec, workers=args.workers)
    metadata = [
        f"beamshare {__version__} sweep",
        f"config: {args.config}",
        f"r_p_bpcu: {cfg.r_p_bpcu} r_s_bpcu: {cfg.r_s_bpcu}",
        f"strategy: {cfg.candidate_strategy} seed: {cfg.seed} trials: {cfg.trials}",
    ]
    out, close = _open_out(args.out)
    try:
        _write_result(out, result, metadata)
    finally:
        if close:
            out.close()
    return 0


def _cmd_preset(args: argparse.Namespace) -> int:
    preset = _PRESETS[args.name]
    trials = args.trials if args.trials is not None else _PRESET_TRIALS
    seed = args.seed if args.seed is not None else 1
    grid = _parse_snr_grid(args.snr_db if args.snr_db is not None else _PRESET_SNR)
    metric = args.metric if args.metric is not None else preset["metric"]
    m_list = tuple(args.m_beams) if args.m_beams else _PRESET_M
    r_p = args.r_p_bpcu if args.r_p_bpcu is not None else preset["r_p"]
    r_s = args.r_s_bpcu if args.r_s_bpcu is not None else preset["r_s"]
    strategy = (
        _STRATEGY_FLAGS[args.strategy]
        if args.strategy is not None
        else "prefixes_plus_singletons"
    )
    metadata = [
        f"beamshare {__version__} preset {args.name}",
        f"schemes: {','.join(preset['schemes'])} metric: {metric}",
        f"r_p_bpcu: {r_p} r_s_bpcu: {r_s} n=m in {list(m_list)}",
        f"strategy: {strategy} seed: {seed} trials: {trials}",
    ]
    metadata.extend(f"assumption: {a}" for a in preset["assumptions"])
    out, close = _open_out(args.out)
    try:
        first = True
        for m in m_list:
            try:
                spec = SweepSpec(
                    n_antennas=m,
                    m_beams=m,
                    r_p=r_p,
                    r_s=r_s,
                    snr_grid_db=grid,
                    schemes=preset["schemes"],
                    metric=metric,
                    trials=trials,
                    seed=seed,
                    candidate_strategy=strategy,
                )
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
            result = estimate(spec, workers=args.workers)
            _write_result(out, result, metadata, header=first)
            first = False
    finally:
        if close:
            out.close()
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    failures = 0
    for name in names:
        for check in SUITES[name](args.seed):
            status = "PASS" if check.passed else "FAIL"
            failures += 0 if check.passed else 1
            print(f"[{status}] {check.name:<34} {check.detail}")
    if failures:
        print(f"{failures} check(s) failed")
        return 1
    print("all checks passed")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="beamshare",
        description="Link-level simulator for NOMA secondary access on "
        "preconfigured zero-forcing beams",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--trials", type=int, default=None)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--snr-db", default=None, help="grid as start:stop:step")
    common.add_argument("--metric", choices=METRICS, default=None)
    common.add_argument(
        "--strategy", choices=sorted(_STRATEGY_FLAGS), default=None
    )
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--out", default="-", help="output CSV path, - for stdout")

    p_sweep = sub.add_parser("sweep", parents=[common], help="run a config-driven sweep")
    p_sweep.add_argument("--config", required=True, help="JSON experiment config")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_preset = sub.add_parser(
        "preset", parents=[common], help="run a canned figure experiment"
    )
    p_preset.add_argument("name", choices=sorted(_PRESETS))
    p_preset.add_argument(
        "--m-beams",
        type=int,
        action="append",
        default=None,
        help="replace the default N=M curve set (repeatable)",
    )
    p_preset.add_argument("--r-p-bpcu", type=float, default=None)
    p_preset.add_argument("--r-s-bpcu", type=float, default=None)
    p_preset.set_defaults(func=_cmd_preset)

    p_val = sub.add_parser("validate", help="run the self-check suites")
    p_val.add_argument("suite", choices=[*SUITES, "all"])
    p_val.add_argument("--seed", type=int, default=0)
    p_val.set_defaults(func=_cmd_validate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help; keep its codes
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
