"""Command line: run named scenarios, validate config files.

    slitpot run <scenario> [--param value]... --seed S --out DIR
                [--cache use|refresh|off] [--no-figures]
    slitpot validate <config-file>
    slitpot list

Scenario parameters are passed as repeated ``--param value`` style options
using the parameter names from the registry (hyphens map to underscores,
e.g. ``--n-max 5``).  Config files are key=value lines with a mandatory
``scenario=`` entry; ``slitpot validate`` parses and checks one without
running it.  Exit code 0 means every check of the run passed.  The
environment variable SLITPOT_CACHE_DIR overrides the cache location.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .scenarios import SCENARIOS, ScenarioConfig, run_scenario, scenario_names

__all__ = ["main", "parse_config_file"]


def _add_param_args(parser: argparse.ArgumentParser, scenario: str) -> None:
    for key, default in SCENARIOS[scenario].defaults.items():
        flag = "--" + key.replace("_", "-")
        if isinstance(default, tuple):
            parser.add_argument(flag, type=str, default=None,
                                help=f"comma list (default {','.join(map(str, default))})")
        else:
            parser.add_argument(flag, type=str, default=None,
                                help=f"default {default}")


def parse_config_file(path: str | Path) -> ScenarioConfig:
    kv = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"expected key=value, got {line!r}")
        k, v = line.split("=", 1)
        kv[k.strip()] = v.strip()
    if "scenario" not in kv:
        raise ValueError("config file needs a scenario= line")
    name = kv.pop("scenario")
    seed = int(kv.pop("seed", "0"))
    out_dir = kv.pop("out", "out")
    cache = kv.pop("cache", "off")
    return ScenarioConfig(name=name, params=kv, seed=seed, out_dir=out_dir,
                          cache=cache)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)

    top = argparse.ArgumentParser(prog="slitpot", description=__doc__,
                                  formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = top.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a scenario")
    run_p.add_argument("scenario", choices=scenario_names())
    run_p.add_argument("--seed", type=int, default=0)
    run_p.add_argument("--out", type=str, default="out")
    run_p.add_argument("--cache", choices=["use", "refresh", "off"], default="off")
    run_p.add_argument("--no-figures", action="store_true")

    val_p = sub.add_parser("validate", help="validate a scenario config file")
    val_p.add_argument("config_file")

    sub.add_parser("list", help="list scenarios")

    # two-stage parse: the scenario decides which parameter flags exist
    known, rest = top.parse_known_args(argv)

    if known.command == "list":
        for name in scenario_names():
            print(f"{name}: {SCENARIOS[name].claim}")
        return 0

    if known.command == "validate":
        try:
            cfg = parse_config_file(known.config_file)
            cfg.resolved()
        except (ValueError, OSError) as exc:
            print(f"invalid: {exc}", file=sys.stderr)
            return 2
        print(f"ok: scenario {cfg.name}, seed {cfg.seed}")
        return 0

    param_parser = argparse.ArgumentParser(prog=f"slitpot run {known.scenario}")
    _add_param_args(param_parser, known.scenario)
    param_ns = param_parser.parse_args(rest)
    params = {k: v for k, v in vars(param_ns).items() if v is not None}

    cfg = ScenarioConfig(name=known.scenario, params=params, seed=known.seed,
                         out_dir=known.out, cache=known.cache,
                         figures=not known.no_figures)
    report = run_scenario(cfg)
    for check in report.checks:
        status = "PASS" if check.passed else "FAIL"
        print(f"[{status}] {report.scenario}/{check.name}: {check.detail}")
    print(f"report: {Path(cfg.out_dir) / report.scenario / 'report.json'} "
          f"({report.wall_clock:.1f}s)")
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
