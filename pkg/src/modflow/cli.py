"""Command line entry point: ``modflow <command> [--config FILE] [--out PATH] [--format F]``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .commands import COMMANDS, CommandResult
from .config import ConfigError, JobConfig, load_config
from .emit import to_json
from .errors import ModflowError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_VERIFY = 0, 2, 3, 4


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="modflow", description="Geometric modular flows of n-intervals.")
    p.add_argument("command", choices=[*COMMANDS, "verify"])
    p.add_argument("--config", help="JSON configuration file")
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=["csv", "json", "svg"], help="output format")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                   help="override a configuration field, e.g. grids.flow.t_points=41")
    p.add_argument("--tolerance-factor", type=float, help="scale all verification tolerances")
    p.add_argument("--check", action="append", help="run only the named check (verify)")
    return p


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _emit(name: str, res: CommandResult, cfg: JobConfig) -> None:
    fmt, path = cfg.out_format, cfg.out_path
    if fmt == "svg":
        if res.svg is None:
            raise ConfigError(f"'{name}' has no SVG output")
        _write(res.svg, path)
    elif fmt == "json":
        doc = {"command": name, "tables": {k: t.as_json_obj() for k, t in res.tables.items()}}
        if res.extra:
            doc["extra"] = res.extra
        _write(to_json(doc) + "\n", path)
    else:
        tables = list(res.tables.items())
        _write(tables[0][1].to_csv(), path)
        for key, table in tables[1:]:
            if path is None:
                sys.stdout.write("\n" + table.to_csv())
            else:
                p = Path(path)
                p.with_name(f"{p.stem}_{key}{p.suffix or '.csv'}").write_text(table.to_csv())


def _verify(cfg: JobConfig, checks) -> int:
    from .verify import report, run_checks

    try:
        results = run_checks(checks, cfg.tolerance_factor)
    except KeyError as exc:
        raise ConfigError(str(exc.args[0])) from exc
    for r in results:
        print(r.summary(), file=sys.stderr)
    _write(to_json(report(results)) + "\n", cfg.out_path)
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    overrides = list(args.overrides)
    if args.out is not None:
        overrides.append(f"output.path={to_json(args.out)}")
    if args.format is not None:
        overrides.append(f"output.format={to_json(args.format)}")
    if args.tolerance_factor is not None:
        overrides.append(f"verify.tolerance_factor={args.tolerance_factor!r}")
    try:
        cfg = load_config(args.config, overrides)
        if args.command == "verify":
            return _verify(cfg, args.check)
        _emit(args.command, COMMANDS[args.command](cfg), cfg)
    except ConfigError as exc:
        print(f"modflow: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ModflowError, ArithmeticError) as exc:
        print(f"modflow: numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
