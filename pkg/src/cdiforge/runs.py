"""Shared plumbing for command-line runs: config resolution, run records, diagnostics."""

import functools
import logging
import re
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any, TypeVar

import click
from pydantic import ValidationError

from cdiforge import __version__
from cdiforge.config import Config
from cdiforge.dal import load_json, write_json
from cdiforge.errors import CdiForgeError, ConfigError, FormatError
from cdiforge.models import RunConfig

logger = logging.getLogger(__name__)

F = TypeVar("F", bound=Callable[..., Any])


def key_line(text: str, loc: Sequence[int | str]) -> int | None:
    """1-based line on which the nested key path ``loc`` appears, if it does."""
    lines = text.splitlines()
    line = 0
    found = None
    for part in loc:
        if not isinstance(part, str):
            continue
        pattern = re.compile(rf'"{re.escape(part)}"\s*:')
        hit = next((i for i in range(line, len(lines)) if pattern.search(lines[i])), None)
        if hit is None:
            break
        line = found = hit
    return None if found is None else found + 1


def describe_errors(error: ValidationError, text: str, source: str) -> str:
    """One line per schema violation: ``source: line N: key.path: message``."""
    messages = []
    for item in error.errors():
        loc = item["loc"]
        key = ".".join(str(p) for p in loc) or "<root>"
        line = key_line(text, loc)
        where = f"line {line}: " if line is not None else ""
        reason = "unknown key" if item["type"] == "extra_forbidden" else item["msg"]
        messages.append(f"{source}: {where}{key}: {reason}")
    return "; ".join(messages)


def load_run_config(
    path: Path | None = None,
    seed: int | None = None,
    out: Path | None = None,
    threads: int | None = None,
) -> RunConfig:
    """Resolve a RunConfig: environment defaults, then the file, then flags.

    Raises:
        ConfigError: if the file is not valid JSON or does not match the schema.
    """
    data: dict[str, Any] = {}
    text = ""
    if path is not None:
        try:
            data = load_json(path)
        except FormatError as e:
            raise ConfigError(str(e)) from e
        text = path.read_text(encoding="utf-8")
    for key, value in (("seed", seed), ("out_dir", out), ("threads", threads)):
        if value is not None:
            data[key] = value
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(describe_errors(e, text, str(path or "flags"))) from e


def start_run(config: RunConfig, subcommand: str, inputs: dict[str, Any]) -> Path:
    """Create the output directory and record the resolved config and invocation."""
    out = config.out_dir
    out.mkdir(parents=True, exist_ok=True)
    write_json(out / Config.RESOLVED_CONFIG_NAME, config)
    write_json(
        out / Config.INVOCATION_NAME,
        {
            "subcommand": subcommand,
            "inputs": {k: str(v) if v is not None else None for k, v in inputs.items()},
            "version": __version__,
        },
    )
    logger.info("%s: writing to %s", subcommand, out)
    return out


def run_options(fn: F) -> F:
    """Add the flags every run accepts: --config, --seed, --out, --threads."""
    options = [
        click.option(
            "--config",
            "config_path",
            type=click.Path(dir_okay=False, path_type=Path),
            help="RunConfig JSON file.",
        ),
        click.option("--seed", type=click.IntRange(0, 2**64 - 1), help="Run seed (u64)."),
        click.option(
            "--out", type=click.Path(file_okay=False, path_type=Path), help="Output directory."
        ),
        click.option("--threads", type=click.IntRange(min=1), help="Worker threads."),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


def operation(name: str) -> Callable[[F], F]:
    """Bind a command to the module operation it runs.

    Failures leave a one-line ``error: <module>.<operation>: <message>`` on
    standard error and exit with status 1.
    """

    def decorate(fn: F) -> F:
        @functools.wraps(fn)
        def wrapper(*args: Any, **kwargs: Any) -> Any:
            try:
                return fn(*args, **kwargs)
            except (CdiForgeError, ValueError, OSError) as e:
                logger.debug("%s failed", name, exc_info=True)
                click.echo(f"error: {name}: {e}", err=True)
                raise click.exceptions.Exit(1) from e

        return wrapper  # type: ignore[return-value]

    return decorate
