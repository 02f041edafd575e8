from __future__ import annotations

import argparse
import logging
import os

from dotenv import dotenv_values

logger = logging.getLogger(__name__)


def _key(name: str) -> str:
    return name.strip().lower().lstrip("-").replace("-", "_")


def load_config(path: str | os.PathLike) -> dict[str, str]:
    """
    Reads `key = value` lines. Keys are long-flag names with dashes or
    underscores; the process environment is never consulted.
    Raises FileNotFoundError when the file is absent.
    """
    if not os.path.isfile(path):
        raise FileNotFoundError(f"config file not found: {path}")
    raw = dotenv_values(path, interpolate=False)
    config = {_key(k): v for k, v in raw.items() if v is not None}
    logger.debug("config %s: %s", path, ", ".join(sorted(config)) or "(empty)")
    return config


def given_options(parser: argparse.ArgumentParser, argv: list[str]) -> set[str]:
    """
    Destinations of the options present in `argv`. Re-parses with every
    default suppressed, so `parser` should be a fresh instance.
    """
    _suppress_defaults(parser)
    return set(vars(parser.parse_args(argv))) - {"cmd", "func"}


def _suppress_defaults(parser: argparse.ArgumentParser) -> None:
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            for sub in action.choices.values():
                _suppress_defaults(sub)
        elif action.dest != "help":
            action.default = argparse.SUPPRESS


def apply_config(
    args: argparse.Namespace,
    config: dict[str, str],
    defaults: dict[str, object],
    given: set[str] | frozenset[str] = frozenset(),
) -> list[str]:
    """
    Fills options the user did not pass (`given`) from `config`; command-line
    values win even when they equal the default. Values are converted with
    the type of the parser default. Returns the keys that were applied.
    """
    applied = []
    for key, text in config.items():
        if not hasattr(args, key):
            logger.warning("ignoring unknown config key %r", key)
            continue
        if key in given:
            continue
        setattr(args, key, _convert(text, defaults.get(key)))
        applied.append(key)
    return applied


def _convert(text: str, default):
    if isinstance(default, bool):
        return text.strip().lower() in ("1", "true", "yes", "on")
    if isinstance(default, int):
        return int(text)
    return text
