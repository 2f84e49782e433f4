"""Reading and writing run configurations (JSON with optional dotted keys)."""

import json
import logging
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from boundtransport.common.errors import ConfigError, InputOutputError
from boundtransport.schemas.requests.run_config import RunConfig

logger = logging.getLogger(__name__)


def expand_dotted(data: Any, prefix: str = "") -> Any:
    """Turn ``{"a.b": 1}`` into ``{"a": {"b": 1}}`` at every level."""
    if isinstance(data, list):
        return [expand_dotted(item, prefix) for item in data]
    if not isinstance(data, dict):
        return data
    out: dict[str, Any] = {}
    for key, value in data.items():
        head, *rest = key.split(".")
        if rest:
            value = {".".join(rest): value}
        value = expand_dotted(value, f"{prefix}{head}.")
        if head in out:
            if not (isinstance(out[head], dict) and isinstance(value, dict)):
                raise ConfigError(f"key {prefix}{head} is given twice", key=f"{prefix}{head}")
            out[head] = _merge(out[head], value, f"{prefix}{head}.")
        else:
            out[head] = value
    return out


def _merge(a: dict, b: dict, prefix: str) -> dict:
    merged = dict(a)
    for key, value in b.items():
        if key in merged:
            if not (isinstance(merged[key], dict) and isinstance(value, dict)):
                raise ConfigError(f"key {prefix}{key} is given twice", key=f"{prefix}{key}")
            merged[key] = _merge(merged[key], value, f"{prefix}{key}.")
        else:
            merged[key] = value
    return merged


def _describe(error: ValidationError) -> tuple[str, str]:
    first = error.errors()[0]
    key = ".".join(str(part) for part in first["loc"]) or "<root>"
    lines = []
    for e in error.errors():
        loc = ".".join(str(part) for part in e["loc"]) or "<root>"
        msg = e["msg"]
        if e["type"] == "extra_forbidden":
            msg = "unknown key"
        lines.append(f"{loc}: {msg}")
    return key, "; ".join(lines)


def validate_config(data: dict, base_dir: Path | None = None) -> RunConfig:
    try:
        return RunConfig.model_validate(
            expand_dotted(data), context={"base_dir": base_dir or Path.cwd()}
        )
    except ValidationError as e:
        key, message = _describe(e)
        raise ConfigError(f"invalid configuration: {message}", key=key) from e


def parse_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    try:
        data = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as e:
        raise ConfigError(
            f"{path.name}: parse error at line {e.lineno}, column {e.colno}: {e.msg}"
        ) from e
    if not isinstance(data, dict):
        raise ConfigError(f"{path.name}: top level must be an object")
    config = validate_config(data, path.resolve().parent)
    logger.debug(f"parsed config {path}")
    return config


def dump_config(config: RunConfig, path: str | Path) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(config.model_dump_json(indent=2), encoding="utf-8")
    except OSError as e:
        raise InputOutputError(f"cannot write {path}: {e}", module="io_cli") from e
    return path


def deep_update(base: dict, overrides: dict) -> dict:
    """Nested copy of ``base`` with ``overrides`` taking precedence."""
    merged = dict(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_update(merged[key], value)
        else:
            merged[key] = value
    return merged
