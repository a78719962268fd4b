"""Flat ``key = value`` configuration files."""

from __future__ import annotations

from pathlib import Path

from ..errors import ValidationError

__all__ = ["parse_config", "load_config", "Config"]


def parse_config(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"config line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ValidationError(f"config line {lineno}: empty key")
        if key in out:
            raise ValidationError(f"config line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def load_config(path: str | Path) -> "Config":
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read config {path}: {exc}") from None
    return Config(parse_config(text))


class Config:
    """Typed accessors over the raw string mapping; tracks unused keys."""

    def __init__(self, values: dict[str, str]):
        self.values = dict(values)
        self._used: set[str] = set()

    def __contains__(self, key):
        return key in self.values

    def _raw(self, key, default):
        self._used.add(key)
        return self.values.get(key, default)

    def str(self, key: str, default: str | None = None) -> str:
        v = self._raw(key, default)
        if v is None:
            raise ValidationError(f"config key {key!r} is required")
        return v

    def int(self, key: str, default: int | None = None) -> int:
        v = self._raw(key, default)
        if v is None:
            raise ValidationError(f"config key {key!r} is required")
        try:
            return int(v)
        except (TypeError, ValueError):
            raise ValidationError(f"config key {key!r}: {v!r} is not an integer") from None

    def float(self, key: str, default: float | None = None) -> float:
        v = self._raw(key, default)
        if v is None:
            raise ValidationError(f"config key {key!r} is required")
        try:
            return float(v)
        except (TypeError, ValueError):
            raise ValidationError(f"config key {key!r}: {v!r} is not a number") from None

    def ints(self, key: str, default: list[int] | None = None) -> list[int]:
        """Comma-separated integers and inclusive ranges ``a..b``."""
        v = self._raw(key, None)
        if v is None:
            if default is None:
                raise ValidationError(f"config key {key!r} is required")
            return list(default)
        return parse_int_list(v, key)

    def floats(self, key: str, default: list[float] | None = None) -> list[float]:
        v = self._raw(key, None)
        if v is None:
            if default is None:
                raise ValidationError(f"config key {key!r} is required")
            return list(default)
        try:
            return [float(x) for x in v.split(",") if x.strip()]
        except ValueError:
            raise ValidationError(f"config key {key!r}: {v!r} is not a list of numbers") from None

    def unused(self) -> list[str]:
        return sorted(set(self.values) - self._used)


def parse_int_list(text: str, key: str = "value") -> list[int]:
    out: list[int] = []
    try:
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            if ".." in part:
                a, b = part.split("..", 1)
                out.extend(range(int(a), int(b) + 1))
            else:
                out.append(int(part))
    except ValueError:
        raise ValidationError(f"{key}: {text!r} is not a list of integers or ranges") from None
    return out
