"""On-disk cache for precomputed basis data.

File layout: 8-byte magic, 4-byte big-endian format version, 32-byte
SHA-256 of the payload, then the zlib-compressed JSON payload. Any
mismatch (missing file, bad magic, old version, checksum failure, bad
JSON) counts as a miss and the caller recomputes.
"""

from __future__ import annotations

import hashlib
import json
import os
import struct
import tempfile
import zlib
from pathlib import Path
from typing import Callable

__all__ = ["CACHE_ENV", "FORMAT_VERSION", "cache_dir", "load", "store", "memo"]

CACHE_ENV = "GPENTROPY_CACHE_DIR"
MAGIC = b"GPEBASIS"
FORMAT_VERSION = 1
_HEADER = struct.Struct(">8sI32s")


def cache_dir() -> Path | None:
    """Cache directory, or None when caching is disabled (env var set to "")."""
    env = os.environ.get(CACHE_ENV)
    if env is not None:
        return Path(env) if env else None
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(base) / "gpentropy"


def _path(key: str) -> Path | None:
    d = cache_dir()
    return None if d is None else d / f"{key}.v{FORMAT_VERSION}.bin"


def encode_blob(payload) -> bytes:
    body = zlib.compress(json.dumps(payload, sort_keys=True).encode())
    return _HEADER.pack(MAGIC, FORMAT_VERSION, hashlib.sha256(body).digest()) + body


def decode_blob(blob: bytes):
    """Payload of a cache blob, or None if it fails any integrity check."""
    if len(blob) < _HEADER.size:
        return None
    magic, version, digest = _HEADER.unpack_from(blob)
    body = blob[_HEADER.size:]
    if magic != MAGIC or version != FORMAT_VERSION or hashlib.sha256(body).digest() != digest:
        return None
    try:
        return json.loads(zlib.decompress(body))
    except (zlib.error, ValueError):
        return None


def load(key: str):
    p = _path(key)
    if p is None:
        return None
    try:
        return decode_blob(p.read_bytes())
    except OSError:
        return None


def store(key: str, payload) -> bool:
    """Write atomically; failures (read-only home, full disk) are ignored."""
    p = _path(key)
    if p is None:
        return False
    try:
        p.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=p.parent, prefix=f".{p.name}.")
        with os.fdopen(fd, "wb") as fh:
            fh.write(encode_blob(payload))
        os.replace(tmp, p)
        return True
    except OSError:
        return False


def memo(key: str, compute: Callable[[], object], valid: Callable[[object], bool] = lambda _: True):
    """Cached payload for `key`, recomputed and stored on any miss."""
    hit = load(key)
    if hit is not None and valid(hit):
        return hit
    value = compute()
    store(key, value)
    return value
