"""Canonical byte encodings and digests.

Two encodings are used across the control plane:

* canonical JSON (lexicographically sorted keys, no insignificant
  whitespace, UTF-8) for audit payloads and document digests;
* a length-prefixed field concatenation for signature bodies, so signed
  material is unambiguous without a JSON parser.

All digests are SHA3-256.
"""

from __future__ import annotations

import base64
import hashlib
import json
import struct
from typing import Iterable

ZERO_DIGEST = b"\x00" * 32


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def canonical_json_bytes(obj) -> bytes:
    return canonical_json(obj).encode("utf-8")


def sha3_256(data: bytes) -> bytes:
    return hashlib.sha3_256(data).digest()


def sha3_256_hex(data: bytes) -> str:
    return hashlib.sha3_256(data).hexdigest()


def digest_json(obj) -> str:
    """Hex SHA3-256 of the canonical JSON form."""
    return sha3_256_hex(canonical_json_bytes(obj))


def digest_stream(chunks: Iterable[bytes]) -> str:
    h = hashlib.sha3_256()
    for chunk in chunks:
        h.update(chunk)
    return h.hexdigest()


def length_prefixed(*fields: bytes) -> bytes:
    """Concatenate fields, each prefixed with a 4-byte big-endian length."""
    out = bytearray()
    for f in fields:
        out += struct.pack(">I", len(f))
        out += f
    return bytes(out)


def b64url_encode(data: bytes) -> str:
    return base64.urlsafe_b64encode(data).rstrip(b"=").decode("ascii")


def b64url_decode(text: str) -> bytes:
    padding = -len(text) % 4
    return base64.urlsafe_b64decode(text + "=" * padding)
