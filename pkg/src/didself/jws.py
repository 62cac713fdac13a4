"""Compact JWS (RFC 7515) encoding and structural parsing.

Only what the proof and JWT layers need: a single signature, protected
header only, ES256 or EdDSA. Verification policy lives with the callers.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from didself._codec import b64url_decode, b64url_encode, dumps_compact, loads_strict
from didself.errors import MalformedJws
from didself.keys import ALGORITHMS, KeyPair

# header parameters a recipient must understand if marked critical; we support none
_UNDERSTOOD_CRIT: frozenset[str] = frozenset()


@dataclass(frozen=True)
class CompactJws:
    header: dict[str, Any]
    header_b64: str
    payload_b64: str
    signature: bytes

    @property
    def payload(self) -> bytes:
        return b64url_decode(self.payload_b64)

    def signing_input(self, payload_b64: str | None = None) -> bytes:
        body = self.payload_b64 if payload_b64 is None else payload_b64
        return f"{self.header_b64}.{body}".encode("ascii")


def encode(header: dict[str, Any], payload: bytes, signer: KeyPair) -> str:
    header_b64 = b64url_encode(dumps_compact(header))
    payload_b64 = b64url_encode(payload)
    sig = signer.sign(f"{header_b64}.{payload_b64}".encode("ascii"))
    return f"{header_b64}.{payload_b64}.{b64url_encode(sig)}"


def decode(token: str | bytes) -> CompactJws:
    """Split and decode a compact JWS without verifying anything cryptographic."""
    if isinstance(token, (bytes, bytearray)):
        try:
            token = bytes(token).decode("ascii")
        except UnicodeDecodeError:
            raise MalformedJws("compact JWS must be ASCII") from None
    if not isinstance(token, str):
        raise MalformedJws("compact JWS must be a string")
    token = token.strip()
    parts = token.split(".")
    if len(parts) != 3:
        raise MalformedJws(f"compact JWS has {len(parts)} segments, expected 3")
    header_b64, payload_b64, sig_b64 = parts
    try:
        header = loads_strict(b64url_decode(header_b64))
        b64url_decode(payload_b64)
        signature = b64url_decode(sig_b64)
    except ValueError as exc:
        raise MalformedJws(f"undecodable JWS segment: {exc}") from None
    if not isinstance(header, dict):
        raise MalformedJws("JWS header is not a JSON object")
    alg = header.get("alg")
    if alg not in ALGORITHMS:
        raise MalformedJws(f"unsupported alg {alg!r}")
    crit = header.get("crit")
    if crit is not None:
        if not isinstance(crit, list) or not set(map(str, crit)) <= _UNDERSTOOD_CRIT:
            raise MalformedJws(f"unsupported critical header parameters {crit!r}")
    return CompactJws(header, header_b64, payload_b64, signature)
