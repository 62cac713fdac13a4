"""``did:self`` identifiers and RFC 7638 JWK thumbprints.

A DID has the form ``did:self:<thumbprint>`` or
``did:self:<thumbprint>/<suffix>``, where the thumbprint is the base64url
SHA-256 thumbprint of the controller's public JWK.
"""
from __future__ import annotations

import hashlib
import re
from collections.abc import Mapping
from dataclasses import dataclass
from typing import Any

from didself._codec import b64url_decode, b64url_encode, dumps_compact
from didself.errors import (
    BadSuffix,
    BadThumbprint,
    DidSyntaxError,
    InvalidKey,
    MultipleSegments,
    UnsupportedMethod,
)

PREFIX = "did:self:"
THUMBPRINT_RE = re.compile(r"[A-Za-z0-9_-]{43}")
SUFFIX_RE = re.compile(r"[A-Za-z0-9._~-]{1,128}")

# kty -> crv -> coordinate members (all 32 bytes)
_CURVES = {
    "EC": {"P-256": ("x", "y")},
    "OKP": {"Ed25519": ("x",)},
}
# members hashed by RFC 7638, per kty
_REQUIRED_MEMBERS = {
    "EC": ("crv", "kty", "x", "y"),
    "OKP": ("crv", "kty", "x"),
    "RSA": ("e", "kty", "n"),
}


@dataclass(frozen=True)
class Jwk:
    """Public key in JWK form: EC/P-256 or OKP/Ed25519."""

    kty: str
    crv: str
    x: str
    y: str | None = None

    def __post_init__(self) -> None:
        curves = _CURVES.get(self.kty)
        if curves is None:
            raise InvalidKey(f"unsupported kty {self.kty!r}", field="kty")
        coords = curves.get(self.crv)
        if coords is None:
            raise InvalidKey(f"unsupported crv {self.crv!r} for kty {self.kty}", field="crv")
        if "y" not in coords and self.y is not None:
            raise InvalidKey(f"{self.kty} keys carry no y coordinate", field="y")
        for name in coords:
            value = getattr(self, name)
            if not isinstance(value, str):
                raise InvalidKey(f"missing coordinate {name}", field=name)
            try:
                raw = b64url_decode(value)
            except ValueError as exc:
                raise InvalidKey(f"{name}: {exc}", field=name) from None
            if len(raw) != 32:
                raise InvalidKey(f"{name} decodes to {len(raw)} bytes, expected 32", field=name)

    @classmethod
    def from_dict(cls, data: Any) -> Jwk:
        """Build from a JWK JSON object. Extra public members (kid, alg, use) are dropped."""
        if not isinstance(data, Mapping):
            raise InvalidKey("JWK must be a JSON object")
        if "d" in data:
            raise InvalidKey("private key material where a public key is expected", field="d")
        kty = data.get("kty")
        if not isinstance(kty, str) or kty not in _CURVES:
            raise InvalidKey(f"unsupported kty {kty!r}", field="kty")
        for name in ("kty", "crv", "x"):
            if not isinstance(data.get(name), str):
                raise InvalidKey(f"missing or non-string member {name}", field=name)
        y = data.get("y")
        if y is not None and not isinstance(y, str):
            raise InvalidKey("non-string member y", field="y")
        return cls(kty=data["kty"], crv=data["crv"], x=data["x"], y=y)

    def to_dict(self) -> dict[str, str]:
        out = {"kty": self.kty, "crv": self.crv, "x": self.x}
        if self.y is not None:
            out["y"] = self.y
        return out

    @property
    def alg(self) -> str:
        """JWS algorithm this key signs with."""
        return "ES256" if self.kty == "EC" else "EdDSA"


def thumbprint_input(key: Jwk | Mapping[str, Any]) -> bytes:
    """The canonical JSON bytes hashed by RFC 7638."""
    if isinstance(key, Jwk):
        members = key.to_dict()
    elif isinstance(key, Mapping):
        members = dict(key)
        # RSA is accepted here only so the published RFC vector can be checked
        if members.get("kty") != "RSA":
            members = Jwk.from_dict({k: v for k, v in members.items() if k != "d"}).to_dict()
    else:
        raise InvalidKey("JWK must be a Jwk or a JSON object")
    kty = members.get("kty")
    required = _REQUIRED_MEMBERS.get(kty) if isinstance(kty, str) else None
    if required is None:
        raise InvalidKey(f"unsupported kty {kty!r}", field="kty")
    canonical = {}
    for name in required:
        if not isinstance(members.get(name), str):
            raise InvalidKey(f"missing member {name}", field=name)
        canonical[name] = members[name]
    # required tuples are already sorted; dict preserves that order
    return dumps_compact(canonical)


def jwk_thumbprint(key: Jwk | Mapping[str, Any]) -> str:
    """RFC 7638 SHA-256 thumbprint, base64url without padding (43 chars)."""
    return b64url_encode(hashlib.sha256(thumbprint_input(key)).digest())


def _check_thumbprint(thumbprint: str) -> None:
    if not isinstance(thumbprint, str) or not THUMBPRINT_RE.fullmatch(thumbprint):
        raise BadThumbprint(f"thumbprint must be 43 base64url characters, got {thumbprint!r}")


def _check_suffix(suffix: str) -> None:
    if not isinstance(suffix, str):
        raise BadSuffix("suffix must be a string")
    if "/" in suffix:
        raise MultipleSegments(f"suffix must be a single path segment: {suffix!r}")
    if not SUFFIX_RE.fullmatch(suffix):
        raise BadSuffix(f"suffix must be 1-128 characters from [A-Za-z0-9._~-]: {suffix!r}")


@dataclass(frozen=True)
class Did:
    thumbprint: str
    suffix: str | None = None

    def __post_init__(self) -> None:
        _check_thumbprint(self.thumbprint)
        if self.suffix is not None:
            _check_suffix(self.suffix)

    @property
    def bare(self) -> Did:
        """The same DID without its suffix."""
        return Did(self.thumbprint) if self.suffix is not None else self

    def __str__(self) -> str:
        return format_did(self)


def parse_did(text: str) -> Did:
    if not isinstance(text, str):
        raise DidSyntaxError("DID must be a string")
    if not text.startswith(PREFIX):
        if text.startswith("did:"):
            raise UnsupportedMethod(f"unsupported DID method in {text[:40]!r}")
        raise DidSyntaxError(f"not a DID: {text[:40]!r}")
    rest = text[len(PREFIX):]
    thumbprint, sep, suffix = rest.partition("/")
    _check_thumbprint(thumbprint)
    if not sep:
        return Did(thumbprint)
    _check_suffix(suffix)
    return Did(thumbprint, suffix)


def format_did(did: Did) -> str:
    if did.suffix is None:
        return PREFIX + did.thumbprint
    return f"{PREFIX}{did.thumbprint}/{did.suffix}"


def did_from_key(key: Jwk, suffix: str | None = None) -> Did:
    return Did(jwk_thumbprint(key), suffix)
