"""DID documents carried as JWTs.

Claim mapping: ``iss`` is the bare controller DID, ``sub`` the suffix (if
any), ``cnf.jwk`` the holder's key. The controller signs; its key travels in
the header either as ``jwk`` or as an ``x5c`` chain whose first certificate
is the controller's self-signed certificate.
"""
from __future__ import annotations

import base64
import binascii
import math
from collections.abc import Collection, Sequence
from dataclasses import dataclass
from typing import Any

from cryptography.hazmat.primitives.serialization import Encoding

from didself import jws
from didself._codec import dumps_compact, loads_strict
from didself._time import Instant, to_epoch
from didself.document import DidDocument, single_key_document
from didself.errors import (
    DidSelfError,
    Expired,
    InvalidKey,
    MalformedJws,
    MissingHeaderKey,
    NotYetValid,
    SignatureInvalid,
    ThumbprintMismatch,
)
from didself.identifier import Did, Jwk, format_did, jwk_thumbprint, parse_did
from didself.implicit_x509 import CertLike, load_cert, verify_chain, verify_root
from didself.keys import KeyPair, verify_signature
from didself.proof import check_algorithm, header_key


@dataclass(frozen=True)
class ImplicitJwtClaims:
    iss: str
    sub: str | None
    cnf: Jwk
    iat: int | float | None = None
    exp: int | float | None = None
    nbf: int | float | None = None

    @property
    def did(self) -> Did:
        """The holder's full DID: ``iss`` plus ``/sub`` when present."""
        return Did(parse_did(self.iss).thumbprint, self.sub)


def issue_jwt(
    controller: KeyPair,
    suffix: str | None,
    holder_key: Jwk,
    validity: tuple[Instant | None, Instant | None] | None = None,
    *,
    x5c: Sequence[CertLike] | None = None,
) -> str:
    """Sign a JWT for ``holder_key`` under the controller's DID.

    ``validity`` is ``(iat, exp)``; either may be None. With ``x5c`` the
    header carries that certificate chain (root first) instead of ``jwk``.
    Issuance never looks at the clock.
    """
    did = Did(jwk_thumbprint(controller.public), suffix)
    payload: dict[str, Any] = {"iss": format_did(did.bare)}
    if suffix is not None:
        payload["sub"] = suffix
    payload["cnf"] = {"jwk": holder_key.to_dict()}
    if validity is not None:
        iat, exp = validity
        if iat is not None:
            payload["iat"] = to_epoch(iat)
        if exp is not None:
            payload["exp"] = to_epoch(exp)

    header: dict[str, Any] = {"alg": controller.alg, "typ": "JWT"}
    if x5c is None:
        header["jwk"] = controller.public.to_dict()
    else:
        header["x5c"] = [
            base64.b64encode(load_cert(c, i).public_bytes(Encoding.DER)).decode("ascii")
            for i, c in enumerate(x5c)
        ]
    return jws.encode(header, dumps_compact(payload), controller)


def _numeric_date(payload: dict[str, Any], name: str) -> int | float | None:
    value = payload.get(name)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise MalformedJws(f"claim {name} must be a NumericDate")
    return value


def parse_claims(payload: bytes) -> ImplicitJwtClaims:
    try:
        data = loads_strict(payload)
    except ValueError as exc:
        raise MalformedJws(f"JWT payload is not JSON: {exc}") from None
    if not isinstance(data, dict):
        raise MalformedJws("JWT payload is not a JSON object")
    iss, sub, cnf = data.get("iss"), data.get("sub"), data.get("cnf")
    try:
        if not isinstance(iss, str):
            raise MalformedJws("iss claim missing")
        issuer = parse_did(iss)
        if issuer.suffix is not None:
            raise MalformedJws("iss must be a did:self DID without suffix")
        if sub is not None:
            if not isinstance(sub, str):
                raise MalformedJws("sub claim must be a string")
            Did(issuer.thumbprint, sub)
        if not isinstance(cnf, dict) or "jwk" not in cnf:
            raise MalformedJws("cnf claim must carry a jwk")
        holder = Jwk.from_dict(cnf["jwk"])
    except MalformedJws:
        raise
    except DidSelfError as exc:
        raise MalformedJws(f"invalid claims: {exc.message}", cause=exc.kind) from None
    return ImplicitJwtClaims(
        iss=iss, sub=sub, cnf=holder,
        iat=_numeric_date(data, "iat"), exp=_numeric_date(data, "exp"),
        nbf=_numeric_date(data, "nbf"),
    )


def _x5c_key(header: dict[str, Any], at: Instant, clock_skew: int) -> Jwk:
    certs = header["x5c"]
    if not isinstance(certs, list) or not certs or not all(isinstance(c, str) for c in certs):
        raise MalformedJws("x5c must be a non-empty list of base64 certificates")
    try:
        ders = [base64.b64decode(c, validate=True) for c in certs]
    except (binascii.Error, ValueError) as exc:
        raise MalformedJws(f"x5c entry is not base64: {exc}") from None
    if len(ders) == 1:
        return verify_root(ders[0], at, clock_skew=clock_skew)
    return verify_chain(ders, at, clock_skew=clock_skew).controller_key


def verify_jwt(
    token: str | bytes,
    at: Instant,
    *,
    clock_skew: int = 0,
    algorithms: Collection[str] | None = None,
) -> ImplicitJwtClaims:
    """Verify a did:self JWT at time ``at``.

    Extract the controller key from the header, match its thumbprint
    against ``iss``, check the signature, then the iat/nbf/exp window.
    ``exp`` itself is outside the window.
    """
    parsed = jws.decode(token)
    check_algorithm(parsed.header["alg"], algorithms)
    claims = parse_claims(parsed.payload)

    if "jwk" in parsed.header:
        key = header_key(parsed)
    elif "x5c" in parsed.header:
        key = _x5c_key(parsed.header, at, clock_skew)
        if key.alg != parsed.header["alg"]:
            raise MalformedJws("alg does not match the x5c certificate key")
    else:
        raise MissingHeaderKey("JWT header carries neither jwk nor x5c")

    if jwk_thumbprint(key) != parse_did(claims.iss).thumbprint:
        raise ThumbprintMismatch("signing key thumbprint does not match iss")
    try:
        ok = verify_signature(key, parsed.signing_input(), parsed.signature)
    except InvalidKey as exc:
        raise MalformedJws(f"header key unusable: {exc.message}") from None
    if not ok:
        raise SignatureInvalid("JWT signature does not verify")

    now = to_epoch(at)
    if claims.exp is not None and now >= claims.exp + clock_skew:
        raise Expired(f"JWT expired at {claims.exp}")
    for name in ("nbf", "iat"):
        start = getattr(claims, name)
        if start is not None and now < start - clock_skew:
            raise NotYetValid(f"JWT {name} {start} is in the future")
    return claims


def reconstruct_from_jwt(claims: ImplicitJwtClaims) -> DidDocument:
    return single_key_document(claims.did, claims.cnf)
