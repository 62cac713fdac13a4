"""Controller-signed JWS proofs binding a DID document to a did:self DID."""
from __future__ import annotations

from collections.abc import Collection

from didself import jws
from didself._codec import b64url_encode
from didself.document import DidDocument, parse_document
from didself.errors import (
    DocumentIdMismatch,
    InvalidKey,
    MalformedJws,
    MissingHeaderKey,
    PolicyViolation,
    SignatureInvalid,
    ThumbprintMismatch,
)
from didself.identifier import Did, Jwk, format_did, jwk_thumbprint
from didself.keys import ALGORITHMS, KeyPair, verify_signature

ProofJws = str


def sign_document(doc_bytes: bytes, controller: KeyPair) -> ProofJws:
    """Compact JWS over ``doc_bytes`` with the controller's public JWK in the header."""
    header = {"alg": controller.alg, "jwk": controller.public.to_dict()}
    return jws.encode(header, bytes(doc_bytes), controller)


def header_key(token: jws.CompactJws) -> Jwk:
    """Step (i): the embedded ``jwk``, checked against the declared ``alg``."""
    if "jwk" not in token.header:
        raise MissingHeaderKey("JWS header carries no jwk")
    try:
        key = Jwk.from_dict(token.header["jwk"])
    except InvalidKey as exc:
        raise MalformedJws(f"header jwk invalid: {exc.message}", field=exc.field) from None
    if key.alg != token.header["alg"]:
        raise MalformedJws(f"alg {token.header['alg']} does not match {key.kty}/{key.crv} key")
    return key


def check_algorithm(alg: str, allowed: Collection[str] | None) -> None:
    if allowed is not None and alg not in allowed:
        raise PolicyViolation(f"algorithm {alg} not allowed")


def verify_proof(
    did: Did,
    doc_bytes: bytes,
    proof: ProofJws | bytes,
    *,
    algorithms: Collection[str] | None = None,
) -> DidDocument:
    """Check a proof and return the parsed document.

    Steps run in a fixed order: extract the header key, match its thumbprint
    against ``did``, verify the signature over ``doc_bytes``, then require
    the document id to equal ``did`` (suffix included). The first failing
    step raises.
    """
    token = jws.decode(proof)
    check_algorithm(token.header["alg"], algorithms)
    key = header_key(token)

    if jwk_thumbprint(key) != did.thumbprint:
        raise ThumbprintMismatch("header jwk thumbprint does not match the DID")

    payload_b64 = b64url_encode(bytes(doc_bytes))
    # detached payload (empty segment) is allowed; an attached one must be these bytes
    if token.payload_b64 and token.payload_b64 != payload_b64:
        raise SignatureInvalid("proof payload differs from the supplied document")
    try:
        ok = verify_signature(key, token.signing_input(payload_b64), token.signature)
    except InvalidKey as exc:
        raise MalformedJws(f"header jwk unusable: {exc.message}", field=exc.field) from None
    if not ok:
        raise SignatureInvalid("proof signature does not verify under the header jwk")

    doc = parse_document(doc_bytes)
    if doc.id != did:
        raise DocumentIdMismatch(
            f"document id {format_did(doc.id)} does not match {format_did(did)}"
        )
    return doc


__all__ = ["ALGORITHMS", "ProofJws", "sign_document", "verify_proof"]
