"""Registry-less resolution: DID + attestation bundle -> verified document.

Nothing here touches the network or the filesystem. The outcome depends only
on the DID, the bundle, the verification instant and the policy.
"""
from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Any, Union

from didself._codec import b64url_decode, b64url_encode, dumps_compact, loads_strict
from didself._time import Instant, to_epoch
from didself.document import DidDocument
from didself.errors import (
    BodyShapeMismatch,
    BundleError,
    DidSelfError,
    DocumentIdMismatch,
    PolicyViolation,
    UnknownKind,
)
from didself.identifier import format_did, parse_did
from didself.implicit_jwt import reconstruct_from_jwt, verify_jwt
from didself.implicit_x509 import chain_algorithms, load_chain, reconstruct_from_chain, verify_chain
from didself.keys import ALGORITHMS
from didself.proof import verify_proof

KINDS = ("explicit", "jwt", "x509")
ENVELOPE_VERSION = 1


@dataclass(frozen=True)
class ExplicitBody:
    document: bytes
    proof: str


Body = Union[ExplicitBody, str]


@dataclass(frozen=True)
class Bundle:
    """One DID plus one attestation.

    ``body`` is an :class:`ExplicitBody` for ``explicit``, the compact token
    for ``jwt`` and concatenated PEM text (root first) for ``x509``.
    """

    did: str
    kind: str
    body: Body
    meta: Mapping[str, Any] | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise UnknownKind(f"unknown bundle kind {self.kind!r}")
        explicit = isinstance(self.body, ExplicitBody)
        if explicit != (self.kind == "explicit") or not (explicit or isinstance(self.body, str)):
            raise BodyShapeMismatch(f"body does not fit kind {self.kind!r}")
        if self.meta is not None and not isinstance(self.meta, Mapping):
            raise BundleError("meta must be a JSON object")
        parse_did(self.did)


@dataclass(frozen=True)
class ResolverPolicy:
    require_expiry: bool = False
    clock_skew: int = 0
    allowed_algorithms: frozenset[str] = field(default_factory=lambda: ALGORITHMS)


@dataclass(frozen=True)
class Resolution:
    document: DidDocument
    kind: str
    verified_at: int
    validity: tuple[int | float | None, int | float | None] | None = None


def resolve(
    did: str, bundle: Bundle, at: Instant, policy: ResolverPolicy | None = None
) -> Resolution:
    policy = policy or ResolverPolicy()
    queried = parse_did(did)
    if parse_did(bundle.did) != queried:
        raise DocumentIdMismatch(f"bundle is for {bundle.did}, not {format_did(queried)}")
    now = to_epoch(at)
    algs = policy.allowed_algorithms

    validity: tuple[Any, Any] | None = None
    if bundle.kind == "explicit":
        assert isinstance(bundle.body, ExplicitBody)
        if policy.require_expiry:
            raise PolicyViolation("explicit proofs carry no expiry but policy requires one")
        doc = verify_proof(queried, bundle.body.document, bundle.body.proof, algorithms=algs)
    elif bundle.kind == "jwt":
        claims = verify_jwt(bundle.body, now, clock_skew=policy.clock_skew, algorithms=algs)
        if policy.require_expiry and claims.exp is None:
            raise PolicyViolation("JWT has no exp but policy requires one")
        doc = reconstruct_from_jwt(claims)
        validity = (claims.iat, claims.exp)
    else:
        chain = load_chain(bundle.body)
        verdict = verify_chain(chain, now, clock_skew=policy.clock_skew)
        disallowed = chain_algorithms(chain) - set(algs)
        if disallowed:
            raise PolicyViolation(f"chain uses disallowed algorithms {sorted(disallowed)}")
        doc = reconstruct_from_chain(verdict)
        validity = (verdict.not_before, verdict.not_after)

    if doc.id != queried:
        raise DocumentIdMismatch(
            f"attestation describes {format_did(doc.id)}, not {format_did(queried)}"
        )
    return Resolution(doc, bundle.kind, now, validity)


# -- envelope ----------------------------------------------------------------


def encode_bundle(bundle: Bundle) -> bytes:
    """JSON envelope ``{"v":1,"did":..,"kind":..,"body":..,"meta":..}``.

    Explicit document bytes are base64url so they survive byte-exact.
    """
    if isinstance(bundle.body, ExplicitBody):
        body: Any = {"document": b64url_encode(bundle.body.document), "proof": bundle.body.proof}
    else:
        body = bundle.body
    envelope: dict[str, Any] = {"v": ENVELOPE_VERSION, "did": bundle.did, "kind": bundle.kind,
                                "body": body}
    if bundle.meta is not None:
        envelope["meta"] = dict(bundle.meta)
    return dumps_compact(envelope)


def decode_bundle(data: bytes | str) -> Bundle:
    try:
        env = loads_strict(data)
    except ValueError as exc:
        raise BundleError(f"bundle is not JSON: {exc}") from None
    if not isinstance(env, dict):
        raise BundleError("bundle must be a JSON object")
    if env.get("v") != ENVELOPE_VERSION or isinstance(env.get("v"), bool):
        raise BundleError(f"unsupported bundle version {env.get('v')!r}")
    for name in ("did", "kind", "body"):
        if name not in env:
            raise BundleError(f"bundle missing {name}")
    kind, body = env["kind"], env["body"]
    if kind not in KINDS:
        raise UnknownKind(f"unknown bundle kind {kind!r}")
    if not isinstance(env["did"], str):
        raise BundleError("bundle did must be a string")
    if kind == "explicit":
        if (not isinstance(body, dict) or set(body) != {"document", "proof"}
                or not all(isinstance(v, str) for v in body.values())):
            raise BodyShapeMismatch("explicit body needs string members document and proof")
        try:
            document = b64url_decode(body["document"])
        except ValueError as exc:
            raise BodyShapeMismatch(f"explicit document is not base64url: {exc}") from None
        body = ExplicitBody(document, body["proof"])
    elif not isinstance(body, str):
        raise BodyShapeMismatch(f"{kind} body must be a string")
    try:
        return Bundle(env["did"], kind, body, env.get("meta"))
    except BundleError:
        raise
    except DidSelfError as exc:
        raise BundleError(f"bundle did invalid: {exc.message}", cause=exc.kind) from None
