"""did:self: registry-less decentralized identifiers.

Identifiers are derived from the controller's JWK thumbprint; documents are
bound to them by a controller-signed JWS, a JWT, or an X.509 chain.
"""
from didself.document import (
    DidDocument,
    VerificationMethod,
    build_document,
    parse_document,
    serialize_document,
    single_key_document,
)
from didself.errors import DidSelfError
from didself.identifier import Did, Jwk, did_from_key, format_did, jwk_thumbprint, parse_did
from didself.implicit_jwt import ImplicitJwtClaims, issue_jwt, reconstruct_from_jwt, verify_jwt
from didself.implicit_x509 import (
    ChainVerdict,
    issue_cert,
    make_root_cert,
    reconstruct_from_chain,
    verify_chain,
)
from didself.keys import KeyPair
from didself.proof import sign_document, verify_proof
from didself.resolver import (
    Bundle,
    ExplicitBody,
    Resolution,
    ResolverPolicy,
    decode_bundle,
    encode_bundle,
    resolve,
)

__all__ = [
    "Bundle",
    "ChainVerdict",
    "Did",
    "DidDocument",
    "DidSelfError",
    "ExplicitBody",
    "ImplicitJwtClaims",
    "Jwk",
    "KeyPair",
    "Resolution",
    "ResolverPolicy",
    "VerificationMethod",
    "build_document",
    "decode_bundle",
    "did_from_key",
    "encode_bundle",
    "format_did",
    "issue_cert",
    "issue_jwt",
    "jwk_thumbprint",
    "make_root_cert",
    "parse_did",
    "parse_document",
    "reconstruct_from_chain",
    "reconstruct_from_jwt",
    "resolve",
    "serialize_document",
    "sign_document",
    "single_key_document",
    "verify_chain",
    "verify_jwt",
    "verify_proof",
]
