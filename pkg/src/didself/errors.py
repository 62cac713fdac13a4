"""Exception hierarchy.

Every failure raised by the library is a :class:`DidSelfError`. Each class
carries a machine-readable ``kind`` and the verification ``step`` it belongs
to, so callers (and the CLI) can report exactly which check failed.
"""
from __future__ import annotations

from typing import Any


class DidSelfError(Exception):
    kind = "error"
    step = "structure"

    def __init__(self, message: str, **details: Any) -> None:
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"error": self.kind, "step": self.step, "message": self.message}
        out.update({k: v for k, v in self.details.items() if v is not None})
        return out


# -- identifier --------------------------------------------------------------


class InvalidKey(DidSelfError):
    """A JWK failed validation. ``field`` names the offending member."""

    kind = "invalid_key"

    def __init__(self, message: str, field: str | None = None) -> None:
        super().__init__(message, field=field)
        self.field = field


class DidSyntaxError(DidSelfError):
    kind = "did_syntax"


class UnsupportedMethod(DidSyntaxError):
    kind = "unsupported_method"


class BadThumbprint(DidSyntaxError):
    kind = "bad_thumbprint"


class BadSuffix(DidSyntaxError):
    kind = "bad_suffix"


class MultipleSegments(DidSyntaxError):
    kind = "multiple_segments"


# -- document ----------------------------------------------------------------


class DocumentError(DidSelfError):
    kind = "invalid_document"


class MissingMember(DocumentError):
    kind = "missing_member"


class DanglingReference(DocumentError):
    kind = "dangling_reference"


class DuplicateMethodId(DocumentError):
    kind = "duplicate_method_id"


# -- JWS / proof / JWT -------------------------------------------------------


class MalformedJws(DidSelfError):
    kind = "malformed_jws"


class MissingHeaderKey(DidSelfError):
    kind = "missing_header_key"
    step = "extract"


class ThumbprintMismatch(DidSelfError):
    kind = "thumbprint_mismatch"
    step = "thumbprint"


class SignatureInvalid(DidSelfError):
    kind = "signature_invalid"
    step = "signature"


class DocumentIdMismatch(DidSelfError):
    kind = "id_mismatch"
    step = "id-mismatch"


class Expired(DidSelfError):
    kind = "expired"
    step = "expiry"


class NotYetValid(DidSelfError):
    kind = "not_yet_valid"
    step = "expiry"


class SigningError(DidSelfError):
    kind = "signing_failed"
    step = "signing"


# -- X.509 -------------------------------------------------------------------


class ChainError(DidSelfError):
    kind = "invalid_chain"


class MalformedCertificate(ChainError):
    kind = "malformed_certificate"


class ChainTooShort(ChainError):
    kind = "chain_too_short"


class BrokenLink(ChainError):
    kind = "broken_link"
    step = "signature"


class MissingCaConstraint(ChainError):
    kind = "missing_ca_constraint"
    step = "ca-constraint"


class SanError(ChainError):
    kind = "san_invalid"
    step = "san"


# -- resolver / bundle -------------------------------------------------------


class BundleError(DidSelfError):
    kind = "malformed_bundle"


class UnknownKind(BundleError):
    kind = "unknown_kind"


class BodyShapeMismatch(BundleError):
    kind = "body_shape_mismatch"


class PolicyViolation(DidSelfError):
    kind = "policy_violation"
    step = "policy"
