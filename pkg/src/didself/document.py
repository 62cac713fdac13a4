"""DID document model and its deterministic JSON serialization.

Proofs always cover the exact bytes that were disseminated; the serializer
here only gives documents created by this library a stable byte form.
"""
from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from typing import Any

from didself._codec import dumps_compact, loads_strict
from didself.errors import (
    DanglingReference,
    DidSelfError,
    DocumentError,
    DuplicateMethodId,
    MissingMember,
)
from didself.identifier import Did, Jwk, format_did, parse_did

METHOD_TYPE = "JsonWebKey2020"
_DOC_MEMBERS = ("id", "verificationMethod", "authentication", "assertion")
_METHOD_MEMBERS = ("id", "type", "publicKeyJwk")


@dataclass(frozen=True)
class VerificationMethod:
    id: str
    public_key: Jwk
    type_label: str = METHOD_TYPE
    extra: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not isinstance(self.id, str) or len(self.id) < 2 or not self.id.startswith("#"):
            raise DocumentError(f"verification method id must be '#<name>', got {self.id!r}")
        if self.type_label != METHOD_TYPE:
            raise DocumentError(f"unsupported verification method type {self.type_label!r}")

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"id": self.id, "type": self.type_label,
                               "publicKeyJwk": self.public_key.to_dict()}
        for key in sorted(self.extra):
            out[key] = self.extra[key]
        return out


@dataclass(frozen=True)
class DidDocument:
    id: Did
    verification_methods: tuple[VerificationMethod, ...]
    authentication: tuple[str, ...] = ()
    assertion: tuple[str, ...] = ()
    # members this library does not interpret, kept for re-emission
    extra: Mapping[str, Any] = field(default_factory=dict)

    def method(self, ref: str) -> VerificationMethod:
        for vm in self.verification_methods:
            if vm.id == ref:
                return vm
        raise KeyError(ref)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "id": format_did(self.id),
            "verificationMethod": [vm.to_dict() for vm in self.verification_methods],
            "authentication": list(self.authentication),
            "assertion": list(self.assertion),
        }
        for key in sorted(self.extra):
            out[key] = self.extra[key]
        return out


def build_document(
    did: Did,
    methods: Iterable[VerificationMethod],
    authentication: Iterable[str] = (),
    assertion: Iterable[str] = (),
    extra: Mapping[str, Any] | None = None,
) -> DidDocument:
    methods = tuple(methods)
    seen: set[str] = set()
    for vm in methods:
        if vm.id in seen:
            raise DuplicateMethodId(f"verification method id {vm.id!r} is not unique")
        seen.add(vm.id)
    authentication, assertion = tuple(authentication), tuple(assertion)
    for name, refs in (("authentication", authentication), ("assertion", assertion)):
        for ref in refs:
            if ref not in seen:
                raise DanglingReference(f"{name} references unknown method {ref!r}")
    extra = dict(extra or {})
    clash = set(extra) & set(_DOC_MEMBERS)
    if clash:
        raise DocumentError(f"extra members shadow core members: {sorted(clash)}")
    return DidDocument(did, methods, authentication, assertion, extra)


def single_key_document(did: Did, key: Jwk) -> DidDocument:
    """One JsonWebKey2020 method ``#key1`` used for authentication and assertion."""
    return build_document(did, [VerificationMethod("#key1", key)], ["#key1"], ["#key1"])


def serialize_document(doc: DidDocument) -> bytes:
    """Compact UTF-8 JSON, members in the order id, verificationMethod,
    authentication, assertion, then any extra members sorted by name."""
    return dumps_compact(doc.to_dict())


def _parse_method(data: Any) -> VerificationMethod:
    if not isinstance(data, dict):
        raise DocumentError("verification method must be a JSON object")
    for name in _METHOD_MEMBERS:
        if name not in data:
            raise MissingMember(f"verification method missing {name}", member=name)
    extra = {k: v for k, v in data.items() if k not in _METHOD_MEMBERS}
    return VerificationMethod(data["id"], Jwk.from_dict(data["publicKeyJwk"]), data["type"], extra)


def _parse_refs(data: dict[str, Any], name: str) -> list[str]:
    refs = data.get(name, [])
    if not isinstance(refs, list) or not all(isinstance(r, str) for r in refs):
        raise DocumentError(f"{name} must be a list of fragment references")
    return refs


def document_from_dict(data: Any) -> DidDocument:
    if not isinstance(data, dict):
        raise DocumentError("DID document must be a JSON object")
    for name in ("id", "verificationMethod"):
        if name not in data:
            raise MissingMember(f"DID document missing {name}", member=name)
    if not isinstance(data["verificationMethod"], list):
        raise DocumentError("verificationMethod must be a list")
    try:
        did = parse_did(data["id"])
        methods = [_parse_method(m) for m in data["verificationMethod"]]
    except DocumentError:
        raise
    except DidSelfError as exc:
        # keep one error family for everything that is wrong with a document
        raise DocumentError(f"invalid document: {exc.message}", cause=exc.kind,
                            field=exc.details.get("field")) from exc
    extra = {k: v for k, v in data.items() if k not in _DOC_MEMBERS}
    return build_document(did, methods, _parse_refs(data, "authentication"),
                          _parse_refs(data, "assertion"), extra)


def parse_document(data: bytes | str) -> DidDocument:
    """Parse JSON text in any member order or whitespace layout."""
    try:
        obj = loads_strict(data)
    except ValueError as exc:
        raise DocumentError(f"document is not valid JSON: {exc}") from None
    return document_from_dict(obj)
