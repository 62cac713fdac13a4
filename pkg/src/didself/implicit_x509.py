"""DID documents carried by X.509 certificate chains.

Chain profile, root first:

* index 0: self-signed controller certificate, SAN URI ``did:self:<T>``,
  where ``T`` is the thumbprint of the certificate's own public key;
* optional intermediates issued by the controller, CA flag set, suffix-less
  SAN with the same ``T``;
* last: the holder certificate, SAN ``did:self:<T>`` or ``did:self:<T>/<suffix>``.
"""
from __future__ import annotations

import os
import re
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Union

from cryptography import x509
from cryptography.exceptions import InvalidSignature, UnsupportedAlgorithm
from cryptography.hazmat.primitives import hashes
from cryptography.hazmat.primitives.asymmetric import ec
from cryptography.hazmat.primitives.serialization import Encoding
from cryptography.x509.oid import NameOID, SignatureAlgorithmOID

from didself._time import Instant, to_datetime, to_epoch
from didself.document import DidDocument, single_key_document
from didself.errors import (
    BrokenLink,
    ChainError,
    ChainTooShort,
    DidSelfError,
    Expired,
    InvalidKey,
    MalformedCertificate,
    MissingCaConstraint,
    NotYetValid,
    SanError,
    SigningError,
    ThumbprintMismatch,
)
from didself.identifier import PREFIX, Did, Jwk, format_did, jwk_thumbprint, parse_did
from didself.keys import KeyPair, load_public, public_jwk

CertLike = Union[bytes, x509.Certificate]

_PEM_BLOCK = re.compile(
    rb"-----BEGIN CERTIFICATE-----\s+.*?-----END CERTIFICATE-----", re.DOTALL
)
_SIG_ALGS = {SignatureAlgorithmOID.ECDSA_WITH_SHA256: "ES256", SignatureAlgorithmOID.ED25519: "EdDSA"}


@dataclass(frozen=True)
class ChainVerdict:
    did: Did
    holder_key: Jwk
    controller_key: Jwk
    not_before: int
    not_after: int


# -- encoding ----------------------------------------------------------------


def load_chain(data: bytes | str) -> list[bytes]:
    """DER certificates from concatenated PEM blocks (or one raw DER blob)."""
    if isinstance(data, str):
        data = data.encode("utf-8", "surrogateescape")
    blocks = _PEM_BLOCK.findall(data)
    if not blocks:
        if b"-----BEGIN" in data:
            raise MalformedCertificate("no certificate PEM blocks found")
        return [data]
    out = []
    for block in blocks:
        try:
            out.append(x509.load_pem_x509_certificate(block).public_bytes(Encoding.DER))
        except (ValueError, x509.InvalidVersion) as exc:
            raise MalformedCertificate(f"bad PEM certificate: {exc}") from None
    return out


def pem_chain(chain: Sequence[CertLike]) -> str:
    return "".join(
        load_cert(c, i).public_bytes(Encoding.PEM).decode("ascii") for i, c in enumerate(chain)
    )


def load_cert(cert: CertLike, index: int = 0) -> x509.Certificate:
    if isinstance(cert, x509.Certificate):
        return cert
    try:
        return x509.load_der_x509_certificate(bytes(cert))
    except (ValueError, TypeError, x509.InvalidVersion) as exc:
        raise MalformedCertificate(f"certificate {index} is not DER: {exc}", index=index) from None


def cert_jwk(cert: x509.Certificate, index: int = 0) -> Jwk:
    try:
        return public_jwk(cert.public_key())
    except (InvalidKey, ValueError, UnsupportedAlgorithm) as exc:
        raise MalformedCertificate(f"certificate {index} has an unsupported key: {exc}",
                                   index=index) from None


def san_did(cert: x509.Certificate, index: int = 0) -> Did:
    """The single did:self URI in the certificate's SAN extension."""
    try:
        ext = cert.extensions.get_extension_for_class(x509.SubjectAlternativeName)
    except x509.ExtensionNotFound:
        raise SanError(f"certificate {index} has no SubjectAlternativeName", index=index) from None
    except ValueError as exc:
        raise SanError(f"certificate {index} has unreadable extensions: {exc}", index=index) from None
    uris = [u for u in ext.value.get_values_for_type(x509.UniformResourceIdentifier)
            if u.startswith(PREFIX)]
    if len(uris) != 1:
        raise SanError(f"certificate {index} needs exactly one did:self SAN URI, has {len(uris)}",
                       index=index)
    try:
        return parse_did(uris[0])
    except DidSelfError as exc:
        raise SanError(f"certificate {index} SAN URI unparseable: {exc.message}", index=index) from None


# -- issuance ----------------------------------------------------------------


def _name(role: str) -> x509.Name:
    # random serialNumber keeps subject names distinct for path builders
    return x509.Name([
        x509.NameAttribute(NameOID.ORGANIZATION_NAME, "did:self"),
        x509.NameAttribute(NameOID.COMMON_NAME, role),
        x509.NameAttribute(NameOID.SERIAL_NUMBER, os.urandom(8).hex()),
    ])


def _build(
    subject_key: Jwk,
    subject: x509.Name,
    issuer: KeyPair,
    issuer_cert: x509.Certificate | None,
    san: Did,
    ca: bool,
    validity: tuple[Instant, Instant],
) -> x509.Certificate:
    pub = load_public(subject_key)
    not_before, not_after = validity
    builder = (
        x509.CertificateBuilder()
        .subject_name(subject)
        .issuer_name(issuer_cert.subject if issuer_cert is not None else subject)
        .public_key(pub)
        .serial_number(x509.random_serial_number())
        .not_valid_before(to_datetime(not_before))
        .not_valid_after(to_datetime(not_after))
        .add_extension(x509.BasicConstraints(ca=ca, path_length=None), critical=True)
        .add_extension(
            x509.KeyUsage(
                digital_signature=True, content_commitment=False, key_encipherment=False,
                data_encipherment=False, key_agreement=False, key_cert_sign=ca, crl_sign=ca,
                encipher_only=False, decipher_only=False,
            ),
            critical=True,
        )
        .add_extension(x509.SubjectAlternativeName([x509.UniformResourceIdentifier(format_did(san))]),
                       critical=False)
        .add_extension(x509.SubjectKeyIdentifier.from_public_key(pub), critical=False)
    )
    issuer_pub = load_public(issuer.public)
    builder = builder.add_extension(
        x509.AuthorityKeyIdentifier.from_issuer_public_key(issuer_pub), critical=False
    )
    algorithm = hashes.SHA256() if isinstance(issuer.private, ec.EllipticCurvePrivateKey) else None
    try:
        return builder.sign(issuer.private, algorithm)
    except (ValueError, TypeError) as exc:
        raise SigningError(f"certificate signing failed: {exc}") from exc


def make_root_cert(controller: KeyPair, validity: tuple[Instant, Instant]) -> x509.Certificate:
    """Self-signed CA certificate whose SAN is the controller's bare DID."""
    did = Did(jwk_thumbprint(controller.public))
    return _build(controller.public, _name("controller"), controller, None, did, True, validity)


def issue_cert(
    issuer: KeyPair,
    issuer_cert: CertLike,
    subject_key: Jwk,
    san: Did,
    is_intermediate: bool,
    validity: tuple[Instant, Instant],
) -> x509.Certificate:
    issuer_cert = load_cert(issuer_cert)
    issuer_did = san_did(issuer_cert)
    if san.thumbprint != issuer_did.thumbprint:
        raise ThumbprintMismatch("subject DID thumbprint differs from the issuer's DID")
    if is_intermediate and san.suffix is not None:
        raise SanError("intermediate certificates carry the suffix-less DID")
    if cert_jwk(issuer_cert) != issuer.public:
        raise SigningError("issuer key pair does not match issuer certificate")
    role = "intermediate" if is_intermediate else "holder"
    return _build(subject_key, _name(role), issuer, issuer_cert, san, is_intermediate, validity)


# -- verification ------------------------------------------------------------


def _check_link(cert: x509.Certificate, issuer: x509.Certificate, index: int) -> None:
    if cert.signature_algorithm_oid not in _SIG_ALGS:
        raise BrokenLink(f"certificate {index} uses unsupported signature algorithm "
                         f"{cert.signature_algorithm_oid.dotted_string}", index=index)
    try:
        cert.verify_directly_issued_by(issuer)
    except (InvalidSignature, ValueError, TypeError, UnsupportedAlgorithm) as exc:
        what = "is not self-signed" if index == 0 else f"is not issued by certificate {index - 1}"
        raise BrokenLink(f"certificate {index} {what}: {exc or 'bad signature'}", index=index) from None


def _window(cert: x509.Certificate) -> tuple[int, int]:
    return to_epoch(cert.not_valid_before_utc), to_epoch(cert.not_valid_after_utc)


def _check_window(cert: x509.Certificate, index: int, at: int, skew: int) -> None:
    # notAfter itself is already outside the window
    not_before, not_after = _window(cert)
    if at < not_before - skew:
        raise NotYetValid(f"certificate {index} not valid before {not_before}", index=index)
    if at >= not_after + skew:
        raise Expired(f"certificate {index} expired at {not_after}", index=index)


def _check_ca(cert: x509.Certificate, index: int, below: int) -> None:
    """``below`` counts the non-leaf certificates issued underneath ``cert``."""
    try:
        bc = cert.extensions.get_extension_for_class(x509.BasicConstraints).value
    except x509.ExtensionNotFound:
        bc = None
    except ValueError as exc:
        raise MalformedCertificate(f"certificate {index} extensions unreadable: {exc}", index=index) from None
    if bc is None or not bc.ca:
        raise MissingCaConstraint(f"certificate {index} issues others but is not a CA", index=index)
    if bc.path_length is not None and below > bc.path_length:
        raise MissingCaConstraint(f"certificate {index} path length {bc.path_length} exceeded",
                                  index=index)
    try:
        ku = cert.extensions.get_extension_for_class(x509.KeyUsage).value
    except x509.ExtensionNotFound:
        return
    if not ku.key_cert_sign:
        raise MissingCaConstraint(f"certificate {index} key usage lacks keyCertSign", index=index)


def verify_root(cert: CertLike, at: Instant, *, clock_skew: int = 0) -> Jwk:
    """Validate a lone controller certificate and return its key."""
    cert = load_cert(cert)
    _check_link(cert, cert, 0)
    _check_window(cert, 0, to_epoch(at), clock_skew)
    did = san_did(cert)
    if did.suffix is not None:
        raise SanError("controller certificate SAN must be suffix-less", index=0)
    key = cert_jwk(cert)
    if jwk_thumbprint(key) != did.thumbprint:
        raise ThumbprintMismatch("controller key thumbprint differs from SAN DID", index=0)
    return key


def verify_chain(
    chain: Sequence[CertLike] | bytes | str, at: Instant, *, clock_skew: int = 0
) -> ChainVerdict:
    """Validate a root-first chain and return the holder's DID and keys.

    Checks run in order over the whole chain: signature links, validity
    windows, CA constraints, SAN DIDs, root key thumbprint.
    """
    if isinstance(chain, (bytes, bytearray, str)):
        chain = load_chain(chain)
    if not isinstance(chain, Sequence):
        raise ChainError("certificate chain must be a sequence")
    if len(chain) < 2:
        raise ChainTooShort(f"chain needs a controller and a holder certificate, got {len(chain)}")
    certs = [load_cert(c, i) for i, c in enumerate(chain)]
    moment = to_epoch(at)

    for i, cert in enumerate(certs):
        _check_link(cert, certs[i - 1] if i else cert, i)
    for i, cert in enumerate(certs):
        _check_window(cert, i, moment, clock_skew)
    last = len(certs) - 1
    for i, cert in enumerate(certs[:-1]):
        _check_ca(cert, i, below=last - i - 1)

    dids = [san_did(cert, i) for i, cert in enumerate(certs)]
    for i, did in enumerate(dids[:-1]):
        if did.suffix is not None:
            raise SanError(f"certificate {i} is not the holder and must carry a suffix-less DID",
                           index=i)
    thumbprint = dids[0].thumbprint
    for i, did in enumerate(dids):
        if did.thumbprint != thumbprint:
            raise ThumbprintMismatch(f"certificate {i} SAN names a different DID", index=i)

    controller_key = cert_jwk(certs[0], 0)
    if jwk_thumbprint(controller_key) != thumbprint:
        raise ThumbprintMismatch("root key thumbprint differs from the SAN DID", index=0)
    windows = [_window(c) for c in certs]
    return ChainVerdict(
        did=dids[-1],
        holder_key=cert_jwk(certs[-1], last),
        controller_key=controller_key,
        not_before=max(w[0] for w in windows),
        not_after=min(w[1] for w in windows),
    )


def chain_algorithms(chain: Sequence[CertLike]) -> set[str]:
    """JWS-style names of the signature algorithms used across a chain."""
    return {_SIG_ALGS.get(load_cert(c, i).signature_algorithm_oid, "unsupported")
            for i, c in enumerate(chain)}


def reconstruct_from_chain(verdict: ChainVerdict) -> DidDocument:
    return single_key_document(verdict.did, verdict.holder_key)


__all__ = [
    "ChainVerdict",
    "chain_algorithms",
    "issue_cert",
    "load_cert",
    "load_chain",
    "make_root_cert",
    "pem_chain",
    "reconstruct_from_chain",
    "san_did",
    "verify_chain",
    "verify_root",
]
