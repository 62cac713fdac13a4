"""Key pairs and raw JWS-style signing for ES256 and EdDSA."""
from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from typing import Any, Union

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives import hashes
from cryptography.hazmat.primitives.asymmetric import ec, ed25519
from cryptography.hazmat.primitives.serialization import (
    Encoding,
    NoEncryption,
    PrivateFormat,
    PublicFormat,
)
from cryptography.hazmat.primitives.asymmetric.utils import (
    decode_dss_signature,
    encode_dss_signature,
)

from didself._codec import b64url_decode, b64url_encode
from didself.errors import InvalidKey, SigningError
from didself.identifier import Jwk

ALGORITHMS = frozenset({"ES256", "EdDSA"})

PrivateKey = Union[ec.EllipticCurvePrivateKey, ed25519.Ed25519PrivateKey]
PublicKey = Union[ec.EllipticCurvePublicKey, ed25519.Ed25519PublicKey]


def public_jwk(key: PublicKey) -> Jwk:
    """JWK for a cryptography public key object."""
    if isinstance(key, ec.EllipticCurvePublicKey):
        if not isinstance(key.curve, ec.SECP256R1):
            raise InvalidKey(f"unsupported curve {key.curve.name}", field="crv")
        nums = key.public_numbers()
        return Jwk("EC", "P-256", b64url_encode(nums.x.to_bytes(32, "big")),
                   b64url_encode(nums.y.to_bytes(32, "big")))
    if isinstance(key, ed25519.Ed25519PublicKey):
        return Jwk("OKP", "Ed25519", b64url_encode(key.public_bytes(Encoding.Raw, PublicFormat.Raw)))
    raise InvalidKey(f"unsupported key type {type(key).__name__}", field="kty")


def load_public(jwk: Jwk) -> PublicKey:
    """cryptography public key for a JWK; rejects points off the curve."""
    x = b64url_decode(jwk.x)
    try:
        if jwk.kty == "EC":
            y = b64url_decode(jwk.y or "")
            return ec.EllipticCurvePublicNumbers(
                int.from_bytes(x, "big"), int.from_bytes(y, "big"), ec.SECP256R1()
            ).public_key()
        return ed25519.Ed25519PublicKey.from_public_bytes(x)
    except ValueError as exc:
        raise InvalidKey(f"not a valid public key: {exc}", field="x") from None


@dataclass(frozen=True)
class KeyPair:
    public: Jwk
    private: PrivateKey

    @classmethod
    def generate(cls, alg: str = "ES256") -> KeyPair:
        if alg == "ES256":
            priv: PrivateKey = ec.generate_private_key(ec.SECP256R1())
        elif alg == "EdDSA":
            priv = ed25519.Ed25519PrivateKey.generate()
        else:
            raise InvalidKey(f"unsupported algorithm {alg!r}", field="alg")
        return cls(public_jwk(priv.public_key()), priv)

    @classmethod
    def from_private(cls, private: PrivateKey) -> KeyPair:
        return cls(public_jwk(private.public_key()), private)

    @property
    def alg(self) -> str:
        return self.public.alg

    def sign(self, message: bytes) -> bytes:
        """JWS signature bytes: raw r||s for ES256, 64-byte Ed25519 for EdDSA."""
        try:
            if isinstance(self.private, ec.EllipticCurvePrivateKey):
                r, s = decode_dss_signature(self.private.sign(message, ec.ECDSA(hashes.SHA256())))
                return r.to_bytes(32, "big") + s.to_bytes(32, "big")
            return self.private.sign(message)
        except Exception as exc:  # backend failures surface as SigningError
            raise SigningError(f"signing failed: {exc}") from exc

    def to_private_dict(self) -> dict[str, str]:
        out = self.public.to_dict()
        if isinstance(self.private, ec.EllipticCurvePrivateKey):
            d = self.private.private_numbers().private_value.to_bytes(32, "big")
        else:
            d = self.private.private_bytes(Encoding.Raw, PrivateFormat.Raw, NoEncryption())
        out["d"] = b64url_encode(d)
        return out

    @classmethod
    def from_private_dict(cls, data: Mapping[str, Any]) -> KeyPair:
        if not isinstance(data, Mapping) or not isinstance(data.get("d"), str):
            raise InvalidKey("private JWK needs a d member", field="d")
        public = Jwk.from_dict({k: v for k, v in data.items() if k != "d"})
        try:
            d = b64url_decode(data["d"])
        except ValueError as exc:
            raise InvalidKey(f"d: {exc}", field="d") from None
        if len(d) != 32:
            raise InvalidKey("d must decode to 32 bytes", field="d")
        try:
            if public.kty == "EC":
                priv: PrivateKey = ec.derive_private_key(int.from_bytes(d, "big"), ec.SECP256R1())
            else:
                priv = ed25519.Ed25519PrivateKey.from_private_bytes(d)
        except ValueError as exc:
            raise InvalidKey(f"d: {exc}", field="d") from None
        pair = cls.from_private(priv)
        if pair.public != public:
            raise InvalidKey("public members do not match d", field="x")
        return pair


def verify_signature(key: Jwk, message: bytes, signature: bytes) -> bool:
    """True iff ``signature`` is a valid JWS signature of ``message`` under ``key``."""
    pub = load_public(key)
    try:
        if isinstance(pub, ec.EllipticCurvePublicKey):
            if len(signature) != 64:
                return False
            der = encode_dss_signature(
                int.from_bytes(signature[:32], "big"), int.from_bytes(signature[32:], "big")
            )
            pub.verify(der, message, ec.ECDSA(hashes.SHA256()))
        else:
            pub.verify(signature, message)
    except (InvalidSignature, ValueError):
        return False
    return True
