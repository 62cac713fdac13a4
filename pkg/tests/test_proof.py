import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from didself import jws
from didself._codec import b64url_decode, b64url_encode, dumps_compact
from didself.document import serialize_document, single_key_document
from didself.errors import (
    DocumentError,
    DocumentIdMismatch,
    MalformedJws,
    MissingHeaderKey,
    PolicyViolation,
    SignatureInvalid,
    ThumbprintMismatch,
)
from didself.identifier import Did, did_from_key
from didself.keys import KeyPair
from didself.proof import sign_document, verify_proof

from strategies import keypairs, optional_suffixes


def _setup(controller, holder, suffix="device1"):
    did = did_from_key(controller.public, suffix)
    doc = single_key_document(did, holder.public)
    data = serialize_document(doc)
    return did, doc, data, sign_document(data, controller)


def test_honest_proof_verifies(controller, holder):
    did, doc, data, proof = _setup(controller, holder)
    assert verify_proof(did, data, proof) == doc


def test_header_carries_alg_and_jwk(controller, holder):
    _, _, data, proof = _setup(controller, holder)
    header = jws.decode(proof).header
    assert header["alg"] == "ES256"
    assert header["jwk"] == controller.public.to_dict()
    assert jws.decode(proof).payload == data


def test_signing_twice_both_verify(controller, holder):
    did, doc, data, first = _setup(controller, holder)
    second = sign_document(data, controller)
    assert verify_proof(did, data, first) == verify_proof(did, data, second) == doc


def test_other_key_is_thumbprint_mismatch(controller, holder):
    did, _, data, _ = _setup(controller, holder)
    stranger = KeyPair.generate()
    with pytest.raises(ThumbprintMismatch):
        verify_proof(did, data, sign_document(data, stranger))


def test_every_byte_flip_breaks_signature(controller, holder):
    did, _, data, proof = _setup(controller, holder)
    for i in range(len(data)):
        tampered = bytearray(data)
        tampered[i] ^= 0x01
        with pytest.raises(SignatureInvalid):
            verify_proof(did, bytes(tampered), proof)


def _resegment(proof, index, new):
    parts = proof.split(".")
    parts[index] = new
    return ".".join(parts)


def test_signature_bit_flip(controller, holder):
    did, _, data, proof = _setup(controller, holder)
    sig = bytearray(b64url_decode(proof.split(".")[2]))
    for i in range(len(sig)):
        flipped = bytearray(sig)
        flipped[i] ^= 0x80
        with pytest.raises(SignatureInvalid):
            verify_proof(did, data, _resegment(proof, 2, b64url_encode(bytes(flipped))))


def test_header_tamper(controller, holder):
    did, _, data, proof = _setup(controller, holder)
    header = jws.decode(proof).header | {"kid": "x"}
    with pytest.raises(SignatureInvalid):
        verify_proof(did, data, _resegment(proof, 0, b64url_encode(dumps_compact(header))))


def test_swapped_suffix_is_id_mismatch(controller, holder):
    _, _, data, proof = _setup(controller, holder, "deviceA")
    with pytest.raises(DocumentIdMismatch):
        verify_proof(did_from_key(controller.public, "deviceB"), data, proof)
    with pytest.raises(DocumentIdMismatch):
        verify_proof(did_from_key(controller.public), data, proof)


def test_thumbprint_checked_before_signature(controller, holder):
    did, _, data, _ = _setup(controller, holder)
    stranger_proof = sign_document(data, KeyPair.generate())
    sig = b64url_decode(stranger_proof.split(".")[2])
    broken = _resegment(stranger_proof, 2, b64url_encode(sig[::-1]))
    with pytest.raises(ThumbprintMismatch):
        verify_proof(did, data + b" ", broken)


def test_missing_jwk(controller, holder):
    did, _, data, proof = _setup(controller, holder)
    header = b64url_encode(b'{"alg":"ES256"}')
    with pytest.raises(MissingHeaderKey):
        verify_proof(did, data, _resegment(proof, 0, header))


@pytest.mark.parametrize(
    "header",
    [
        {"alg": "none"},
        {"alg": "HS256", "jwk": {}},
        {"alg": "EdDSA"},  # paired below with an EC jwk
        {"alg": "ES256", "crit": ["exp"]},
    ],
)
def test_bad_headers(controller, holder, header):
    did, _, data, proof = _setup(controller, holder)
    header = dict(header)
    header.setdefault("jwk", controller.public.to_dict())
    with pytest.raises(MalformedJws):
        verify_proof(did, data, _resegment(proof, 0, b64url_encode(dumps_compact(header))))


@pytest.mark.parametrize("token", ["", "a.b", "a.b.c.d", "!!.e30.AA", "e30.e30.AA", "W10.e30.AA"])
def test_malformed_tokens(controller, token):
    with pytest.raises(MalformedJws):
        verify_proof(did_from_key(controller.public), b"{}", token)


def test_private_key_in_header_rejected(controller, holder):
    did, _, data, proof = _setup(controller, holder)
    header = {"alg": "ES256", "jwk": controller.to_private_dict()}
    with pytest.raises(MalformedJws):
        verify_proof(did, data, _resegment(proof, 0, b64url_encode(dumps_compact(header))))


def test_detached_payload(controller, holder):
    did, doc, data, proof = _setup(controller, holder)
    assert verify_proof(did, data, _resegment(proof, 1, "")) == doc


def test_signed_bytes_must_be_a_document(controller):
    did = did_from_key(controller.public)
    with pytest.raises(DocumentError):
        verify_proof(did, b"not json", sign_document(b"not json", controller))


def test_algorithm_policy(controller, holder):
    did, _, data, proof = _setup(controller, holder)
    with pytest.raises(PolicyViolation):
        verify_proof(did, data, proof, algorithms={"EdDSA"})


def test_verifies_exact_bytes_not_reserialized(controller, holder):
    did, doc, data, _ = _setup(controller, holder)
    pretty = json.dumps(json.loads(data), indent=2).encode()
    assert verify_proof(did, pretty, sign_document(pretty, controller)) == doc


@settings(max_examples=40)
@given(keypairs, keypairs, optional_suffixes)
def test_completeness(controller, holder, suffix):
    did, doc, data, proof = _setup(controller, holder, suffix)
    assert verify_proof(did, data, proof) == doc


@settings(max_examples=40)
@given(keypairs, keypairs, st.data())
def test_soundness(controller, other, data):
    if other.public == controller.public:
        return
    did, _, doc_bytes, _ = _setup(controller, controller, data.draw(optional_suffixes))
    with pytest.raises(ThumbprintMismatch):
        verify_proof(did, doc_bytes, sign_document(doc_bytes, other))


# independent JOSE implementation as an oracle


def test_jwcrypto_verifies_our_proof(controller, holder):
    jwcrypto_jws = pytest.importorskip("jwcrypto.jws")
    from jwcrypto.jwk import JWK

    for signer in (controller, holder):
        _, _, data, proof = _setup(signer, holder)
        token = jwcrypto_jws.JWS()
        token.deserialize(proof)
        token.verify(JWK(**signer.public.to_dict()))
        assert token.payload == data


def test_we_verify_jwcrypto_proof(holder):
    jwcrypto_jws = pytest.importorskip("jwcrypto.jws")
    from jwcrypto.jwk import JWK

    for signer in (KeyPair.generate("ES256"), KeyPair.generate("EdDSA")):
        did, doc, data, _ = _setup(signer, holder)
        token = jwcrypto_jws.JWS(data)
        header = {"alg": signer.alg, "jwk": signer.public.to_dict()}
        token.add_signature(JWK(**signer.to_private_dict()), None, json.dumps(header))
        assert verify_proof(did, data, token.serialize(compact=True)) == doc


def test_did_type_is_required_input(controller, holder):
    did, doc, data, proof = _setup(controller, holder)
    assert isinstance(did, Did)
    assert verify_proof(did, data, proof.encode()) == doc
