"""Exit criteria. One test per criterion; the terminal summary prints a
PASS/FAIL line for each (see conftest.py)."""
import json
import random
import string
import time

import pytest
from cryptography.hazmat.primitives.asymmetric import ec, ed25519

from didself._codec import b64url_decode, b64url_encode
from didself.cli import run
from didself.document import VerificationMethod, build_document, serialize_document, single_key_document
from didself.errors import (
    BrokenLink,
    DidSelfError,
    DocumentIdMismatch,
    Expired,
    MissingCaConstraint,
    SignatureInvalid,
    ThumbprintMismatch,
)
from didself.identifier import Did, did_from_key, format_did, jwk_thumbprint, parse_did
from didself.implicit_jwt import issue_jwt, reconstruct_from_jwt, verify_jwt
from didself.implicit_x509 import pem_chain, verify_chain
from didself.keys import KeyPair
from didself.proof import sign_document, verify_proof
from didself.resolver import Bundle, ExplicitBody, decode_bundle, encode_bundle, resolve
from didself.document import parse_document

from chains import T0, forged_leaf, three_cert, two_cert
from conftest import DATA
from oracles import openssl_verify

pytestmark = pytest.mark.acceptance

SUFFIX_ALPHABET = string.ascii_letters + string.digits + "._~-"


def _keypair(rng: random.Random) -> KeyPair:
    if rng.random() < 0.5:
        return KeyPair.from_private(ec.derive_private_key(rng.getrandbits(255) + 1, ec.SECP256R1()))
    return KeyPair.from_private(ed25519.Ed25519PrivateKey.from_private_bytes(rng.randbytes(32)))


def _suffix(rng: random.Random) -> str | None:
    if rng.random() < 0.2:
        return None
    return "".join(rng.choices(SUFFIX_ALPHABET, k=rng.randint(1, 24)))


def _document(rng: random.Random, did: Did) -> bytes:
    methods = [VerificationMethod(f"#k{i}", _keypair(rng).public) for i in range(rng.randint(1, 3))]
    refs = [m.id for m in methods]
    extra = {"note": "".join(rng.choices(string.printable, k=rng.randint(0, 40)))} if rng.random() < 0.5 else {}
    doc = build_document(did, methods, rng.sample(refs, rng.randint(0, len(refs))),
                         rng.sample(refs, rng.randint(0, len(refs))), extra)
    return serialize_document(doc)


def _flip(data: bytes, rng: random.Random) -> bytes:
    out = bytearray(data)
    out[rng.randrange(len(out))] ^= 1 << rng.randrange(8)
    return bytes(out)


def test_ac1_thumbprint_conformance():
    start = time.perf_counter()
    rsa = json.loads((DATA / "rfc7638_rsa.jwk.json").read_text())
    assert jwk_thumbprint(rsa) == "NzbLsXh8uDCcd-6MNwXF4W_7noWXFZAfHkxZsRGC9Xs"
    assert time.perf_counter() - start < 1.0


def test_ac2_three_step_proof_verification():
    rng = random.Random(2)
    start = time.perf_counter()
    cases = []
    for _ in range(1000):
        controller = _keypair(rng)
        did = did_from_key(controller.public, _suffix(rng))
        data = _document(rng, did)
        proof = sign_document(data, controller)
        assert verify_proof(did, data, proof).id == did
        cases.append((controller, did, data, proof))

    expected = {"wrong_key": ThumbprintMismatch, "payload_bit": SignatureInvalid,
                "signature_bit": SignatureInvalid, "swapped_suffix": DocumentIdMismatch}
    tally = dict.fromkeys(expected, 0)
    for i, (controller, did, data, proof) in enumerate(cases):
        mutation = list(expected)[i % 4]
        query, body, token = did, data, proof
        if mutation == "wrong_key":
            token = sign_document(data, _keypair(rng))
        elif mutation == "payload_bit":
            body = _flip(data, rng)
        elif mutation == "signature_bit":
            h, p, s = proof.split(".")
            token = f"{h}.{p}.{b64url_encode(_flip(b64url_decode(s), rng))}"
        else:
            other = _suffix(rng)
            while other == did.suffix:
                other = _suffix(rng)
            query = Did(did.thumbprint, other)
        with pytest.raises(expected[mutation]):
            verify_proof(query, body, token)
        tally[mutation] += 1
    assert sum(tally.values()) == 1000
    assert time.perf_counter() - start < 30.0


def test_ac3_jwt_document_correspondence():
    controller, holder = KeyPair.generate("ES256"), KeyPair.generate("ES256")
    token = issue_jwt(controller, "device1", holder.public)
    claims = verify_jwt(token, T0)
    iss = format_did(did_from_key(controller.public))
    payload = json.loads(b64url_decode(token.split(".")[1]))
    assert payload == {"iss": iss, "sub": "device1", "cnf": {"jwk": holder.public.to_dict()}}

    doc = reconstruct_from_jwt(claims)
    expected = {
        "id": iss + "/device1",
        "verificationMethod": [{
            "id": "#key1",
            "type": "JsonWebKey2020",
            "publicKeyJwk": {"kty": "EC", "crv": "P-256", "x": holder.public.x, "y": holder.public.y},
        }],
        "authentication": ["#key1"],
        "assertion": ["#key1"],
    }
    assert json.loads(serialize_document(doc)) == expected


def test_ac4_cross_path_equivalence():
    rng = random.Random(4)
    start = time.perf_counter()
    for _ in range(200):
        controller, holder, suffix = _keypair(rng), _keypair(rng), _suffix(rng)
        did = did_from_key(controller.public, suffix)
        data = serialize_document(single_key_document(did, holder.public))
        bundles = [
            Bundle(format_did(did), "explicit", ExplicitBody(data, sign_document(data, controller))),
            Bundle(format_did(did), "jwt", issue_jwt(controller, suffix, holder.public)),
            Bundle(format_did(did), "x509", pem_chain(two_cert(controller, holder, suffix))),
        ]
        docs = [resolve(format_did(did), b, T0).document for b in bundles]
        assert docs[0] == docs[1] == docs[2]
    assert time.perf_counter() - start < 60.0


def test_ac5_x509_profile(openssl, tmp_path):
    controller, inter, holder = KeyPair.generate(), KeyPair.generate(), KeyPair.generate("EdDSA")
    two = two_cert(controller, holder)
    three = three_cert(controller, inter, holder)
    for chain in (two, three):
        assert openssl_verify(openssl, chain, T0, tmp_path)
        assert verify_chain(chain, T0).did == did_from_key(controller.public, "device1")

    with pytest.raises(BrokenLink):
        verify_chain(two[::-1], T0)

    no_ca = three_cert(controller, inter, holder, intermediate_is_ca=False)
    assert not openssl_verify(openssl, no_ca, T0, tmp_path)
    with pytest.raises(MissingCaConstraint):
        verify_chain(no_ca, T0)

    root = two[0]
    stranger = did_from_key(KeyPair.generate().public, "device1")
    mismatched = [root, forged_leaf(controller, root, holder, stranger)]
    assert openssl_verify(openssl, mismatched, T0, tmp_path)  # plain X.509 cannot see the binding
    with pytest.raises(ThumbprintMismatch):
        verify_chain(mismatched, T0)

    expired = two_cert(controller, holder, leaf_window=(T0 - 100, T0 - 1))
    assert not openssl_verify(openssl, expired, T0, tmp_path)
    with pytest.raises(Expired) as info:
        verify_chain(expired, T0)
    assert info.value.details["index"] == 1


def test_ac6_multiple_documents_per_did():
    controller = KeyPair.generate()
    did = format_did(did_from_key(controller.public, "drone"))
    first = Bundle(did, "jwt", issue_jwt(controller, "drone", KeyPair.generate().public))
    second = Bundle(did, "jwt", issue_jwt(controller, "drone", KeyPair.generate("EdDSA").public))
    a = resolve(did, decode_bundle(encode_bundle(first)), T0).document
    b = resolve(did, decode_bundle(encode_bundle(second)), T0).document
    assert a.id == b.id == parse_did(did)
    assert a != b
    assert a.verification_methods[0].public_key != b.verification_methods[0].public_key


def _iso(epoch: int) -> str:
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(epoch))


def test_ac7_expiry_boundary(tmp_path, capsys):
    controller, holder = KeyPair.generate(), KeyPair.generate()
    boundary = T0 + 3600
    did = format_did(did_from_key(controller.public, "device1"))
    jwt_path = tmp_path / "jwt.bundle.json"
    jwt_path.write_bytes(encode_bundle(
        Bundle(did, "jwt", issue_jwt(controller, "device1", holder.public, (T0, boundary)))))
    x509_path = tmp_path / "x509.bundle.json"
    x509_path.write_bytes(encode_bundle(Bundle(did, "x509", pem_chain(
        two_cert(controller, holder, leaf_window=(T0, boundary))))))

    for path in (jwt_path, x509_path):
        assert run(["resolve", "--did", did, "--bundle", str(path), "--at", _iso(boundary - 1)]) == 0
        capsys.readouterr()
        assert run(["resolve", "--did", did, "--bundle", str(path), "--at", _iso(boundary)]) == 1
        assert json.loads(capsys.readouterr().err)["error"] == "expired"


def test_ac8_fuzz_robustness():
    rng = random.Random(8)
    start = time.perf_counter()
    targets = [
        lambda b: parse_did(b.decode("latin-1")),
        parse_document,
        decode_bundle,
        lambda b: verify_jwt(b, T0),
        lambda b: verify_chain([b[: len(b) // 2], b[len(b) // 2:]], T0),
    ]
    crashes = []
    for _ in range(10_000):
        blob = rng.randbytes(rng.randint(0, 256))
        for target in targets:
            try:
                target(blob)
            except DidSelfError:
                pass
            except Exception as exc:  # anything else is a crash
                crashes.append((blob, type(exc).__name__))
    assert crashes == []
    assert time.perf_counter() - start < 120.0
