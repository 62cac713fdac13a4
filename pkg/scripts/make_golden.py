"""Rebuild the document golden files in tests/data from the stored P-256 key.

The key itself (golden_p256.jwk.json) is never regenerated: its thumbprint
is frozen in the tests, computed independently with openssl.
"""
import json
from pathlib import Path

from didself import Jwk, VerificationMethod, build_document, parse_did, serialize_document

DATA = Path(__file__).resolve().parent.parent / "tests" / "data"
DID = "did:self:iQ9PsBKOH1nLT9FyhsUGvXyKoW00yqm_-_rVa3W7Cl0/device1"


def main():
    key = json.loads((DATA / "golden_p256.jwk.json").read_text())
    key.pop("d")
    method = VerificationMethod("#key1", Jwk.from_dict(key))
    doc = build_document(parse_did(DID), [method], ["#key1"], ["#key1"])
    (DATA / "sample_doc_golden.json").write_bytes(serialize_document(doc))
    extra = {
        "service": [{"id": "#hub", "type": "LinkedDomains", "serviceEndpoint": "https://example.org"}],
        "@context": ["https://www.w3.org/ns/did/v1"],
    }
    future = build_document(parse_did(DID), [method], ["#key1"], ["#key1"], extra)
    (DATA / "future_member_golden.json").write_bytes(serialize_document(future))


if __name__ == "__main__":
    main()
