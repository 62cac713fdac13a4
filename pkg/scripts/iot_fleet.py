"""Provision a small device fleet under one controller and resolve every device.

Each device gets a DID with its own suffix; two drones share a DID but hold
different keys. Attestations are spread across the three encodings and
passed around as bundle envelopes, as they would be over an untrusted link.

    python scripts/iot_fleet.py [--devices 6]
"""
import argparse
import time

from didself import (
    Bundle,
    ExplicitBody,
    KeyPair,
    decode_bundle,
    did_from_key,
    encode_bundle,
    format_did,
    issue_cert,
    issue_jwt,
    make_root_cert,
    resolve,
    serialize_document,
    sign_document,
    single_key_document,
)
from didself.implicit_x509 import pem_chain


def provision(controller, root, gateway, gateway_cert, suffix, holder, kind, window):
    did = did_from_key(controller.public, suffix)
    if kind == "explicit":
        data = serialize_document(single_key_document(did, holder.public))
        body = ExplicitBody(data, sign_document(data, controller))
    elif kind == "jwt":
        body = issue_jwt(controller, suffix, holder.public, window)
    else:
        # devices behind the gateway get certificates from the gateway's intermediate
        leaf = issue_cert(gateway, gateway_cert, holder.public, did, False, window)
        body = pem_chain([root, gateway_cert, leaf])
    return encode_bundle(Bundle(format_did(did), kind, body, {"device": suffix}))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--devices", type=int, default=6)
    args = parser.parse_args()

    now = int(time.time())
    window = (now - 60, now + 86_400)
    controller = KeyPair.generate("ES256")
    gateway = KeyPair.generate("EdDSA")
    root = make_root_cert(controller, window)
    gateway_cert = issue_cert(controller, root, gateway.public, did_from_key(controller.public),
                              True, window)

    kinds = ["explicit", "jwt", "x509"]
    fleet = [(f"sensor{i}", KeyPair.generate(), kinds[i % 3]) for i in range(args.devices)]
    fleet += [("drone", KeyPair.generate("EdDSA"), "jwt"), ("drone", KeyPair.generate(), "x509")]

    print(f"controller DID: {format_did(did_from_key(controller.public))}")
    print(f"{'suffix':10s} {'kind':9s} {'holder key':14s} bytes")
    for suffix, holder, kind in fleet:
        wire = provision(controller, root, gateway, gateway_cert, suffix, holder, kind, window)
        bundle = decode_bundle(wire)
        result = resolve(bundle.did, bundle, now)
        key = result.document.verification_methods[0].public_key
        print(f"{suffix:10s} {result.kind:9s} {key.x[:12]}.. {len(wire)}")


if __name__ == "__main__":
    main()
