"""Time resolution for each attestation kind and key algorithm.

    python scripts/bench_resolve.py [--n 300]
"""
import argparse
import statistics
import time

from didself import (
    Bundle,
    ExplicitBody,
    KeyPair,
    did_from_key,
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

T0 = 1_735_689_600


def bundle_for(kind, controller, holder):
    did = did_from_key(controller.public, "bench")
    if kind == "explicit":
        data = serialize_document(single_key_document(did, holder.public))
        return Bundle(format_did(did), kind, ExplicitBody(data, sign_document(data, controller)))
    if kind == "jwt":
        return Bundle(format_did(did), kind, issue_jwt(controller, "bench", holder.public))
    window = (T0 - 10, T0 + 10)
    root = make_root_cert(controller, window)
    leaf = issue_cert(controller, root, holder.public, did, False, window)
    return Bundle(format_did(did), kind, pem_chain([root, leaf]))


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--n", type=int, default=300)
    args = parser.parse_args()
    print(f"{'kind':9s} {'alg':6s} {'median us':>10s} {'p95 us':>10s}")
    for alg in ("ES256", "EdDSA"):
        controller, holder = KeyPair.generate(alg), KeyPair.generate(alg)
        for kind in ("explicit", "jwt", "x509"):
            bundle = bundle_for(kind, controller, holder)
            samples = []
            for _ in range(args.n):
                start = time.perf_counter()
                resolve(bundle.did, bundle, T0)
                samples.append((time.perf_counter() - start) * 1e6)
            samples.sort()
            p95 = samples[int(0.95 * len(samples)) - 1]
            print(f"{kind:9s} {alg:6s} {statistics.median(samples):10.1f} {p95:10.1f}")


if __name__ == "__main__":
    main()
