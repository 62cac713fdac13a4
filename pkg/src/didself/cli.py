"""``didself`` command line.

All file I/O of the package happens here. Failures print one JSON object on
stderr: exit 1 for verification errors, exit 2 for usage and I/O errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any, NoReturn

from didself._codec import loads_strict
from didself._time import parse_instant, to_epoch
from didself.document import VerificationMethod, build_document, parse_document, serialize_document
from didself.errors import DidSelfError, InvalidKey
from didself.identifier import Did, Jwk, did_from_key, format_did, parse_did
from didself.implicit_jwt import issue_jwt, verify_jwt
from didself.implicit_x509 import (
    issue_cert,
    load_cert,
    load_chain,
    make_root_cert,
    pem_chain,
    san_did,
    verify_chain,
)
from didself.keys import ALGORITHMS, KeyPair
from didself.proof import sign_document, verify_proof
from didself.resolver import (
    KINDS,
    Bundle,
    ExplicitBody,
    ResolverPolicy,
    decode_bundle,
    encode_bundle,
    resolve,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        raise UsageError(message)


# -- file helpers --------------------------------------------------------------


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _read_json(path: str) -> Any:
    try:
        return loads_strict(_read(path))
    except ValueError as exc:
        raise InvalidKey(f"{path} is not JSON: {exc}") from None


def _keypair(path: str) -> KeyPair:
    return KeyPair.from_private_dict(_read_json(path))


def _public(path: str) -> Jwk:
    data = _read_json(path)
    if isinstance(data, dict):
        data = {k: v for k, v in data.items() if k != "d"}
    return Jwk.from_dict(data)


def _emit(data: bytes | str, out: str | None, *, private: bool = False) -> None:
    if isinstance(data, str):
        data = data.encode("utf-8")
    if out is None:
        sys.stdout.buffer.write(data + (b"" if data.endswith(b"\n") else b"\n"))
        sys.stdout.flush()
        return
    flags = os.O_WRONLY | os.O_CREAT | os.O_TRUNC
    fd = os.open(out, flags, 0o600 if private else 0o644)
    with os.fdopen(fd, "wb") as fh:
        fh.write(data)


def _json(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def _at(args: argparse.Namespace) -> int:
    return parse_instant(args.at) if args.at else to_epoch(None)


def _instant(text: str) -> int:
    try:
        return parse_instant(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a timestamp: {text!r}") from None


# -- commands ------------------------------------------------------------------


def cmd_keygen(args: argparse.Namespace) -> None:
    pair = KeyPair.generate(args.alg)
    _emit(_json(pair.to_private_dict()), args.out, private=True)
    if args.public_out:
        _emit(_json(pair.public.to_dict()), args.public_out)
    if args.out:
        _emit(_json(pair.public.to_dict()), None)


def cmd_did(args: argparse.Namespace) -> None:
    _emit(format_did(did_from_key(_public(args.key), args.suffix)), None)


def cmd_doc_create(args: argparse.Namespace) -> None:
    did = did_from_key(_public(args.controller), args.suffix)
    methods = [VerificationMethod(f"#key{i}", _public(p)) for i, p in enumerate(args.method, 1)]
    refs = [m.id for m in methods]
    doc = build_document(did, methods, refs, refs)
    _emit(serialize_document(doc), args.out)


def cmd_doc_sign(args: argparse.Namespace) -> None:
    doc_bytes = _read(args.document)
    parse_document(doc_bytes)
    _emit(sign_document(doc_bytes, _keypair(args.key)), args.out)


def cmd_doc_verify(args: argparse.Namespace) -> None:
    doc = verify_proof(parse_did(args.did), _read(args.document), _read(args.proof).strip())
    _emit(serialize_document(doc), None)


def cmd_jwt_issue(args: argparse.Namespace) -> None:
    x5c = load_chain(_read(args.x5c)) if args.x5c else None
    token = issue_jwt(_keypair(args.controller), args.suffix, _public(args.holder),
                      (args.iat, args.exp), x5c=x5c)
    _emit(token, args.out)


def cmd_jwt_verify(args: argparse.Namespace) -> None:
    claims = verify_jwt(_read(args.token).strip(), _at(args), clock_skew=args.skew)
    out: dict[str, Any] = {"iss": claims.iss, "cnf": {"jwk": claims.cnf.to_dict()},
                           "did": format_did(claims.did)}
    for name in ("sub", "iat", "exp", "nbf"):
        if getattr(claims, name) is not None:
            out[name] = getattr(claims, name)
    _emit(_json(out), None)


def cmd_x509_root(args: argparse.Namespace) -> None:
    cert = make_root_cert(_keypair(args.controller), (args.not_before, args.not_after))
    _emit(pem_chain([cert]), args.out)


def cmd_x509_issue(args: argparse.Namespace) -> None:
    issuer_chain = load_chain(_read(args.issuer_cert))
    issuer_cert = load_cert(issuer_chain[-1])
    san = Did(san_did(issuer_cert).thumbprint, args.suffix)
    cert = issue_cert(_keypair(args.issuer_key), issuer_cert, _public(args.subject_key), san,
                      args.intermediate, (args.not_before, args.not_after))
    _emit(pem_chain([cert]), args.out)


def cmd_x509_verify(args: argparse.Namespace) -> None:
    chain = [der for path in args.chain for der in load_chain(_read(path))]
    verdict = verify_chain(chain, _at(args), clock_skew=args.skew)
    _emit(_json({
        "did": format_did(verdict.did),
        "holder_key": verdict.holder_key.to_dict(),
        "controller_key": verdict.controller_key.to_dict(),
        "not_before": verdict.not_before,
        "not_after": verdict.not_after,
    }), None)


def cmd_resolve(args: argparse.Namespace) -> None:
    policy = ResolverPolicy(
        require_expiry=args.require_expiry,
        clock_skew=args.skew,
        allowed_algorithms=frozenset(args.alg) if args.alg else ALGORITHMS,
    )
    result = resolve(args.did, decode_bundle(_read(args.bundle)), _at(args), policy)
    _emit(serialize_document(result.document), None)


def _meta(pairs: Sequence[str]) -> dict[str, str] | None:
    if not pairs:
        return None
    out = {}
    for item in pairs:
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--meta expects key=value, got {item!r}")
        out[key] = value
    return out


def cmd_bundle_pack(args: argparse.Namespace) -> None:
    if args.kind == "explicit":
        if not (args.document and args.proof):
            raise UsageError("explicit bundles need --document and --proof")
        body: Any = ExplicitBody(_read(args.document),
                                 _read(args.proof).decode("ascii", "replace").strip())
    elif args.kind == "jwt":
        if not args.token:
            raise UsageError("jwt bundles need --token")
        body = _read(args.token).decode("ascii", "replace").strip()
    else:
        if not args.chain:
            raise UsageError("x509 bundles need --chain")
        body = pem_chain([der for path in args.chain for der in load_chain(_read(path))])
    _emit(encode_bundle(Bundle(args.did, args.kind, body, _meta(args.meta))), args.out)


def cmd_bundle_unpack(args: argparse.Namespace) -> None:
    bundle = decode_bundle(_read(args.bundle))
    outdir = Path(args.out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    if isinstance(bundle.body, ExplicitBody):
        files = {"document.json": bundle.body.document, "proof.jws": bundle.body.proof.encode()}
    elif bundle.kind == "jwt":
        files = {"token.jwt": bundle.body.encode()}
    else:
        files = {"chain.pem": bundle.body.encode()}
    for name, data in files.items():
        (outdir / name).write_bytes(data)
    _emit(_json({"did": bundle.did, "kind": bundle.kind, "meta": bundle.meta,
                 "files": sorted(str(outdir / n) for n in files)}), None)


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="didself", description="did:self identifiers, documents and attestations")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def timed(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("--at", help="verification instant (ISO 8601 or epoch seconds); default now")
        sp.add_argument("--skew", type=int, default=0, help="clock skew allowance in seconds")

    k = sub.add_parser("keygen", help="generate a key pair as a private JWK")
    k.add_argument("--alg", choices=sorted(ALGORITHMS), default="ES256")
    k.add_argument("--out", help="private JWK file (written 0600); default stdout")
    k.add_argument("--public-out")
    k.set_defaults(func=cmd_keygen)

    d = sub.add_parser("did", help="print the DID for a key")
    d.add_argument("key")
    d.add_argument("--suffix")
    d.set_defaults(func=cmd_did)

    doc = sub.add_parser("doc", help="explicit DID documents").add_subparsers(
        dest="doc_command", required=True, parser_class=_Parser)
    c = doc.add_parser("create")
    c.add_argument("--controller", required=True, help="controller key (public or private JWK)")
    c.add_argument("--suffix")
    c.add_argument("--method", action="append", required=True, help="holder public JWK; repeatable")
    c.add_argument("--out")
    c.set_defaults(func=cmd_doc_create)
    s = doc.add_parser("sign")
    s.add_argument("document")
    s.add_argument("--key", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_doc_sign)
    v = doc.add_parser("verify")
    v.add_argument("document")
    v.add_argument("--proof", required=True)
    v.add_argument("--did", required=True)
    v.set_defaults(func=cmd_doc_verify)

    jwt = sub.add_parser("jwt", help="JWT-encoded DID documents").add_subparsers(
        dest="jwt_command", required=True, parser_class=_Parser)
    ji = jwt.add_parser("issue")
    ji.add_argument("--controller", required=True)
    ji.add_argument("--holder", required=True)
    ji.add_argument("--suffix")
    ji.add_argument("--iat", type=_instant)
    ji.add_argument("--exp", type=_instant)
    ji.add_argument("--x5c", help="PEM chain to embed instead of the controller jwk")
    ji.add_argument("--out")
    ji.set_defaults(func=cmd_jwt_issue)
    jv = jwt.add_parser("verify")
    jv.add_argument("token")
    timed(jv)
    jv.set_defaults(func=cmd_jwt_verify)

    x = sub.add_parser("x509", help="certificate-chain DID documents").add_subparsers(
        dest="x509_command", required=True, parser_class=_Parser)
    xr = x.add_parser("root")
    xr.add_argument("--controller", required=True)
    xr.add_argument("--not-before", type=_instant, required=True)
    xr.add_argument("--not-after", type=_instant, required=True)
    xr.add_argument("--out")
    xr.set_defaults(func=cmd_x509_root)
    xi = x.add_parser("issue")
    xi.add_argument("--issuer-key", required=True)
    xi.add_argument("--issuer-cert", required=True, help="issuer certificate (last PEM block is used)")
    xi.add_argument("--subject-key", required=True)
    xi.add_argument("--suffix")
    xi.add_argument("--intermediate", action="store_true")
    xi.add_argument("--not-before", type=_instant, required=True)
    xi.add_argument("--not-after", type=_instant, required=True)
    xi.add_argument("--out")
    xi.set_defaults(func=cmd_x509_issue)
    xv = x.add_parser("verify")
    xv.add_argument("chain", nargs="+", help="PEM files, concatenated root first")
    timed(xv)
    xv.set_defaults(func=cmd_x509_verify)

    r = sub.add_parser("resolve", help="verify a bundle and print the DID document")
    r.add_argument("--did", required=True)
    r.add_argument("--bundle", required=True)
    r.add_argument("--require-expiry", action="store_true")
    r.add_argument("--alg", action="append", choices=sorted(ALGORITHMS))
    timed(r)
    r.set_defaults(func=cmd_resolve)

    b = sub.add_parser("bundle", help="bundle envelopes").add_subparsers(
        dest="bundle_command", required=True, parser_class=_Parser)
    bp = b.add_parser("pack")
    bp.add_argument("--did", required=True)
    bp.add_argument("--kind", required=True, choices=KINDS)
    bp.add_argument("--document")
    bp.add_argument("--proof")
    bp.add_argument("--token")
    bp.add_argument("--chain", action="append")
    bp.add_argument("--meta", action="append", default=[], metavar="KEY=VALUE")
    bp.add_argument("--out")
    bp.set_defaults(func=cmd_bundle_pack)
    bu = b.add_parser("unpack")
    bu.add_argument("bundle")
    bu.add_argument("--out-dir", required=True)
    bu.set_defaults(func=cmd_bundle_unpack)
    return p


def _fail(code: int, payload: dict[str, Any]) -> int:
    sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")
    return code


def run(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "at", None):
            try:
                parse_instant(args.at)
            except ValueError:
                raise UsageError(f"--at is not a timestamp: {args.at!r}") from None
        args.func(args)
    except UsageError as exc:
        return _fail(2, {"error": "usage", "message": str(exc)})
    except DidSelfError as exc:
        return _fail(1, exc.to_dict())
    except OSError as exc:
        return _fail(2, {"error": "io", "message": str(exc)})
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
