"""cryptvault command line.

Commands: keygen, encrypt, decrypt, put, get, list, hadd, bench.
Exit codes: 0 success, 1 runtime/crypto failure, 2 usage error.

--seed HEX makes every random choice (keys, IVs, Paillier
randomness) reproducible. That is for tests and fixtures only; it is
documented as insecure and never the default.
"""

from __future__ import annotations

import argparse
import hashlib
import random
import sys
import time

from . import blowfish, des, envelope, paillier, rsa, vault
from .errors import (
    CorruptEnvelopeError,
    CryptVaultError,
    IntegrityError,
    KeyLengthError,
    KeyRangeError,
    LayerStackError,
    NotFoundError,
    PaddingError,
    ParseError,
    StackMismatchError,
)

_BLOWFISH_HEADER = "blowfish-key v1"
_DES_HEADER = "des-key v1"

_BENCH_ALGORITHMS = ("blowfish-cbc", "des-cbc", "multilevel", "desrsa")


def _classify(exc: CryptVaultError) -> str:
    if isinstance(exc, IntegrityError):
        return "integrity error"
    if isinstance(exc, PaddingError):
        return "padding error"
    if isinstance(exc, (LayerStackError, StackMismatchError)):
        return "layer stack error"
    if isinstance(exc, (KeyLengthError, KeyRangeError, ParseError)):
        return "key error"
    if isinstance(exc, NotFoundError):
        return "not found"
    if isinstance(exc, CorruptEnvelopeError):
        return "corrupt envelope"
    return "error"


def _rng_from_args(args) -> random.Random:
    if args.seed is not None:
        try:
            return random.Random(int(args.seed, 16))
        except ValueError:
            args.parser.error(f"--seed must be hexadecimal, got {args.seed!r}")
    return random.SystemRandom()


def _rand_bytes(rng: random.Random, count: int) -> bytes:
    return rng.getrandbits(8 * count).to_bytes(count, "big")


# --- symmetric key files ---

def _save_symmetric_key(header: str, key: bytes, path: str) -> None:
    with open(path, "w", encoding="ascii") as f:
        f.write(f"{header}\nkey={key.hex()}\n")


def _load_symmetric_key(header: str, path: str) -> bytes:
    with open(path, encoding="ascii") as f:
        lines = [ln.strip() for ln in f.read().splitlines() if ln.strip()]
    if not lines or lines[0] != header:
        raise ParseError(f"{path}: expected header {header!r}")
    if len(lines) != 2 or not lines[1].startswith("key="):
        raise ParseError(f"{path}: expected a single key=<hex> line")
    try:
        return bytes.fromhex(lines[1][4:])
    except ValueError:
        raise ParseError(f"{path}: bad hex key") from None


def load_blowfish_key(path: str) -> bytes:
    return _load_symmetric_key(_BLOWFISH_HEADER, path)


def load_des_key(path: str) -> bytes:
    return _load_symmetric_key(_DES_HEADER, path)


# --- commands ---

def cmd_keygen(args) -> int:
    rng = _rng_from_args(args)
    scheme = args.scheme
    size = args.size
    out = args.out or f"{scheme}.key"
    if scheme == "blowfish":
        size = 16 if size is None else size
        if not blowfish.MIN_KEY_BYTES <= size <= blowfish.MAX_KEY_BYTES:
            args.parser.error(f"blowfish key length must be 4..56 bytes, got {size}")
        key = _rand_bytes(rng, size)
        blowfish.expand_key(key)
        _save_symmetric_key(_BLOWFISH_HEADER, key, out)
        fingerprint = hashlib.sha256(key).hexdigest()[:16]
        print(f"{fingerprint}  {out}")
    elif scheme == "des":
        size = 8 if size is None else size
        if size != 8:
            args.parser.error(f"des keys are exactly 8 bytes, got {size}")
        key = _rand_bytes(rng, 8)
        des.des_expand_key(key)
        _save_symmetric_key(_DES_HEADER, key, out)
        fingerprint = hashlib.sha256(key).hexdigest()[:16]
        print(f"{fingerprint}  {out}")
    elif scheme == "rsa":
        size = 512 if size is None else size
        if size < 16 or size % 2:
            args.parser.error(f"rsa bits must be even and >= 16, got {size}")
        pair = rsa.rsa_generate(size, rng)
        rsa.save_private_key(pair, out)
        rsa.save_public_key(pair.public_key, out + ".pub")
        with open(out + ".pub", "rb") as f:
            fingerprint = hashlib.sha256(f.read()).hexdigest()[:16]
        print(f"{fingerprint}  {out} {out}.pub")
    else:
        size = 512 if size is None else size
        if size < 16 or size % 2:
            args.parser.error(f"paillier bits must be even and >= 16, got {size}")
        pair = paillier.paillier_generate(size, rng)
        paillier.save_private_key(pair, out)
        paillier.save_public_key(pair.public_key, out + ".pub")
        with open(out + ".pub", "rb") as f:
            fingerprint = hashlib.sha256(f.read()).hexdigest()[:16]
        print(f"{fingerprint}  {out} {out}.pub")
    return 0


def _read_file(path: str) -> bytes:
    with open(path, "rb") as f:
        return f.read()


def _write_file(path: str, data: bytes) -> None:
    with open(path, "wb") as f:
        f.write(data)


def cmd_encrypt(args) -> int:
    rng = _rng_from_args(args)
    plaintext = _read_file(args.infile)
    if args.pipeline == "multilevel":
        if not args.paillier_pub or not args.blowfish_key:
            args.parser.error("multilevel encryption needs --paillier-pub and --blowfish-key")
        pub = paillier.load_public_key(args.paillier_pub)
        bf_key = load_blowfish_key(args.blowfish_key)
        env = envelope.encrypt_multilevel(plaintext, pub, bf_key, rng)
    else:
        if not args.rsa_pub:
            args.parser.error("desrsa encryption needs --rsa-pub")
        pub = rsa.load_public_key(args.rsa_pub)
        env = envelope.encrypt_des_rsa(plaintext, pub, rng)
    _write_file(args.outfile, envelope.serialize(env))
    return 0


def cmd_decrypt(args) -> int:
    env = envelope.parse(_read_file(args.infile))
    if args.pipeline == "multilevel":
        if not args.paillier_priv or not args.blowfish_key:
            args.parser.error("multilevel decryption needs --paillier-priv and --blowfish-key")
        priv = paillier.load_private_key(args.paillier_priv)
        bf_key = load_blowfish_key(args.blowfish_key)
        plaintext = envelope.decrypt_multilevel(env, priv, bf_key)
    else:
        if not args.rsa_priv:
            args.parser.error("desrsa decryption needs --rsa-priv")
        priv = rsa.load_private_key(args.rsa_priv)
        plaintext = envelope.decrypt_des_rsa(env, priv)
    _write_file(args.outfile, plaintext)
    return 0


def cmd_put(args) -> int:
    env = envelope.parse(_read_file(args.file))
    entry = vault.vault_put(args.vault, args.name, env, overwrite=args.overwrite)
    print(f"{entry.name}\t{entry.size_bytes}")
    return 0


def cmd_get(args) -> int:
    env = vault.vault_get(args.vault, args.name)
    _write_file(args.file, envelope.serialize(env))
    return 0


def cmd_list(args) -> int:
    print("# name\tstack\tsize_bytes\tcreated_at")
    for entry in vault.vault_list(args.vault):
        stack = ",".join(t.name for t in entry.layer_stack)
        print(f"{entry.name}\t{stack}\t{entry.size_bytes}\t{entry.created_at}")
    return 0


def cmd_hadd(args) -> int:
    rng = _rng_from_args(args)
    pub = paillier.load_public_key(args.paillier_pub)
    bf_key = load_blowfish_key(args.blowfish_key)
    entry = vault.vault_homomorphic_add(
        args.vault, args.name_a, args.name_b, args.name_out,
        bf_key, pub, overwrite=args.overwrite, rng=rng,
    )
    print(f"{entry.name}\t{entry.size_bytes}")
    return 0


# --- benchmark ---

def _bench_setups(rng: random.Random):
    """Per-algorithm one-shot encryptors; key material setup happens
    here, outside the timed region."""
    bf_schedule = blowfish.expand_key(_rand_bytes(rng, 16))
    des_schedule = des.des_expand_key(_rand_bytes(rng, 8))
    bf_key = _rand_bytes(rng, 16)
    paillier_pub = paillier.paillier_generate(512, rng).public_key
    rsa_pub = rsa.rsa_generate(512, rng).public_key

    def run_blowfish(buf: bytes) -> None:
        envelope.cbc_encrypt(
            lambda b: blowfish.encrypt_bytes(bf_schedule, b), bytes(8),
            envelope.pkcs7_pad(buf),
        )

    def run_des(buf: bytes) -> None:
        envelope.cbc_encrypt(
            lambda b: des.des_encrypt_block(des_schedule, b), bytes(8),
            envelope.pkcs7_pad(buf),
        )

    def run_multilevel(buf: bytes) -> None:
        envelope.encrypt_multilevel(buf, paillier_pub, bf_key, rng)

    def run_desrsa(buf: bytes) -> None:
        envelope.encrypt_des_rsa(buf, rsa_pub, rng)

    return {
        "blowfish-cbc": run_blowfish,
        "des-cbc": run_des,
        "multilevel": run_multilevel,
        "desrsa": run_desrsa,
    }


def run_bench(sizes, iterations, algorithms, rng) -> list[str]:
    """Benchmark report lines: '#' comments plus TSV data rows."""
    setups = _bench_setups(rng)
    lines = [
        "# cryptvault bench: encrypt throughput, mean of "
        f"{iterations} runs after 1 warm-up (512-bit RSA/Paillier keys)",
        "# algorithm\tbuffer_bytes\tmb_per_s_mean\tmb_per_s_min\tmb_per_s_max\titerations",
    ]
    results: dict[tuple[str, int], float] = {}
    for size in sizes:
        buf = _rand_bytes(rng, size)
        for alg in algorithms:
            run = setups[alg]
            run(buf)
            rates = []
            for _ in range(iterations):
                t0 = time.perf_counter()
                run(buf)
                dt = time.perf_counter() - t0
                rates.append(size / 1e6 / dt)
            mean = sum(rates) / len(rates)
            results[(alg, size)] = mean
            lines.append(
                f"{alg}\t{size}\t{mean:.4f}\t{min(rates):.4f}\t{max(rates):.4f}\t{iterations}"
            )
    for size in sizes:
        bf = results.get(("blowfish-cbc", size))
        d = results.get(("des-cbc", size))
        if bf is not None and d is not None:
            verdict = "PASS" if bf > d else "FAIL"
            lines.append(
                f"# summary {size} bytes: blowfish-cbc {bf:.4f} MB/s vs "
                f"des-cbc {d:.4f} MB/s -> {verdict} (expected blowfish faster)"
            )
    return lines


def cmd_bench(args) -> int:
    rng = _rng_from_args(args)
    try:
        sizes = [int(s) for s in args.sizes.split(",")]
    except ValueError:
        args.parser.error(f"--sizes must be comma-separated integers, got {args.sizes!r}")
    if any(s < 8 for s in sizes):
        args.parser.error("bench sizes must be at least 8 bytes")
    if args.iterations < 1:
        args.parser.error("--iterations must be at least 1")
    algorithms = args.algorithms.split(",") if args.algorithms else list(_BENCH_ALGORITHMS)
    unknown = [a for a in algorithms if a not in _BENCH_ALGORITHMS]
    if unknown:
        args.parser.error(f"unknown algorithms {unknown}; choose from {_BENCH_ALGORITHMS}")
    for line in run_bench(sizes, args.iterations, algorithms, rng):
        print(line)
    return 0


# --- parser ---

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cryptvault",
        description="Layered homomorphic/symmetric encryption pipelines and a local vault.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--seed", metavar="HEX", default=None,
                       help="deterministic randomness (insecure; tests only)")
        p.set_defaults(parser=p)

    p = sub.add_parser("keygen", help="generate a key and write key file(s)")
    p.add_argument("scheme", choices=("blowfish", "des", "rsa", "paillier"))
    p.add_argument("size", nargs="?", type=int, default=None,
                   help="bits for rsa/paillier, key bytes for blowfish/des")
    p.add_argument("--out", default=None, help="output path (default <scheme>.key)")
    common(p)
    p.set_defaults(func=cmd_keygen)

    for name, handler in (("encrypt", cmd_encrypt), ("decrypt", cmd_decrypt)):
        p = sub.add_parser(name, help=f"{name} a file through a pipeline")
        p.add_argument("pipeline", choices=("multilevel", "desrsa"))
        p.add_argument("infile")
        p.add_argument("outfile")
        p.add_argument("--paillier-pub")
        p.add_argument("--paillier-priv")
        p.add_argument("--rsa-pub")
        p.add_argument("--rsa-priv")
        p.add_argument("--blowfish-key")
        common(p)
        p.set_defaults(func=handler)

    p = sub.add_parser("put", help="store an envelope file in the vault")
    p.add_argument("name")
    p.add_argument("file")
    p.add_argument("--vault", required=True)
    p.add_argument("--overwrite", action="store_true")
    common(p)
    p.set_defaults(func=cmd_put)

    p = sub.add_parser("get", help="fetch an envelope from the vault")
    p.add_argument("name")
    p.add_argument("file")
    p.add_argument("--vault", required=True)
    common(p)
    p.set_defaults(func=cmd_get)

    p = sub.add_parser("list", help="list vault entries by name")
    p.add_argument("--vault", required=True)
    common(p)
    p.set_defaults(func=cmd_list)

    p = sub.add_parser("hadd", help="homomorphically add two stored envelopes")
    p.add_argument("name_a")
    p.add_argument("name_b")
    p.add_argument("name_out")
    p.add_argument("--vault", required=True)
    p.add_argument("--blowfish-key", required=True)
    p.add_argument("--paillier-pub", required=True)
    p.add_argument("--overwrite", action="store_true")
    common(p)
    p.set_defaults(func=cmd_hadd)

    p = sub.add_parser("bench", help="encrypt-throughput comparison table")
    p.add_argument("--sizes", default="65536", help="comma-separated buffer sizes in bytes")
    p.add_argument("--iterations", type=int, default=3)
    p.add_argument("--algorithms", default=None,
                   help=f"comma-separated subset of {','.join(_BENCH_ALGORITHMS)}")
    common(p)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        code = exc.code
        return code if isinstance(code, int) else 2
    except CryptVaultError as exc:
        print(f"{_classify(exc)}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
