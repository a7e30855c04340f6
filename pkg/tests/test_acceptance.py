"""Release acceptance suite: one test per criterion, each enforcing
its stated tolerance and runtime budget and printing a PASS/FAIL line
(visible with `pytest -s` / `pytest -v`).

Run with:  pytest tests/test_acceptance.py -v -s
"""

import math
import os
import random
import time
import warnings

import pytest

from cryptvault import blowfish, des, envelope, testkit, vault
from cryptvault.cli import run_bench
from cryptvault.errors import CryptVaultError
from cryptvault.paillier import (
    PaillierKeyPair,
    paillier_add,
    paillier_decrypt,
    paillier_encrypt,
    paillier_generate,
    random_unit,
)
from cryptvault.rsa import (
    RsaKeyPair,
    rsa_decrypt,
    rsa_encrypt,
    rsa_generate,
    rsa_homomorphic_multiply,
)

from conftest import REPO_ROOT, VECTORS

BF_KEY = b"acceptance-key-1"


class _Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0
        return False


def _finish(criterion: int, timer: _Timer, limit: float, capfd, detail: str = ""):
    ok = timer.elapsed < limit
    status = "PASS" if ok else "FAIL"
    with capfd.disabled():
        print(f"ACCEPTANCE {criterion} {status} ({timer.elapsed:.2f}s, budget {limit:.0f}s) {detail}")
    assert ok, f"criterion {criterion} exceeded its {limit}s budget ({timer.elapsed:.2f}s)"


def test_c01_blowfish_known_answer_suite(capfd):
    with _Timer() as t:
        triples = testkit.load_vectors(str(VECTORS / "blowfish_ecb.txt"))
        series = testkit.load_vectors(str(VECTORS / "blowfish_keylen.txt"))
        assert len(triples) == 34
        for key, pt, ct in triples + series:
            schedule = blowfish.expand_key(key)
            assert blowfish.encrypt_bytes(schedule, pt) == ct
            assert blowfish.decrypt_bytes(schedule, ct) == pt
    _finish(1, t, 1.0, capfd, f"{len(triples) + len(series)} vectors exact")


def test_c02_des_worked_example(capfd):
    with _Timer() as t:
        schedule = des.des_expand_key(bytes.fromhex("133457799BBCDFF1"))
        ct = des.des_encrypt_block(schedule, bytes.fromhex("0123456789ABCDEF"))
        assert ct == bytes.fromhex("85E813540F0AB405")
        assert des.des_decrypt_block(schedule, ct) == bytes.fromhex("0123456789ABCDEF")
    _finish(2, t, 1.0, capfd, "FIPS worked example and inverse exact")


def test_c03_rsa_multiplicative_homomorphism(capfd):
    with _Timer() as t:
        toy = RsaKeyPair(n=33, e=3, d=7, p=3, q=11)
        for m1 in range(33):
            for m2 in range(33):
                prod = rsa_homomorphic_multiply(
                    toy.public_key,
                    rsa_encrypt(toy.public_key, m1),
                    rsa_encrypt(toy.public_key, m2),
                )
                assert rsa_decrypt(toy, prod) == (m1 * m2) % 33
        rng = random.Random(0xACC3)
        pair = rsa_generate(512, rng)
        for _ in range(200):
            m1, m2 = rng.randrange(pair.n), rng.randrange(pair.n)
            prod = rsa_homomorphic_multiply(
                pair.public_key,
                rsa_encrypt(pair.public_key, m1),
                rsa_encrypt(pair.public_key, m2),
            )
            assert rsa_decrypt(pair, prod) == (m1 * m2) % pair.n
    _finish(3, t, 30.0, capfd, "33^2 exhaustive pairs + 200 random pairs at 512 bits, zero failures")


def test_c04_paillier_additive_homomorphism(capfd):
    with _Timer() as t:
        toy = PaillierKeyPair(n=15, g=16, lam=4, mu=4)
        units = tuple(r for r in range(1, 15) if math.gcd(r, 15) == 1)
        cases = [(m, r) for m in range(15) for r in units]
        for m1, r1 in cases:
            c1 = paillier_encrypt(toy.public_key, m1, r1)
            for m2, r2 in cases:
                c2 = paillier_encrypt(toy.public_key, m2, r2)
                s = paillier_add(toy.public_key, c1, c2)
                assert paillier_decrypt(toy, s) == (m1 + m2) % 15
        rng = random.Random(0xACC4)
        pair = paillier_generate(512, rng)
        pub = pair.public_key
        for _ in range(200):
            m1, m2 = rng.randrange(pub.n), rng.randrange(pub.n)
            s = paillier_add(
                pub,
                paillier_encrypt(pub, m1, random_unit(pub.n, rng)),
                paillier_encrypt(pub, m2, random_unit(pub.n, rng)),
            )
            assert paillier_decrypt(pair, s) == (m1 + m2) % pub.n
    _finish(4, t, 30.0, capfd, "15x8 toy system exhaustive + 200 random pairs at 512 bits, zero failures")


def _length_mix(rng: random.Random) -> list:
    """100 lengths spanning 0..1 MiB, skewed small to keep pure-Python
    arithmetic inside the runtime budget while still covering both
    endpoints and the middle of the range."""
    sizes = [0, 1 << 20]
    sizes += [rng.randrange(1, 8193) for _ in range(82)]
    sizes += [rng.randrange(8192, 65537) for _ in range(12)]
    sizes += [rng.randrange(65536, 262145) for _ in range(4)]
    assert len(sizes) == 100
    return sizes


def test_c05_multilevel_round_trip(paillier_256, capfd):
    rng = random.Random(0xACC5)
    with _Timer() as t:
        pub = paillier_256.public_key
        for size in _length_mix(rng):
            data = rng.randbytes(size)
            env = envelope.encrypt_multilevel(data, pub, BF_KEY, rng)
            assert envelope.decrypt_multilevel(env, paillier_256, BF_KEY) == data
    _finish(5, t, 120.0, capfd, "100 random inputs, 0..1 MiB, digest-verified identity")


def test_c06_des_rsa_round_trip(rsa_512, capfd):
    rng = random.Random(0xACC6)
    with _Timer() as t:
        sizes = [0, 100 * 1024, 256 * 1024]
        sizes += [rng.randrange(0, 8193) for _ in range(84)]
        sizes += [rng.randrange(8192, 65537) for _ in range(13)]
        assert len(sizes) == 100
        for size in sizes:
            data = rng.randbytes(size)
            env = envelope.encrypt_des_rsa(data, rsa_512.public_key, rng)
            assert envelope.decrypt_des_rsa(env, rsa_512) == data
    _finish(6, t, 60.0, capfd, "100 random files, identity through DES-then-RSA envelopes")


def test_c07_vault_hadd_end_to_end(tmp_path, paillier_256, capfd):
    rng = random.Random(0xACC7)
    with _Timer() as t:
        root = str(tmp_path / "vault")
        pub = paillier_256.public_key
        for name, value in (("five", 5), ("seven", 7), ("zero", 0)):
            env = envelope.encrypt_multilevel(bytes([value]), pub, BF_KEY, rng)
            vault.vault_put(root, name, env)
        # server side holds only the transport key and the public key
        vault.vault_homomorphic_add(root, "five", "seven", "sum", BF_KEY, pub, rng=rng)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            out = envelope.decrypt_multilevel(vault.vault_get(root, "sum"), paillier_256, BF_KEY)
        assert int.from_bytes(out, "big") == 12
        # adding an encrypted zero preserves the plaintext
        vault.vault_homomorphic_add(root, "five", "zero", "same", BF_KEY, pub, rng=rng)
        same = envelope.decrypt_multilevel_integers(
            vault.vault_get(root, "same"), paillier_256, BF_KEY
        )
        assert same == (5,)
    _finish(7, t, 5.0, capfd, "E(5)+E(7) -> 12 and x+E(0) -> x with no private key server-side")


def test_c08_tamper_detection(tmp_path, paillier_256, rsa_512, capfd):
    rng = random.Random(0xACC8)
    with _Timer() as t:
        root = str(tmp_path / "vault")
        originals = {}
        for i in range(6):
            name = f"blob{i}"
            data = rng.randbytes(rng.randrange(100, 2000))
            if i % 2:
                env = envelope.encrypt_multilevel(data, paillier_256.public_key, BF_KEY, rng)
            else:
                env = envelope.encrypt_des_rsa(data, rsa_512.public_key, rng)
            vault.vault_put(root, name, env)
            originals[name] = data
        names = sorted(originals)
        blobs_dir = os.path.join(root, "blobs")
        detected = 0
        for trial in range(50):
            name = names[trial % len(names)]
            path = os.path.join(blobs_dir, os.path.basename(vault._blob_path(root, name)))
            clean = open(path, "rb").read()
            corrupted = bytearray(clean)
            pos = rng.randrange(len(corrupted))
            corrupted[pos] ^= rng.randrange(1, 256)
            with open(path, "wb") as f:
                f.write(bytes(corrupted))
            try:
                env = vault.vault_get(root, name)
                if env.layer_stack == envelope.MULTILEVEL_STACK:
                    out = envelope.decrypt_multilevel(env, paillier_256, BF_KEY)
                else:
                    out = envelope.decrypt_des_rsa(env, rsa_512)
            except CryptVaultError:
                detected += 1
            else:
                raise AssertionError(
                    f"corruption at byte {pos} of {name} decrypted silently "
                    f"({'wrong' if out != originals[name] else 'matching'} plaintext)"
                )
            finally:
                with open(path, "wb") as f:
                    f.write(clean)
        assert detected == 50
    _finish(8, t, 60.0, capfd, "50/50 single-byte corruptions raised a classified error")


def test_c09_benchmark_blowfish_beats_des(capfd):
    rng = random.Random(0xACC9)
    with _Timer() as t:
        lines = run_bench([1 << 20], iterations=1,
                          algorithms=["blowfish-cbc", "des-cbc"], rng=rng)
        report_path = REPO_ROOT / "bench_report.txt"
        report_path.write_text("\n".join(lines) + "\n")
        rows = {
            fields[0]: float(fields[2])
            for fields in (ln.split("\t") for ln in lines if not ln.startswith("#"))
        }
        assert set(rows) == {"blowfish-cbc", "des-cbc"}
        summary = [ln for ln in lines if ln.startswith("# summary")]
        assert len(summary) == 1 and ("PASS" in summary[0] or "FAIL" in summary[0])
        assert rows["blowfish-cbc"] > rows["des-cbc"], summary[0]
    _finish(
        9, t, 60.0, capfd,
        f"1 MiB: blowfish-cbc {rows['blowfish-cbc']:.3f} MB/s > "
        f"des-cbc {rows['des-cbc']:.3f} MB/s (report: bench_report.txt)",
    )


def test_c10_interrupted_put_crash_safety(tmp_path, paillier_256, capfd):
    rng = random.Random(0xACCA)
    with _Timer() as t:
        root = str(tmp_path / "vault")
        pub = paillier_256.public_key
        env_a = envelope.encrypt_multilevel(b"alpha", pub, BF_KEY, rng)
        env_b = envelope.encrypt_multilevel(b"beta", pub, BF_KEY, rng)
        vault.vault_put(root, "a", env_a)
        vault.vault_put(root, "b", env_b)
        # a crashed put: temp blob written, rename never happened
        with open(os.path.join(root, "blobs", ".tmp-123-cafef00d"), "wb") as f:
            f.write(b"partially written blob")
        assert [e.name for e in vault.vault_list(root)] == ["a", "b"]
        assert vault.vault_get(root, "a") == env_a
        assert vault.vault_get(root, "b") == env_b
        assert envelope.decrypt_multilevel(vault.vault_get(root, "a"), paillier_256, BF_KEY) == b"alpha"
        assert vault.vault_fsck(root) == []
    _finish(10, t, 10.0, capfd, "prior entries fully readable after simulated interrupted put")
