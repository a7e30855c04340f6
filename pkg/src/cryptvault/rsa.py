"""Textbook RSA with an explicit multiplicative-homomorphic operation.

Deliberately unpadded: OAEP/PSS would destroy the multiplicative
homomorphism this module exists to expose (decrypting a product of
ciphertexts yields the product of the plaintexts mod n). That makes it
malleable and deterministic, which is fine for this artifact and wrong
for anything security-sensitive; do not reuse as production crypto.

Key generation uses Miller-Rabin (40 rounds, error < 2^-80) behind
trial division by every prime below 1000.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from ._keyfile import parse_fields
from .errors import MessageRangeError, ParseError, PrimeGenerationError

_E_CANDIDATES = (65537, 257, 17, 5, 3)
_MR_ROUNDS = 40
_PRIME_CANDIDATE_BUDGET = 1000


def _sieve_below(limit: int) -> tuple[int, ...]:
    flags = bytearray([1]) * limit
    flags[0:2] = b"\x00\x00"
    for i in range(2, int(limit ** 0.5) + 1):
        if flags[i]:
            flags[i * i:: i] = bytes(len(flags[i * i:: i]))
    return tuple(i for i in range(limit) if flags[i])


_SMALL_PRIMES = _sieve_below(1000)


def is_probable_prime(n: int, rng: random.Random | None = None) -> bool:
    """Trial division below 1000, then 40 Miller-Rabin rounds."""
    if n < 2:
        return False
    for sp in _SMALL_PRIMES:
        if n == sp:
            return True
        if n % sp == 0:
            return False
    rng = rng or random.SystemRandom()
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for _ in range(_MR_ROUNDS):
        a = rng.randrange(2, n - 1)
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = pow(x, 2, n)
            if x == n - 1:
                break
        else:
            return False
    return True


def generate_prime(bits: int, rng: random.Random) -> int:
    """Random prime with the top bit set, bounded candidate count."""
    for _ in range(_PRIME_CANDIDATE_BUDGET):
        candidate = rng.getrandbits(bits) | (1 << (bits - 1)) | 1
        if is_probable_prime(candidate, rng):
            return candidate
    raise PrimeGenerationError(
        f"no {bits}-bit prime found in {_PRIME_CANDIDATE_BUDGET} candidates"
    )


@dataclass(frozen=True)
class RsaPublicKey:
    n: int
    e: int


@dataclass(frozen=True)
class RsaKeyPair:
    n: int
    e: int
    d: int
    p: int
    q: int

    @property
    def public_key(self) -> RsaPublicKey:
        return RsaPublicKey(self.n, self.e)


def rsa_generate(bits: int, rng: random.Random | None = None) -> RsaKeyPair:
    """Generate a keypair with an n of bits-1 or bits bits.

    e is 65537 when coprime to lambda(n), otherwise the first usable
    candidate of 257, 17, 5, 3.
    """
    if bits < 16 or bits % 2:
        raise ValueError("bits must be even and at least 16")
    rng = rng or random.SystemRandom()
    half = bits // 2
    p = generate_prime(half, rng)
    q = p
    for _ in range(_PRIME_CANDIDATE_BUDGET):
        q = generate_prime(half, rng)
        if q != p:
            break
    else:
        raise PrimeGenerationError("could not find a second distinct prime")
    lam = math.lcm(p - 1, q - 1)
    for e in _E_CANDIDATES:
        if math.gcd(e, lam) == 1:
            return RsaKeyPair(p * q, e, pow(e, -1, lam), p, q)
    raise PrimeGenerationError("no public exponent is coprime to lambda(n)")


def rsa_encrypt(pub: RsaPublicKey, m: int) -> int:
    """m^e mod n for m in [0, n)."""
    if not 0 <= m < pub.n:
        raise MessageRangeError(f"message {m} outside [0, {pub.n})")
    return pow(m, pub.e, pub.n)


def rsa_decrypt(priv: RsaKeyPair, c: int) -> int:
    """c^d mod n for c in [0, n)."""
    if not 0 <= c < priv.n:
        raise MessageRangeError(f"ciphertext {c} outside [0, {priv.n})")
    return pow(c, priv.d, priv.n)


def rsa_homomorphic_multiply(pub: RsaPublicKey, c1: int, c2: int) -> int:
    """Ciphertext of m1*m2 mod n, computed as c1*c2 mod n."""
    for c in (c1, c2):
        if not 0 <= c < pub.n:
            raise MessageRangeError(f"ciphertext {c} outside [0, {pub.n})")
    return (c1 * c2) % pub.n


# --- key files ---
#
# Line-oriented text: a header line, then one lowercase hex field per
# line. Private files carry the full factorization so invariants can
# be re-checked on load.

_PUBLIC_HEADER = "rsa-public v1"
_PRIVATE_HEADER = "rsa-private v1"


def save_public_key(pub: RsaPublicKey, path: str) -> None:
    with open(path, "w", encoding="ascii") as f:
        f.write(f"{_PUBLIC_HEADER}\nn={pub.n:x}\ne={pub.e:x}\n")


def load_public_key(path: str) -> RsaPublicKey:
    with open(path, encoding="ascii") as f:
        fields = parse_fields(path, f.read(), _PUBLIC_HEADER, ("n", "e"))
    if fields["n"] < 2 or fields["e"] < 2:
        raise ParseError(f"{path}: implausible public key values")
    return RsaPublicKey(fields["n"], fields["e"])


def save_private_key(pair: RsaKeyPair, path: str) -> None:
    with open(path, "w", encoding="ascii") as f:
        f.write(
            f"{_PRIVATE_HEADER}\nn={pair.n:x}\ne={pair.e:x}\nd={pair.d:x}\n"
            f"p={pair.p:x}\nq={pair.q:x}\n"
        )


def load_private_key(path: str) -> RsaKeyPair:
    with open(path, encoding="ascii") as f:
        fields = parse_fields(path, f.read(), _PRIVATE_HEADER, ("n", "e", "d", "p", "q"))
    pair = RsaKeyPair(fields["n"], fields["e"], fields["d"], fields["p"], fields["q"])
    _check_invariants(path, pair)
    return pair


def _check_invariants(path: str, pair: RsaKeyPair) -> None:
    if pair.p == pair.q or pair.n != pair.p * pair.q:
        raise ParseError(f"{path}: n is not the product of two distinct primes")
    if not (is_probable_prime(pair.p) and is_probable_prime(pair.q)):
        raise ParseError(f"{path}: p or q is not prime")
    lam = math.lcm(pair.p - 1, pair.q - 1)
    if (pair.e * pair.d) % lam != 1:
        raise ParseError(f"{path}: e*d is not 1 mod lcm(p-1, q-1)")
    for m in (2, 3, pair.n - 1):
        if pow(pow(m, pair.e, pair.n), pair.d, pair.n) != m:
            raise ParseError(f"{path}: decrypt(encrypt(m)) != m spot check failed")
