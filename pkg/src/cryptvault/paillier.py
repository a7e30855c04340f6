"""Paillier cryptosystem (simplified g = n+1 variant), additively
homomorphic: the product of two ciphertexts mod n^2 decrypts to the
sum of the plaintexts mod n.

Encryption is randomized (fresh unit r per ciphertext); decryption is
L(c^lambda mod n^2) * mu mod n with L(x) = (x-1)/n. Using g = n+1
makes g^m a single multiplication: (1 + m*n) mod n^2.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .errors import (
    CiphertextRangeError,
    MessageRangeError,
    ParseError,
    PrimeGenerationError,
    RandomnessError,
)
from ._keyfile import parse_fields
from .rsa import generate_prime

_GENERATION_ATTEMPTS = 50


@dataclass(frozen=True)
class PaillierPublicKey:
    n: int
    g: int


@dataclass(frozen=True)
class PaillierKeyPair:
    n: int
    g: int
    lam: int
    mu: int

    @property
    def public_key(self) -> PaillierPublicKey:
        return PaillierPublicKey(self.n, self.g)


def paillier_generate(bits: int, rng: random.Random | None = None) -> PaillierKeyPair:
    """Generate a keypair with lambda = lcm(p-1, q-1) and g = n+1."""
    if bits < 16 or bits % 2:
        raise ValueError("bits must be even and at least 16")
    rng = rng or random.SystemRandom()
    half = bits // 2
    for _ in range(_GENERATION_ATTEMPTS):
        p = generate_prime(half, rng)
        q = generate_prime(half, rng)
        if p == q or math.gcd(p * q, (p - 1) * (q - 1)) != 1:
            continue
        n = p * q
        lam = math.lcm(p - 1, q - 1)
        mu = pow(_ell(pow(n + 1, lam, n * n), n), -1, n)
        return PaillierKeyPair(n, n + 1, lam, mu)
    raise PrimeGenerationError("could not find usable Paillier primes")


def _ell(x: int, n: int) -> int:
    return (x - 1) // n


def random_unit(n: int, rng: random.Random | None = None) -> int:
    """Uniform r in [1, n) with gcd(r, n) = 1, by rejection."""
    rng = rng or random.SystemRandom()
    while True:
        r = rng.randrange(1, n)
        if math.gcd(r, n) == 1:
            return r


def paillier_encrypt(pub: PaillierPublicKey, m: int, r: int) -> int:
    """g^m * r^n mod n^2 for m in [0, n) and unit randomness r."""
    n = pub.n
    if not 0 <= m < n:
        raise MessageRangeError(f"message {m} outside [0, {n})")
    if not 1 <= r < n or math.gcd(r, n) != 1:
        raise RandomnessError(f"randomness {r} is not a unit of Z/{n}")
    nn = n * n
    if pub.g == n + 1:
        gm = (1 + m * n) % nn
    else:
        gm = pow(pub.g, m, nn)
    return (gm * pow(r, n, nn)) % nn


def paillier_decrypt(priv: PaillierKeyPair, c: int) -> int:
    """L(c^lambda mod n^2) * mu mod n."""
    n = priv.n
    nn = n * n
    if not 0 <= c < nn:
        raise CiphertextRangeError(f"ciphertext {c} outside [0, {nn})")
    x = pow(c, priv.lam, nn)
    if (x - 1) % n:
        raise CiphertextRangeError(f"ciphertext {c} is not coprime to the modulus")
    return (_ell(x, n) * priv.mu) % n


def paillier_add(pub: PaillierPublicKey, c1: int, c2: int) -> int:
    """Ciphertext of m1+m2 mod n, computed as c1*c2 mod n^2."""
    nn = pub.n * pub.n
    for c in (c1, c2):
        if not 0 <= c < nn:
            raise CiphertextRangeError(f"ciphertext {c} outside [0, {nn})")
    return (c1 * c2) % nn


# --- key files (same line-oriented shape as the RSA ones) ---

_PUBLIC_HEADER = "paillier-public v1"
_PRIVATE_HEADER = "paillier-private v1"


def save_public_key(pub: PaillierPublicKey, path: str) -> None:
    with open(path, "w", encoding="ascii") as f:
        f.write(f"{_PUBLIC_HEADER}\nn={pub.n:x}\n")


def load_public_key(path: str) -> PaillierPublicKey:
    with open(path, encoding="ascii") as f:
        fields = parse_fields(path, f.read(), _PUBLIC_HEADER, ("n",))
    if fields["n"] < 2:
        raise ParseError(f"{path}: implausible modulus")
    return PaillierPublicKey(fields["n"], fields["n"] + 1)


def save_private_key(pair: PaillierKeyPair, path: str) -> None:
    with open(path, "w", encoding="ascii") as f:
        f.write(f"{_PRIVATE_HEADER}\nn={pair.n:x}\nlambda={pair.lam:x}\nmu={pair.mu:x}\n")


def load_private_key(path: str) -> PaillierKeyPair:
    with open(path, encoding="ascii") as f:
        fields = parse_fields(path, f.read(), _PRIVATE_HEADER, ("n", "lambda", "mu"))
    pair = PaillierKeyPair(fields["n"], fields["n"] + 1, fields["lambda"], fields["mu"])
    n, nn = pair.n, pair.n * pair.n
    if (pair.mu * _ell(pow(pair.g, pair.lam, nn), n)) % n != 1:
        raise ParseError(f"{path}: mu is not the inverse of L(g^lambda mod n^2)")
    for m in (0, 1, n - 1):
        if paillier_decrypt(pair, paillier_encrypt(pair.public_key, m, n - 1)) != m:
            raise ParseError(f"{path}: decrypt(encrypt(m)) != m spot check failed")
    return pair
