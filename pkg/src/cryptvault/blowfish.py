"""Blowfish block cipher, implemented from scratch.

64-bit blocks, 16-round Feistel network, variable key length (4..56
bytes). The P-array and S-boxes start from hexadecimal digits of pi
(see _blowfish_tables) and are mixed with the key by the usual
expansion procedure: XOR-fold the key into the P-array, then replace
P and S entries with iterated encryptions of the zero block (521
block encryptions in total).

A completed BlowfishKeySchedule is immutable and safe to share across
threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from ._blowfish_tables import P_INIT, S_INIT
from .errors import BlockLengthError, KeyLengthError

_MASK32 = 0xFFFFFFFF

MIN_KEY_BYTES = 4
MAX_KEY_BYTES = 56
BLOCK_SIZE = 8


class Block64(NamedTuple):
    """A 64-bit cipher block as two 32-bit halves."""

    left: int
    right: int

    @classmethod
    def from_bytes(cls, data: bytes) -> "Block64":
        if len(data) != 8:
            raise BlockLengthError(f"Blowfish blocks are 8 bytes, got {len(data)}")
        return cls(int.from_bytes(data[:4], "big"), int.from_bytes(data[4:], "big"))

    def to_bytes(self) -> bytes:
        return self.left.to_bytes(4, "big") + self.right.to_bytes(4, "big")


@dataclass(frozen=True)
class BlowfishKeySchedule:
    """Expanded key material: 18 P-array words and 4x256 S-box words."""

    p_array: tuple[int, ...]
    s_boxes: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if len(self.p_array) != 18:
            raise ValueError("P-array must have 18 entries")
        if len(self.s_boxes) != 4 or any(len(b) != 256 for b in self.s_boxes):
            raise ValueError("S-boxes must be 4 tables of 256 entries")


def expand_key(key: bytes) -> BlowfishKeySchedule:
    """Derive the P-array and S-boxes from a 4..56 byte key."""
    if not MIN_KEY_BYTES <= len(key) <= MAX_KEY_BYTES:
        raise KeyLengthError(
            f"Blowfish key must be {MIN_KEY_BYTES}..{MAX_KEY_BYTES} bytes, got {len(key)}"
        )
    p = list(P_INIT)
    s0, s1, s2, s3 = (list(box) for box in S_INIT)

    j = 0
    for i in range(18):
        word = 0
        for _ in range(4):
            word = (word << 8) | key[j]
            j = (j + 1) % len(key)
        p[i] ^= word

    l = r = 0
    for i in range(0, 18, 2):
        l, r = _encrypt_words(p, s0, s1, s2, s3, l, r)
        p[i], p[i + 1] = l, r
    for box in (s0, s1, s2, s3):
        for i in range(0, 256, 2):
            l, r = _encrypt_words(p, s0, s1, s2, s3, l, r)
            box[i], box[i + 1] = l, r

    return BlowfishKeySchedule(tuple(p), (tuple(s0), tuple(s1), tuple(s2), tuple(s3)))


def f_function(schedule: BlowfishKeySchedule, x: int) -> int:
    """Round function: ((S0[a] + S1[b]) ^ S2[c]) + S3[d] mod 2^32.

    a..d are the bytes of x from most to least significant.
    """
    s0, s1, s2, s3 = schedule.s_boxes
    y = (s0[(x >> 24) & 0xFF] + s1[(x >> 16) & 0xFF]) & _MASK32
    y ^= s2[(x >> 8) & 0xFF]
    return (y + s3[x & 0xFF]) & _MASK32


def encrypt_block(schedule: BlowfishKeySchedule, b: Block64) -> Block64:
    """Encrypt one 64-bit block."""
    s0, s1, s2, s3 = schedule.s_boxes
    l, r = _encrypt_words(schedule.p_array, s0, s1, s2, s3, b.left, b.right)
    return Block64(l, r)


def decrypt_block(schedule: BlowfishKeySchedule, b: Block64) -> Block64:
    """Decrypt one 64-bit block (P-array consumed in reverse order)."""
    s0, s1, s2, s3 = schedule.s_boxes
    l, r = _decrypt_words(schedule.p_array, s0, s1, s2, s3, b.left, b.right)
    return Block64(l, r)


def encrypt_bytes(schedule: BlowfishKeySchedule, block: bytes) -> bytes:
    """Encrypt one 8-byte block given and returned as bytes."""
    b = encrypt_block(schedule, Block64.from_bytes(block))
    return b.to_bytes()


def decrypt_bytes(schedule: BlowfishKeySchedule, block: bytes) -> bytes:
    """Decrypt one 8-byte block given and returned as bytes."""
    b = decrypt_block(schedule, Block64.from_bytes(block))
    return b.to_bytes()


# The round loops are unrolled with alternating variable roles (each
# swap is absorbed into which variable the next round touches); this
# roughly halves the throughput cost of the pure-Python inner loop.

def _encrypt_words(p, s0, s1, s2, s3, x: int, y: int) -> tuple[int, int]:
    x ^= p[0]
    y ^= ((((s0[x >> 24] + s1[(x >> 16) & 255]) & _MASK32) ^ s2[(x >> 8) & 255]) + s3[x & 255]) & _MASK32
    y ^= p[1]
    x ^= ((((s0[y >> 24] + s1[(y >> 16) & 255]) & _MASK32) ^ s2[(y >> 8) & 255]) + s3[y & 255]) & _MASK32
    x ^= p[2]
    y ^= ((((s0[x >> 24] + s1[(x >> 16) & 255]) & _MASK32) ^ s2[(x >> 8) & 255]) + s3[x & 255]) & _MASK32
    y ^= p[3]
    x ^= ((((s0[y >> 24] + s1[(y >> 16) & 255]) & _MASK32) ^ s2[(y >> 8) & 255]) + s3[y & 255]) & _MASK32
    x ^= p[4]
    y ^= ((((s0[x >> 24] + s1[(x >> 16) & 255]) & _MASK32) ^ s2[(x >> 8) & 255]) + s3[x & 255]) & _MASK32
    y ^= p[5]
    x ^= ((((s0[y >> 24] + s1[(y >> 16) & 255]) & _MASK32) ^ s2[(y >> 8) & 255]) + s3[y & 255]) & _MASK32
    x ^= p[6]
    y ^= ((((s0[x >> 24] + s1[(x >> 16) & 255]) & _MASK32) ^ s2[(x >> 8) & 255]) + s3[x & 255]) & _MASK32
    y ^= p[7]
    x ^= ((((s0[y >> 24] + s1[(y >> 16) & 255]) & _MASK32) ^ s2[(y >> 8) & 255]) + s3[y & 255]) & _MASK32
    x ^= p[8]
    y ^= ((((s0[x >> 24] + s1[(x >> 16) & 255]) & _MASK32) ^ s2[(x >> 8) & 255]) + s3[x & 255]) & _MASK32
    y ^= p[9]
    x ^= ((((s0[y >> 24] + s1[(y >> 16) & 255]) & _MASK32) ^ s2[(y >> 8) & 255]) + s3[y & 255]) & _MASK32
    x ^= p[10]
    y ^= ((((s0[x >> 24] + s1[(x >> 16) & 255]) & _MASK32) ^ s2[(x >> 8) & 255]) + s3[x & 255]) & _MASK32
    y ^= p[11]
    x ^= ((((s0[y >> 24] + s1[(y >> 16) & 255]) & _MASK32) ^ s2[(y >> 8) & 255]) + s3[y & 255]) & _MASK32
    x ^= p[12]
    y ^= ((((s0[x >> 24] + s1[(x >> 16) & 255]) & _MASK32) ^ s2[(x >> 8) & 255]) + s3[x & 255]) & _MASK32
    y ^= p[13]
    x ^= ((((s0[y >> 24] + s1[(y >> 16) & 255]) & _MASK32) ^ s2[(y >> 8) & 255]) + s3[y & 255]) & _MASK32
    x ^= p[14]
    y ^= ((((s0[x >> 24] + s1[(x >> 16) & 255]) & _MASK32) ^ s2[(x >> 8) & 255]) + s3[x & 255]) & _MASK32
    y ^= p[15]
    x ^= ((((s0[y >> 24] + s1[(y >> 16) & 255]) & _MASK32) ^ s2[(y >> 8) & 255]) + s3[y & 255]) & _MASK32
    # after the 16th round the final swap is undone, then the last two
    # P entries close the cipher
    x ^= p[16]
    y ^= p[17]
    return y, x


def _decrypt_words(p, s0, s1, s2, s3, x: int, y: int) -> tuple[int, int]:
    x ^= p[17]
    y ^= ((((s0[x >> 24] + s1[(x >> 16) & 255]) & _MASK32) ^ s2[(x >> 8) & 255]) + s3[x & 255]) & _MASK32
    y ^= p[16]
    x ^= ((((s0[y >> 24] + s1[(y >> 16) & 255]) & _MASK32) ^ s2[(y >> 8) & 255]) + s3[y & 255]) & _MASK32
    x ^= p[15]
    y ^= ((((s0[x >> 24] + s1[(x >> 16) & 255]) & _MASK32) ^ s2[(x >> 8) & 255]) + s3[x & 255]) & _MASK32
    y ^= p[14]
    x ^= ((((s0[y >> 24] + s1[(y >> 16) & 255]) & _MASK32) ^ s2[(y >> 8) & 255]) + s3[y & 255]) & _MASK32
    x ^= p[13]
    y ^= ((((s0[x >> 24] + s1[(x >> 16) & 255]) & _MASK32) ^ s2[(x >> 8) & 255]) + s3[x & 255]) & _MASK32
    y ^= p[12]
    x ^= ((((s0[y >> 24] + s1[(y >> 16) & 255]) & _MASK32) ^ s2[(y >> 8) & 255]) + s3[y & 255]) & _MASK32
    x ^= p[11]
    y ^= ((((s0[x >> 24] + s1[(x >> 16) & 255]) & _MASK32) ^ s2[(x >> 8) & 255]) + s3[x & 255]) & _MASK32
    y ^= p[10]
    x ^= ((((s0[y >> 24] + s1[(y >> 16) & 255]) & _MASK32) ^ s2[(y >> 8) & 255]) + s3[y & 255]) & _MASK32
    x ^= p[9]
    y ^= ((((s0[x >> 24] + s1[(x >> 16) & 255]) & _MASK32) ^ s2[(x >> 8) & 255]) + s3[x & 255]) & _MASK32
    y ^= p[8]
    x ^= ((((s0[y >> 24] + s1[(y >> 16) & 255]) & _MASK32) ^ s2[(y >> 8) & 255]) + s3[y & 255]) & _MASK32
    x ^= p[7]
    y ^= ((((s0[x >> 24] + s1[(x >> 16) & 255]) & _MASK32) ^ s2[(x >> 8) & 255]) + s3[x & 255]) & _MASK32
    y ^= p[6]
    x ^= ((((s0[y >> 24] + s1[(y >> 16) & 255]) & _MASK32) ^ s2[(y >> 8) & 255]) + s3[y & 255]) & _MASK32
    x ^= p[5]
    y ^= ((((s0[x >> 24] + s1[(x >> 16) & 255]) & _MASK32) ^ s2[(x >> 8) & 255]) + s3[x & 255]) & _MASK32
    y ^= p[4]
    x ^= ((((s0[y >> 24] + s1[(y >> 16) & 255]) & _MASK32) ^ s2[(y >> 8) & 255]) + s3[y & 255]) & _MASK32
    x ^= p[3]
    y ^= ((((s0[x >> 24] + s1[(x >> 16) & 255]) & _MASK32) ^ s2[(x >> 8) & 255]) + s3[x & 255]) & _MASK32
    y ^= p[2]
    x ^= ((((s0[y >> 24] + s1[(y >> 16) & 255]) & _MASK32) ^ s2[(y >> 8) & 255]) + s3[y & 255]) & _MASK32
    x ^= p[1]
    y ^= p[0]
    return y, x
