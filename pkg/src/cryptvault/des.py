"""DES block cipher (FIPS 46-3 tables), implemented from scratch.

64-bit blocks, 16 Feistel rounds, 8-byte keys of which 56 bits are
effective; the parity bits (bit 8 of each key byte) are ignored, not
checked. Keys are plain 8-byte sequences.

The classic per-bit permutation loops are too slow in pure Python, so
the import-time setup folds them into lookup tables: the initial and
final permutations become per-byte 64-bit scatter tables, and each
S-box is merged with the P permutation into a 6-bit-in/32-bit-out
table. Round subkeys are additionally pre-split into the eight 6-bit
chunks the merged tables consume. The FIPS tables below are the only
authority; everything else is derived from them at import.

A DesKeySchedule is immutable and safe for concurrent use.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import BlockLengthError, KeyLengthError

BLOCK_SIZE = 8
KEY_SIZE = 8

# FIPS 46-3 permutation tables, 1-based bit positions, MSB first.
_IP = (
    58, 50, 42, 34, 26, 18, 10, 2, 60, 52, 44, 36, 28, 20, 12, 4,
    62, 54, 46, 38, 30, 22, 14, 6, 64, 56, 48, 40, 32, 24, 16, 8,
    57, 49, 41, 33, 25, 17, 9, 1, 59, 51, 43, 35, 27, 19, 11, 3,
    61, 53, 45, 37, 29, 21, 13, 5, 63, 55, 47, 39, 31, 23, 15, 7,
)
_FP = (
    40, 8, 48, 16, 56, 24, 64, 32, 39, 7, 47, 15, 55, 23, 63, 31,
    38, 6, 46, 14, 54, 22, 62, 30, 37, 5, 45, 13, 53, 21, 61, 29,
    36, 4, 44, 12, 52, 20, 60, 28, 35, 3, 43, 11, 51, 19, 59, 27,
    34, 2, 42, 10, 50, 18, 58, 26, 33, 1, 41, 9, 49, 17, 57, 25,
)
_E = (
    32, 1, 2, 3, 4, 5, 4, 5, 6, 7, 8, 9, 8, 9, 10, 11,
    12, 13, 12, 13, 14, 15, 16, 17, 16, 17, 18, 19, 20, 21, 20, 21,
    22, 23, 24, 25, 24, 25, 26, 27, 28, 29, 28, 29, 30, 31, 32, 1,
)
_P = (
    16, 7, 20, 21, 29, 12, 28, 17, 1, 15, 23, 26, 5, 18, 31, 10,
    2, 8, 24, 14, 32, 27, 3, 9, 19, 13, 30, 6, 22, 11, 4, 25,
)
_PC1 = (
    57, 49, 41, 33, 25, 17, 9, 1, 58, 50, 42, 34, 26, 18,
    10, 2, 59, 51, 43, 35, 27, 19, 11, 3, 60, 52, 44, 36,
    63, 55, 47, 39, 31, 23, 15, 7, 62, 54, 46, 38, 30, 22,
    14, 6, 61, 53, 45, 37, 29, 21, 13, 5, 28, 20, 12, 4,
)
_PC2 = (
    14, 17, 11, 24, 1, 5, 3, 28, 15, 6, 21, 10,
    23, 19, 12, 4, 26, 8, 16, 7, 27, 20, 13, 2,
    41, 52, 31, 37, 47, 55, 30, 40, 51, 45, 33, 48,
    44, 49, 39, 56, 34, 53, 46, 42, 50, 36, 29, 32,
)
_ROTATIONS = (1, 1, 2, 2, 2, 2, 2, 2, 1, 2, 2, 2, 2, 2, 2, 1)

_SBOXES = (
    (
        (14, 4, 13, 1, 2, 15, 11, 8, 3, 10, 6, 12, 5, 9, 0, 7),
        (0, 15, 7, 4, 14, 2, 13, 1, 10, 6, 12, 11, 9, 5, 3, 8),
        (4, 1, 14, 8, 13, 6, 2, 11, 15, 12, 9, 7, 3, 10, 5, 0),
        (15, 12, 8, 2, 4, 9, 1, 7, 5, 11, 3, 14, 10, 0, 6, 13),
    ),
    (
        (15, 1, 8, 14, 6, 11, 3, 4, 9, 7, 2, 13, 12, 0, 5, 10),
        (3, 13, 4, 7, 15, 2, 8, 14, 12, 0, 1, 10, 6, 9, 11, 5),
        (0, 14, 7, 11, 10, 4, 13, 1, 5, 8, 12, 6, 9, 3, 2, 15),
        (13, 8, 10, 1, 3, 15, 4, 2, 11, 6, 7, 12, 0, 5, 14, 9),
    ),
    (
        (10, 0, 9, 14, 6, 3, 15, 5, 1, 13, 12, 7, 11, 4, 2, 8),
        (13, 7, 0, 9, 3, 4, 6, 10, 2, 8, 5, 14, 12, 11, 15, 1),
        (13, 6, 4, 9, 8, 15, 3, 0, 11, 1, 2, 12, 5, 10, 14, 7),
        (1, 10, 13, 0, 6, 9, 8, 7, 4, 15, 14, 3, 11, 5, 2, 12),
    ),
    (
        (7, 13, 14, 3, 0, 6, 9, 10, 1, 2, 8, 5, 11, 12, 4, 15),
        (13, 8, 11, 5, 6, 15, 0, 3, 4, 7, 2, 12, 1, 10, 14, 9),
        (10, 6, 9, 0, 12, 11, 7, 13, 15, 1, 3, 14, 5, 2, 8, 4),
        (3, 15, 0, 6, 10, 1, 13, 8, 9, 4, 5, 11, 12, 7, 2, 14),
    ),
    (
        (2, 12, 4, 1, 7, 10, 11, 6, 8, 5, 3, 15, 13, 0, 14, 9),
        (14, 11, 2, 12, 4, 7, 13, 1, 5, 0, 15, 10, 3, 9, 8, 6),
        (4, 2, 1, 11, 10, 13, 7, 8, 15, 9, 12, 5, 6, 3, 0, 14),
        (11, 8, 12, 7, 1, 14, 2, 13, 6, 15, 0, 9, 10, 4, 5, 3),
    ),
    (
        (12, 1, 10, 15, 9, 2, 6, 8, 0, 13, 3, 4, 14, 7, 5, 11),
        (10, 15, 4, 2, 7, 12, 9, 5, 6, 1, 13, 14, 0, 11, 3, 8),
        (9, 14, 15, 5, 2, 8, 12, 3, 7, 0, 4, 10, 1, 13, 11, 6),
        (4, 3, 2, 12, 9, 5, 15, 10, 11, 14, 1, 7, 6, 0, 8, 13),
    ),
    (
        (4, 11, 2, 14, 15, 0, 8, 13, 3, 12, 9, 7, 5, 10, 6, 1),
        (13, 0, 11, 7, 4, 9, 1, 10, 14, 3, 5, 12, 2, 15, 8, 6),
        (1, 4, 11, 13, 12, 3, 7, 14, 10, 15, 6, 8, 0, 5, 9, 2),
        (6, 11, 13, 8, 1, 4, 10, 7, 9, 5, 0, 15, 14, 2, 3, 12),
    ),
    (
        (13, 2, 8, 4, 6, 15, 11, 1, 10, 9, 3, 14, 5, 0, 12, 7),
        (1, 15, 13, 8, 10, 3, 7, 4, 12, 5, 6, 11, 0, 14, 9, 2),
        (7, 11, 4, 1, 9, 12, 14, 2, 0, 6, 10, 13, 15, 3, 5, 8),
        (2, 1, 14, 7, 4, 10, 8, 13, 15, 12, 9, 0, 3, 5, 6, 11),
    ),
)


def _permute(value: int, width: int, table: tuple[int, ...]) -> int:
    out = 0
    for pos in table:
        out = (out << 1) | ((value >> (width - pos)) & 1)
    return out


def _byte_scatter_tables(table: tuple[int, ...], in_bits: int):
    """Per-input-byte lookup tables for a bit permutation.

    Entry [i][v] is the permuted output with input byte i set to v and
    every other byte zero; a full permutation is the OR of the eight
    lookups.
    """
    out_bits = len(table)
    masks = [0] * in_bits
    for o, src in enumerate(table):
        masks[src - 1] |= 1 << (out_bits - 1 - o)
    tabs = []
    for b in range(in_bits // 8):
        t = [0] * 256
        for v in range(1, 256):
            low = v & -v
            t[v] = t[v ^ low] | masks[8 * b + 7 - (low.bit_length() - 1)]
        tabs.append(tuple(t))
    return tuple(tabs)


def _merged_sp_tables():
    """S-box output routed through P, one 64-entry table per S-box."""
    sp = []
    for k, box in enumerate(_SBOXES):
        t = []
        for u in range(64):
            row = ((u >> 4) & 2) | (u & 1)
            col = (u >> 1) & 15
            t.append(_permute(box[row][col] << (28 - 4 * k), 32, _P))
        sp.append(tuple(t))
    return tuple(sp)


_IP_TAB = _byte_scatter_tables(_IP, 64)
_FP_TAB = _byte_scatter_tables(_FP, 64)
_SP = _merged_sp_tables()


@dataclass(frozen=True)
class DesKeySchedule:
    """Sixteen 48-bit round subkeys, plus the same keys pre-split into
    the eight 6-bit chunks consumed by the merged S/P tables."""

    subkeys: tuple[int, ...]
    subkey_sextets: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if len(self.subkeys) != 16:
            raise ValueError("DES schedule needs exactly 16 subkeys")
        if any(k >> 48 for k in self.subkeys):
            raise ValueError("DES subkeys must fit in 48 bits")


def des_expand_key(key: bytes) -> DesKeySchedule:
    """PC-1 selection, 16 scheduled left-rotations, PC-2 compression."""
    if len(key) != KEY_SIZE:
        raise KeyLengthError(f"DES key must be {KEY_SIZE} bytes, got {len(key)}")
    cd = _permute(int.from_bytes(key, "big"), 64, _PC1)
    c, d = cd >> 28, cd & 0xFFFFFFF
    subkeys = []
    for rot in _ROTATIONS:
        c = ((c << rot) | (c >> (28 - rot))) & 0xFFFFFFF
        d = ((d << rot) | (d >> (28 - rot))) & 0xFFFFFFF
        subkeys.append(_permute((c << 28) | d, 56, _PC2))
    sextets = tuple(
        tuple((k >> (42 - 6 * i)) & 63 for i in range(8)) for k in subkeys
    )
    return DesKeySchedule(tuple(subkeys), sextets)


def des_encrypt_block(schedule: DesKeySchedule, block: bytes) -> bytes:
    """Encrypt one 8-byte block."""
    return _crypt_block(schedule.subkey_sextets, block)


def des_decrypt_block(schedule: DesKeySchedule, block: bytes) -> bytes:
    """Decrypt one 8-byte block (subkeys applied in reverse order)."""
    return _crypt_block(schedule.subkey_sextets[::-1], block)


def _crypt_block(round_sextets, block: bytes) -> bytes:
    if len(block) != BLOCK_SIZE:
        raise BlockLengthError(f"DES blocks are 8 bytes, got {len(block)}")
    x = int.from_bytes(block, "big")
    t0, t1, t2, t3, t4, t5, t6, t7 = _IP_TAB
    v = (
        t0[x >> 56] | t1[(x >> 48) & 255] | t2[(x >> 40) & 255]
        | t3[(x >> 32) & 255] | t4[(x >> 24) & 255] | t5[(x >> 16) & 255]
        | t6[(x >> 8) & 255] | t7[x & 255]
    )
    l, r = v >> 32, v & 0xFFFFFFFF
    sp0, sp1, sp2, sp3, sp4, sp5, sp6, sp7 = _SP
    for k0, k1, k2, k3, k4, k5, k6, k7 in round_sextets:
        # e holds the expansion E(r): each 6-bit window of the 34-bit
        # value r32 | r | r1 is one S-box input
        e = ((r & 1) << 33) | (r << 1) | (r >> 31)
        f = (
            sp0[((e >> 28) & 63) ^ k0] | sp1[((e >> 24) & 63) ^ k1]
            | sp2[((e >> 20) & 63) ^ k2] | sp3[((e >> 16) & 63) ^ k3]
            | sp4[((e >> 12) & 63) ^ k4] | sp5[((e >> 8) & 63) ^ k5]
            | sp6[((e >> 4) & 63) ^ k6] | sp7[(e & 63) ^ k7]
        )
        l, r = r, l ^ f
    # pre-output swaps the halves, then the inverse initial permutation
    y = (r << 32) | l
    u0, u1, u2, u3, u4, u5, u6, u7 = _FP_TAB
    out = (
        u0[y >> 56] | u1[(y >> 48) & 255] | u2[(y >> 40) & 255]
        | u3[(y >> 32) & 255] | u4[(y >> 24) & 255] | u5[(y >> 16) & 255]
        | u6[(y >> 8) & 255] | u7[y & 255]
    )
    return out.to_bytes(8, "big")
