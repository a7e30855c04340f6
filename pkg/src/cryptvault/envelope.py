"""Layered ciphertext envelopes and the two pipelines built on them.

The multilevel pipeline chunks the plaintext into integers, encrypts
each chunk with Paillier (so ciphertexts can still be added without
any decryption), then wraps the serialized ciphertext list in
Blowfish-CBC. Stack, outermost first: BLOWFISH_CBC, PAILLIER.

The transmission pipeline encrypts the plaintext with DES-CBC under a
fresh 8-byte session key and wraps that key with textbook RSA. Stack:
RSA_KEYWRAP, DES_CBC.

Binary layout (big-endian throughout):

    magic "CVLT" (4) | version (1) | stack_len (1) | layer tags
    | iv_len (1) | iv | wrapped_key_len (2) | wrapped_key
    | chunk_size (2) | digest (32) | body_len (8) | body

A SHA-256 of the original plaintext rides along as the integrity
check. Envelopes produced by homomorphic addition carry an all-zero
digest sentinel instead, because the producer cannot know the sum's
plaintext; decryptors skip verification for those and warn.

Inside the multilevel body (after the Blowfish layer is removed):

    plain_len (8) | count (4) | count * (ct_len (4) | ct magnitude)

plain_len is the original plaintext byte length; it fixes the width
of the final chunk so decryption is exact for all inputs, including
ones whose last chunk begins with zero bytes.
"""

from __future__ import annotations

import enum
import hashlib
import random
import struct
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from . import blowfish, des
from .errors import (
    BlockLengthError,
    CorruptEnvelopeError,
    IntegrityError,
    KeyRangeError,
    LayerStackError,
    PaddingError,
)
from .paillier import PaillierKeyPair, PaillierPublicKey, paillier_decrypt, paillier_encrypt, random_unit
from .rsa import RsaKeyPair, RsaPublicKey, rsa_encrypt

MAGIC = b"CVLT"
VERSION = 1
DIGEST_SENTINEL = bytes(32)
_BLOCK = 8


class LayerTag(enum.IntEnum):
    PAILLIER = 0x01
    BLOWFISH_CBC = 0x02
    DES_CBC = 0x03
    RSA_KEYWRAP = 0x04


MULTILEVEL_STACK = (LayerTag.BLOWFISH_CBC, LayerTag.PAILLIER)
DES_RSA_STACK = (LayerTag.RSA_KEYWRAP, LayerTag.DES_CBC)
_CBC_LAYERS = (LayerTag.BLOWFISH_CBC, LayerTag.DES_CBC)


@dataclass(frozen=True)
class CipherEnvelope:
    """Self-describing layered ciphertext; layer_stack is outermost first."""

    layer_stack: tuple[LayerTag, ...]
    iv: bytes
    wrapped_key: bytes
    chunk_size: int
    plaintext_digest: bytes
    body: bytes

    def __post_init__(self) -> None:
        if not self.layer_stack:
            raise ValueError("layer stack must not be empty")
        has_cbc = any(t in _CBC_LAYERS for t in self.layer_stack)
        if len(self.iv) != (8 if has_cbc else 0):
            raise ValueError("iv must be 8 bytes exactly when a CBC layer exists")
        has_wrap = LayerTag.RSA_KEYWRAP in self.layer_stack
        if has_wrap and not self.wrapped_key:
            raise ValueError("RSA_KEYWRAP stack requires a wrapped key")
        if not has_wrap and self.wrapped_key:
            raise ValueError("wrapped key present without an RSA_KEYWRAP layer")
        if len(self.wrapped_key) > 0xFFFF:
            raise ValueError("wrapped key too long for the envelope format")
        has_paillier = LayerTag.PAILLIER in self.layer_stack
        if has_paillier and not 1 <= self.chunk_size <= 0xFFFF:
            raise ValueError("Paillier stack requires a positive chunk size")
        if not has_paillier and self.chunk_size:
            raise ValueError("chunk size present without a Paillier layer")
        if len(self.plaintext_digest) != 32:
            raise ValueError("digest must be 32 bytes")
        if self.layer_stack[0] in _CBC_LAYERS and len(self.body) % _BLOCK:
            raise ValueError("body of a CBC-wrapped envelope must be a multiple of 8")


def serialize(env: CipherEnvelope) -> bytes:
    parts = [
        MAGIC,
        struct.pack(">BB", VERSION, len(env.layer_stack)),
        bytes(env.layer_stack),
        struct.pack(">B", len(env.iv)),
        env.iv,
        struct.pack(">H", len(env.wrapped_key)),
        env.wrapped_key,
        struct.pack(">H", env.chunk_size),
        env.plaintext_digest,
        struct.pack(">Q", len(env.body)),
        env.body,
    ]
    return b"".join(parts)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, count: int) -> bytes:
        if self.pos + count > len(self.data):
            raise CorruptEnvelopeError("envelope truncated")
        out = self.data[self.pos: self.pos + count]
        self.pos += count
        return out


def parse(data: bytes) -> CipherEnvelope:
    """Strict inverse of serialize; trailing bytes are an error."""
    r = _Reader(data)
    if r.take(4) != MAGIC:
        raise CorruptEnvelopeError("bad magic")
    version, stack_len = struct.unpack(">BB", r.take(2))
    if version != VERSION:
        raise CorruptEnvelopeError(f"unsupported version {version}")
    if stack_len == 0:
        raise CorruptEnvelopeError("empty layer stack")
    try:
        stack = tuple(LayerTag(t) for t in r.take(stack_len))
    except ValueError as exc:
        raise CorruptEnvelopeError(f"unknown layer tag: {exc}") from None
    (iv_len,) = struct.unpack(">B", r.take(1))
    iv = r.take(iv_len)
    (wk_len,) = struct.unpack(">H", r.take(2))
    wrapped_key = r.take(wk_len)
    (chunk_size,) = struct.unpack(">H", r.take(2))
    digest = r.take(32)
    (body_len,) = struct.unpack(">Q", r.take(8))
    body = r.take(body_len)
    if r.pos != len(data):
        raise CorruptEnvelopeError("trailing bytes after envelope body")
    try:
        return CipherEnvelope(stack, iv, wrapped_key, chunk_size, digest, body)
    except ValueError as exc:
        raise CorruptEnvelopeError(str(exc)) from None


# --- padding and CBC mode ---

def pkcs7_pad(data: bytes, block_size: int = _BLOCK) -> bytes:
    """Append k bytes of value k, 1 <= k <= block_size."""
    k = block_size - len(data) % block_size
    return data + bytes([k]) * k


def pkcs7_unpad(data: bytes, block_size: int = _BLOCK) -> bytes:
    if not data or len(data) % block_size:
        raise PaddingError("padded data must be a non-empty multiple of the block size")
    k = data[-1]
    if not 1 <= k <= block_size or data[-k:] != bytes([k]) * k:
        raise PaddingError("malformed padding trailer")
    return data[:-k]


BlockFn = Callable[[bytes], bytes]


def cbc_encrypt(encrypt_block: BlockFn, iv: bytes, data: bytes) -> bytes:
    """Standard CBC chaining over 8-byte blocks."""
    if len(iv) != _BLOCK:
        raise BlockLengthError("iv must be 8 bytes")
    if len(data) % _BLOCK:
        raise BlockLengthError("CBC input must be a multiple of 8 bytes")
    out = bytearray()
    prev = int.from_bytes(iv, "big")
    for i in range(0, len(data), _BLOCK):
        block = prev ^ int.from_bytes(data[i: i + _BLOCK], "big")
        enc = encrypt_block(block.to_bytes(8, "big"))
        prev = int.from_bytes(enc, "big")
        out += enc
    return bytes(out)


def cbc_decrypt(decrypt_block: BlockFn, iv: bytes, data: bytes) -> bytes:
    if len(iv) != _BLOCK:
        raise BlockLengthError("iv must be 8 bytes")
    if len(data) % _BLOCK:
        raise BlockLengthError("CBC input must be a multiple of 8 bytes")
    out = bytearray()
    prev = int.from_bytes(iv, "big")
    for i in range(0, len(data), _BLOCK):
        block = data[i: i + _BLOCK]
        dec = prev ^ int.from_bytes(decrypt_block(block), "big")
        out += dec.to_bytes(8, "big")
        prev = int.from_bytes(block, "big")
    return bytes(out)


# --- Paillier ciphertext blob ---

def serialize_ciphertexts(cts: Sequence[int]) -> bytes:
    """count (4) then each ciphertext as length-prefixed magnitude bytes."""
    parts = [struct.pack(">I", len(cts))]
    for c in cts:
        mag = c.to_bytes((c.bit_length() + 7) // 8, "big")
        parts.append(struct.pack(">I", len(mag)))
        parts.append(mag)
    return b"".join(parts)


def parse_ciphertexts(data: bytes) -> tuple[tuple[int, ...], int]:
    """Inverse of serialize_ciphertexts; returns (ciphertexts, bytes read)."""
    r = _Reader(data)
    try:
        (count,) = struct.unpack(">I", r.take(4))
        cts = []
        for _ in range(count):
            (ln,) = struct.unpack(">I", r.take(4))
            cts.append(int.from_bytes(r.take(ln), "big"))
    except CorruptEnvelopeError:
        raise CorruptEnvelopeError("ciphertext blob truncated") from None
    return tuple(cts), r.pos


def _rand_bytes(rng: random.Random, count: int) -> bytes:
    return rng.getrandbits(8 * count).to_bytes(count, "big")


def paillier_chunk_size(n: int) -> int:
    """Chunk byte length floor((bits(n)-1)/8) - 1; keeps chunks < n."""
    return (n.bit_length() - 1) // 8 - 1


# --- multilevel pipeline: Paillier inside Blowfish-CBC ---

def encrypt_multilevel(
    plaintext: bytes,
    paillier_pub: PaillierPublicKey,
    blowfish_key: bytes,
    rng: random.Random | None = None,
) -> CipherEnvelope:
    rng = rng or random.SystemRandom()
    cs = paillier_chunk_size(paillier_pub.n)
    if cs < 1:
        raise KeyRangeError("Paillier modulus too small to hold a plaintext chunk")
    cts = []
    for i in range(0, len(plaintext), cs):
        m = int.from_bytes(plaintext[i: i + cs], "big")
        cts.append(paillier_encrypt(paillier_pub, m, random_unit(paillier_pub.n, rng)))
    digest = hashlib.sha256(plaintext).digest()
    return wrap_multilevel(len(plaintext), cts, cs, digest, blowfish_key, rng)


def decrypt_multilevel(
    env: CipherEnvelope,
    paillier_priv: PaillierKeyPair,
    blowfish_key: bytes,
) -> bytes:
    plain_len, cts = unwrap_multilevel(env, blowfish_key)
    cs = env.chunk_size
    if cs < 1:
        raise CorruptEnvelopeError("multilevel envelope must record a positive chunk size")
    if len(cts) != -(-plain_len // cs):
        raise CorruptEnvelopeError("chunk count does not match recorded plaintext length")
    values = [paillier_decrypt(paillier_priv, c) for c in cts]
    skip_digest = env.plaintext_digest == DIGEST_SENTINEL
    plaintext = _reassemble(values, plain_len, cs, widen=skip_digest)
    if skip_digest:
        warnings.warn("envelope carries the all-zero digest sentinel; integrity not verified")
    elif hashlib.sha256(plaintext).digest() != env.plaintext_digest:
        raise IntegrityError("plaintext digest mismatch")
    return plaintext


def decrypt_multilevel_integers(
    env: CipherEnvelope,
    paillier_priv: PaillierKeyPair,
    blowfish_key: bytes,
) -> tuple[int, ...]:
    """Per-chunk plaintext integers, without byte reassembly or digest
    checks. This is the honest view of a homomorphic-sum envelope."""
    _, cts = unwrap_multilevel(env, blowfish_key)
    return tuple(paillier_decrypt(paillier_priv, c) for c in cts)


def _reassemble(values: Sequence[int], plain_len: int, cs: int, widen: bool) -> bytes:
    out = bytearray()
    for i, m in enumerate(values):
        width = cs if i < len(values) - 1 else plain_len - (len(values) - 1) * cs
        if widen:
            width = max(width, (m.bit_length() + 7) // 8)
        try:
            out += m.to_bytes(width, "big")
        except OverflowError:
            raise IntegrityError("decrypted chunk does not fit its recorded width") from None
    return bytes(out)


def wrap_multilevel(
    plain_len: int,
    cts: Iterable[int],
    chunk_size: int,
    digest: bytes,
    blowfish_key: bytes,
    rng: random.Random | None = None,
) -> CipherEnvelope:
    """Blowfish-CBC wrap an already-encrypted Paillier ciphertext list."""
    rng = rng or random.SystemRandom()
    schedule = blowfish.expand_key(blowfish_key)
    inner = struct.pack(">Q", plain_len) + serialize_ciphertexts(tuple(cts))
    iv = _rand_bytes(rng, 8)
    body = cbc_encrypt(lambda b: blowfish.encrypt_bytes(schedule, b), iv, pkcs7_pad(inner))
    return CipherEnvelope(MULTILEVEL_STACK, iv, b"", chunk_size, digest, body)


def unwrap_multilevel(env: CipherEnvelope, blowfish_key: bytes) -> tuple[int, tuple[int, ...]]:
    """Remove only the Blowfish layer: (plain_len, Paillier ciphertexts)."""
    if env.layer_stack != MULTILEVEL_STACK:
        raise LayerStackError(
            f"expected stack {stack_names(MULTILEVEL_STACK)}, got {stack_names(env.layer_stack)}"
        )
    schedule = blowfish.expand_key(blowfish_key)
    inner = pkcs7_unpad(
        cbc_decrypt(lambda b: blowfish.decrypt_bytes(schedule, b), env.iv, env.body)
    )
    if len(inner) < 8:
        raise CorruptEnvelopeError("multilevel payload too short")
    (plain_len,) = struct.unpack(">Q", inner[:8])
    cts, consumed = parse_ciphertexts(inner[8:])
    if consumed != len(inner) - 8:
        raise CorruptEnvelopeError("trailing bytes after ciphertext blob")
    return plain_len, cts


# --- transmission pipeline: DES-CBC under an RSA-wrapped session key ---

def encrypt_des_rsa(
    plaintext: bytes,
    rsa_pub: RsaPublicKey,
    rng: random.Random | None = None,
) -> CipherEnvelope:
    rng = rng or random.SystemRandom()
    if rsa_pub.n <= 1 << 64:
        raise KeyRangeError("RSA modulus must exceed 2^64 to wrap a DES session key")
    session_key = _rand_bytes(rng, 8)
    schedule = des.des_expand_key(session_key)
    iv = _rand_bytes(rng, 8)
    body = cbc_encrypt(lambda b: des.des_encrypt_block(schedule, b), iv, pkcs7_pad(plaintext))
    wrapped = rsa_encrypt(rsa_pub, int.from_bytes(session_key, "big"))
    wrapped_key = wrapped.to_bytes((rsa_pub.n.bit_length() + 7) // 8, "big")
    if len(wrapped_key) > 0xFFFF:
        raise KeyRangeError("RSA modulus too large for the envelope format")
    digest = hashlib.sha256(plaintext).digest()
    return CipherEnvelope(DES_RSA_STACK, iv, wrapped_key, 0, digest, body)


def decrypt_des_rsa(env: CipherEnvelope, rsa_priv: RsaKeyPair) -> bytes:
    if env.layer_stack != DES_RSA_STACK:
        raise LayerStackError(
            f"expected stack {stack_names(DES_RSA_STACK)}, got {stack_names(env.layer_stack)}"
        )
    c = int.from_bytes(env.wrapped_key, "big")
    if c >= rsa_priv.n:
        raise IntegrityError("wrapped session key is not a ciphertext under this key")
    m = pow(c, rsa_priv.d, rsa_priv.n)
    if m >> 64:
        raise IntegrityError("session key unwrap failed (wrong RSA key or corrupt envelope)")
    schedule = des.des_expand_key(m.to_bytes(8, "big"))
    plaintext = pkcs7_unpad(
        cbc_decrypt(lambda b: des.des_decrypt_block(schedule, b), env.iv, env.body)
    )
    if env.plaintext_digest == DIGEST_SENTINEL:
        warnings.warn("envelope carries the all-zero digest sentinel; integrity not verified")
    elif hashlib.sha256(plaintext).digest() != env.plaintext_digest:
        raise IntegrityError("plaintext digest mismatch")
    return plaintext


def stack_names(stack: tuple[LayerTag, ...]) -> str:
    return "[" + ", ".join(t.name for t in stack) + "]"
