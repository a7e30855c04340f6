import dataclasses
import random

import pytest
from hypothesis import given, settings, strategies as st

from cryptvault import blowfish, envelope
from cryptvault.envelope import (
    CipherEnvelope,
    DIGEST_SENTINEL,
    LayerTag,
    cbc_decrypt,
    cbc_encrypt,
    decrypt_des_rsa,
    decrypt_multilevel,
    decrypt_multilevel_integers,
    encrypt_des_rsa,
    encrypt_multilevel,
    parse,
    pkcs7_pad,
    pkcs7_unpad,
    serialize,
    unwrap_multilevel,
    wrap_multilevel,
)
from cryptvault.errors import (
    BlockLengthError,
    CorruptEnvelopeError,
    CryptVaultError,
    IntegrityError,
    KeyRangeError,
    LayerStackError,
    PaddingError,
)
from cryptvault.paillier import paillier_add
from cryptvault.rsa import RsaPublicKey

BF_KEY = bytes(range(16))


# --- pkcs7 ---

def test_pad_empty_input():
    assert pkcs7_pad(b"") == b"\x08" * 8


def test_pad_seven_bytes():
    out = pkcs7_pad(b"1234567")
    assert len(out) == 8 and out[-1] == 1


def test_unpad_rejects_bad_trailer():
    with pytest.raises(PaddingError):
        pkcs7_unpad(b"\x00" * 7 + b"\x09")
    with pytest.raises(PaddingError):
        pkcs7_unpad(b"\x00" * 7 + b"\x00")
    with pytest.raises(PaddingError):
        pkcs7_unpad(b"\x01\x02\x02\x02\x02\x02\x02\x03")
    with pytest.raises(PaddingError):
        pkcs7_unpad(b"")
    with pytest.raises(PaddingError):
        pkcs7_unpad(b"\x01" * 7)


@given(st.binary(max_size=200))
@settings(max_examples=200)
def test_pad_unpad_round_trip(data):
    padded = pkcs7_pad(data)
    assert len(padded) % 8 == 0 and len(padded) > len(data)
    assert pkcs7_unpad(padded) == data


# --- cbc ---

_SCHED = blowfish.expand_key(BF_KEY)


def _enc(b):
    return blowfish.encrypt_bytes(_SCHED, b)


def _dec(b):
    return blowfish.decrypt_bytes(_SCHED, b)


def test_cbc_first_block_is_ecb_of_xor():
    iv = bytes(range(8))
    block = b"ABCDEFGH"
    xored = bytes(a ^ b for a, b in zip(block, iv))
    assert cbc_encrypt(_enc, iv, block) == _enc(xored)


@given(st.binary(max_size=256).map(lambda b: b[: len(b) // 8 * 8]), st.binary(min_size=8, max_size=8))
@settings(max_examples=100)
def test_cbc_round_trip(data, iv):
    assert cbc_decrypt(_dec, iv, cbc_encrypt(_enc, iv, data)) == data


def test_cbc_iv_sensitivity():
    data = bytes(32)
    a = cbc_encrypt(_enc, bytes(8), data)
    b = cbc_encrypt(_enc, b"\x01" + bytes(7), data)
    assert a != b


def test_cbc_length_validation():
    with pytest.raises(BlockLengthError):
        cbc_encrypt(_enc, bytes(7), bytes(8))
    with pytest.raises(BlockLengthError):
        cbc_encrypt(_enc, bytes(8), bytes(9))
    with pytest.raises(BlockLengthError):
        cbc_decrypt(_dec, bytes(8), bytes(12))


# --- envelope serialization ---

@st.composite
def envelopes(draw):
    stack = tuple(draw(st.lists(st.sampled_from(list(LayerTag)), min_size=1, max_size=4)))
    if stack[0] in (LayerTag.BLOWFISH_CBC, LayerTag.DES_CBC):
        body = draw(st.binary(max_size=256).map(lambda b: b[: len(b) // 8 * 8]))
    else:
        body = draw(st.binary(max_size=256))
    has_cbc = any(t in (LayerTag.BLOWFISH_CBC, LayerTag.DES_CBC) for t in stack)
    iv = draw(st.binary(min_size=8, max_size=8)) if has_cbc else b""
    if LayerTag.RSA_KEYWRAP in stack:
        wrapped = draw(st.binary(min_size=1, max_size=80))
    else:
        wrapped = b""
    chunk_size = draw(st.integers(1, 0xFFFF)) if LayerTag.PAILLIER in stack else 0
    digest = draw(st.binary(min_size=32, max_size=32))
    return CipherEnvelope(stack, iv, wrapped, chunk_size, digest, body)


def test_envelope_field_consistency_enforced():
    digest = bytes(32)
    with pytest.raises(ValueError):
        CipherEnvelope((), b"", b"", 0, digest, b"")
    with pytest.raises(ValueError):  # CBC layer without an IV
        CipherEnvelope((LayerTag.BLOWFISH_CBC, LayerTag.PAILLIER), b"", b"", 1, digest, b"")
    with pytest.raises(ValueError):  # IV without a CBC layer
        CipherEnvelope((LayerTag.PAILLIER,), bytes(8), b"", 1, digest, b"")
    with pytest.raises(ValueError):  # keywrap without a wrapped key
        CipherEnvelope((LayerTag.RSA_KEYWRAP, LayerTag.DES_CBC), bytes(8), b"", 0, digest, b"")
    with pytest.raises(ValueError):  # Paillier without a chunk size
        CipherEnvelope((LayerTag.BLOWFISH_CBC, LayerTag.PAILLIER), bytes(8), b"", 0, digest, b"")
    with pytest.raises(ValueError):  # CBC body not a multiple of 8
        CipherEnvelope((LayerTag.DES_CBC,), bytes(8), b"", 0, digest, b"xyz")


@given(envelopes())
@settings(max_examples=200)
def test_serialize_parse_bijection(env):
    data = serialize(env)
    assert parse(data) == env
    assert serialize(env) == data  # byte-deterministic


def test_parse_rejects_corrupt_headers():
    env = CipherEnvelope((LayerTag.PAILLIER,), b"", b"", 1, bytes(32), b"x")
    good = serialize(env)
    with pytest.raises(CorruptEnvelopeError):
        parse(b"XVLT" + good[4:])
    with pytest.raises(CorruptEnvelopeError):
        parse(good[:4] + b"\x02" + good[5:])  # bad version
    with pytest.raises(CorruptEnvelopeError):
        parse(good[:-1])  # truncated
    with pytest.raises(CorruptEnvelopeError):
        parse(good + b"\x00")  # trailing junk
    bad_tag = good[:6] + b"\x7f" + good[7:]
    with pytest.raises(CorruptEnvelopeError):
        parse(bad_tag)
    with pytest.raises(CorruptEnvelopeError):
        parse(b"")


# --- multilevel pipeline ---

def test_multilevel_round_trip_sizes(paillier_256, rng):
    pub = paillier_256.public_key
    for size in (0, 1, 7, 30, 31, 100, 4096):
        data = bytes(rng.randrange(256) for _ in range(size))
        env = encrypt_multilevel(data, pub, BF_KEY, rng)
        assert env.layer_stack == (LayerTag.BLOWFISH_CBC, LayerTag.PAILLIER)
        assert decrypt_multilevel(env, paillier_256, BF_KEY) == data


def test_multilevel_empty_plaintext(paillier_256, rng):
    env = encrypt_multilevel(b"", paillier_256.public_key, BF_KEY, rng)
    plain_len, cts = unwrap_multilevel(env, BF_KEY)
    assert plain_len == 0 and cts == ()
    assert decrypt_multilevel(env, paillier_256, BF_KEY) == b""


def test_multilevel_preserves_zero_heavy_tails(paillier_256, rng):
    # last chunk starting with zero bytes must survive the round trip
    pub = paillier_256.public_key
    for data in (b"\x00", bytes(64), b"\xff" + bytes(40), bytes(29) + b"\x01"):
        env = encrypt_multilevel(data, pub, BF_KEY, rng)
        assert decrypt_multilevel(env, paillier_256, BF_KEY) == data


def test_multilevel_chunk_size_recorded(paillier_256, rng):
    env = encrypt_multilevel(b"abc", paillier_256.public_key, BF_KEY, rng)
    assert env.chunk_size == envelope.paillier_chunk_size(paillier_256.n) == 30


def test_multilevel_rejects_tiny_modulus(rng):
    from cryptvault.paillier import PaillierPublicKey

    with pytest.raises(KeyRangeError):
        encrypt_multilevel(b"x", PaillierPublicKey(15, 16), BF_KEY, rng)


def test_multilevel_tamper_detection(paillier_256, rng):
    data = bytes(rng.randrange(256) for _ in range(200))
    env = encrypt_multilevel(data, paillier_256.public_key, BF_KEY, rng)
    for pos in (0, 1, len(env.body) // 2, len(env.body) - 1):
        body = bytearray(env.body)
        body[pos] ^= 0x40
        bad = dataclasses.replace(env, body=bytes(body))
        with pytest.raises(CryptVaultError):
            decrypt_multilevel(bad, paillier_256, BF_KEY)


def test_multilevel_digest_tamper_is_integrity_error(paillier_256, rng):
    env = encrypt_multilevel(b"payload", paillier_256.public_key, BF_KEY, rng)
    digest = bytearray(env.plaintext_digest)
    digest[0] ^= 1
    bad = dataclasses.replace(env, plaintext_digest=bytes(digest))
    with pytest.raises(IntegrityError):
        decrypt_multilevel(bad, paillier_256, BF_KEY)


def test_multilevel_wrong_blowfish_key_errors(paillier_256, rng):
    env = encrypt_multilevel(b"payload", paillier_256.public_key, BF_KEY, rng)
    with pytest.raises(CryptVaultError):
        decrypt_multilevel(env, paillier_256, b"wrong-key-wrong")


def test_multilevel_wrong_stack(paillier_256, rsa_512, rng):
    env = encrypt_des_rsa(b"data", rsa_512.public_key, rng)
    with pytest.raises(LayerStackError):
        decrypt_multilevel(env, paillier_256, BF_KEY)


def test_stripping_blowfish_layer_supports_paillier_add(paillier_256, rng):
    # remove only the transport layer, add ciphertexts chunkwise,
    # re-wrap; decryption must equal the chunkwise modular sum
    # computed directly on integers
    pub = paillier_256.public_key
    a = bytes(rng.randrange(256) for _ in range(75))
    b = bytes(rng.randrange(256) for _ in range(75))
    env_a = encrypt_multilevel(a, pub, BF_KEY, rng)
    env_b = encrypt_multilevel(b, pub, BF_KEY, rng)
    len_a, cts_a = unwrap_multilevel(env_a, BF_KEY)
    len_b, cts_b = unwrap_multilevel(env_b, BF_KEY)
    summed = [paillier_add(pub, x, y) for x, y in zip(cts_a, cts_b)]
    env_sum = wrap_multilevel(
        max(len_a, len_b), summed, env_a.chunk_size, DIGEST_SENTINEL, BF_KEY, rng
    )
    got = decrypt_multilevel_integers(env_sum, paillier_256, BF_KEY)
    cs = env_a.chunk_size
    expected = tuple(
        (int.from_bytes(a[i: i + cs], "big") + int.from_bytes(b[i: i + cs], "big")) % pub.n
        for i in range(0, len(a), cs)
    )
    assert got == expected


def test_sentinel_digest_warns_not_raises(paillier_256, rng):
    env = encrypt_multilevel(b"\x05", paillier_256.public_key, BF_KEY, rng)
    plain_len, cts = unwrap_multilevel(env, BF_KEY)
    resealed = wrap_multilevel(plain_len, cts, env.chunk_size, DIGEST_SENTINEL, BF_KEY, rng)
    with pytest.warns(UserWarning, match="integrity not verified"):
        assert decrypt_multilevel(resealed, paillier_256, BF_KEY) == b"\x05"


# --- des-rsa pipeline ---

def test_des_rsa_round_trip(rsa_512, rng):
    for size in (0, 1, 8, 1000, 100 * 1024):
        data = rng.getrandbits(8 * size).to_bytes(size, "big") if size else b""
        env = encrypt_des_rsa(data, rsa_512.public_key, rng)
        assert env.layer_stack == (LayerTag.RSA_KEYWRAP, LayerTag.DES_CBC)
        assert decrypt_des_rsa(env, rsa_512) == data


def test_des_rsa_randomized(rsa_512, rng):
    data = b"same plaintext"
    a = encrypt_des_rsa(data, rsa_512.public_key, rng)
    b = encrypt_des_rsa(data, rsa_512.public_key, rng)
    assert a.body != b.body and a.wrapped_key != b.wrapped_key


def test_des_rsa_small_modulus_rejected(rng):
    with pytest.raises(KeyRangeError):
        encrypt_des_rsa(b"x", RsaPublicKey(0xFFFF, 3), rng)
    with pytest.raises(KeyRangeError):
        encrypt_des_rsa(b"x", RsaPublicKey(1 << 64, 3), rng)


def test_des_rsa_wrong_private_key(rsa_512, rng):
    import cryptvault.rsa as rsa_mod

    other = rsa_mod.rsa_generate(512, random.Random(55))
    env = encrypt_des_rsa(b"secret", rsa_512.public_key, rng)
    with pytest.raises(CryptVaultError):
        decrypt_des_rsa(env, other)


def test_des_rsa_stack_discrimination(paillier_256, rsa_512, rng):
    env = encrypt_multilevel(b"data", paillier_256.public_key, BF_KEY, rng)
    with pytest.raises(LayerStackError):
        decrypt_des_rsa(env, rsa_512)


def test_des_rsa_tamper_detection(rsa_512, rng):
    data = bytes(rng.randrange(256) for _ in range(100))
    env = encrypt_des_rsa(data, rsa_512.public_key, rng)
    body = bytearray(env.body)
    body[0] ^= 0x01
    with pytest.raises(CryptVaultError):
        decrypt_des_rsa(dataclasses.replace(env, body=bytes(body)), rsa_512)
    wrapped = bytearray(env.wrapped_key)
    wrapped[-1] ^= 0x01
    with pytest.raises(CryptVaultError):
        decrypt_des_rsa(dataclasses.replace(env, wrapped_key=bytes(wrapped)), rsa_512)


def test_no_plaintext_leaks_into_serialized_envelope(paillier_256, rsa_512, rng):
    data = bytes(rng.randrange(256) for _ in range(64))
    for env in (
        encrypt_multilevel(data, paillier_256.public_key, BF_KEY, rng),
        encrypt_des_rsa(data, rsa_512.public_key, rng),
    ):
        blob = serialize(env)
        for i in range(len(data) - 16):
            assert data[i: i + 16] not in blob
