"""Directory-backed envelope store modeling untrusted remote storage.

Layout:

    <root>/index.tsv               # "# cryptvault-index v1" header, then
                                   # name <TAB> stack <TAB> size <TAB> created_at
    <root>/blobs/<sha256(name)>.cvlt
    <root>/.lock                   # advisory lock serializing writers

Blob and index writes go through a temp file plus os.replace, so an
interrupted put leaves the previous state intact. Readers take no
lock. The homomorphic-add operation takes only the transport
(Blowfish) key and the Paillier public key; it multiplies stored
ciphertexts without ever seeing a plaintext, and marks its output
with the all-zero digest sentinel since it cannot know the sum's
digest.
"""

from __future__ import annotations

import hashlib
import os
import random
import time
from dataclasses import dataclass

from filelock import FileLock

from . import envelope as envmod
from .envelope import CipherEnvelope, LayerTag
from .errors import (
    ChunkMismatchError,
    CiphertextRangeError,
    CorruptEnvelopeError,
    IoError,
    NameConflictError,
    NameValidationError,
    NotFoundError,
    StackMismatchError,
)
from .paillier import PaillierPublicKey, paillier_add

INDEX_NAME = "index.tsv"
BLOBS_DIR = "blobs"
LOCK_NAME = ".lock"
_INDEX_HEADER = "# cryptvault-index v1"
_TMP_PREFIX = ".tmp-"

FORMAT_VERSION = 1


@dataclass(frozen=True)
class VaultEntry:
    name: str
    layer_stack: tuple[LayerTag, ...]
    size_bytes: int
    created_at: int


@dataclass
class VaultIndex:
    entries: dict[str, VaultEntry]
    format_version: int = FORMAT_VERSION


def validate_name(name: str) -> None:
    """1..255 UTF-8 bytes, no path separators or control characters."""
    encoded = name.encode("utf-8")
    if not 1 <= len(encoded) <= 255:
        raise NameValidationError(f"name must be 1..255 UTF-8 bytes, got {len(encoded)}")
    if "/" in name or "\\" in name:
        raise NameValidationError(f"name {name!r} contains a path separator")
    if name in (".", ".."):
        raise NameValidationError(f"name {name!r} is a reserved path component")
    if any(ord(ch) < 32 or ord(ch) == 127 for ch in name):
        raise NameValidationError(f"name {name!r} contains control characters")


def _blob_path(root: str, name: str) -> str:
    digest = hashlib.sha256(name.encode("utf-8")).hexdigest()
    return os.path.join(root, BLOBS_DIR, f"{digest}.cvlt")


def _index_path(root: str) -> str:
    return os.path.join(root, INDEX_NAME)


def _lock(root: str) -> FileLock:
    return FileLock(os.path.join(root, LOCK_NAME))


def _ensure_vault(root: str) -> None:
    try:
        os.makedirs(os.path.join(root, BLOBS_DIR), exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create vault at {root}: {exc}") from exc


def load_index(root: str) -> VaultIndex:
    path = _index_path(root)
    if not os.path.exists(path):
        return VaultIndex({})
    try:
        with open(path, encoding="utf-8") as f:
            lines = f.read().splitlines()
    except OSError as exc:
        raise IoError(f"cannot read index: {exc}") from exc
    if not lines or lines[0] != _INDEX_HEADER:
        raise CorruptEnvelopeError(f"{path}: missing index header")
    entries: dict[str, VaultEntry] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != 4:
            raise CorruptEnvelopeError(f"{path}:{lineno}: expected 4 tab-separated fields")
        name, stack_s, size_s, created_s = parts
        try:
            stack = tuple(LayerTag[t] for t in stack_s.split(","))
            entries[name] = VaultEntry(name, stack, int(size_s), int(created_s))
        except (KeyError, ValueError) as exc:
            raise CorruptEnvelopeError(f"{path}:{lineno}: {exc}") from None
    return VaultIndex(entries)


def _save_index(root: str, index: VaultIndex) -> None:
    rows = [_INDEX_HEADER]
    for name in sorted(index.entries):
        e = index.entries[name]
        stack_s = ",".join(t.name for t in e.layer_stack)
        rows.append(f"{e.name}\t{stack_s}\t{e.size_bytes}\t{e.created_at}")
    _atomic_write(root, _index_path(root), ("\n".join(rows) + "\n").encode("utf-8"))


def _atomic_write(root: str, path: str, data: bytes) -> None:
    tmp = os.path.join(
        os.path.dirname(path) or ".",
        f"{_TMP_PREFIX}{os.getpid()}-{random.randrange(1 << 32):08x}",
    )
    try:
        with open(tmp, "wb") as f:
            f.write(data)
            f.flush()
            os.fsync(f.fileno())
        os.replace(tmp, path)
    except OSError as exc:
        raise IoError(f"write to {path} failed: {exc}") from exc


def vault_put(
    root: str, name: str, env: CipherEnvelope, overwrite: bool = False
) -> VaultEntry:
    """Store an envelope under a name; atomic blob write plus index update."""
    validate_name(name)
    _ensure_vault(root)
    data = envmod.serialize(env)
    with _lock(root):
        index = load_index(root)
        if name in index.entries and not overwrite:
            raise NameConflictError(f"entry {name!r} already exists")
        _atomic_write(root, _blob_path(root, name), data)
        entry = VaultEntry(name, env.layer_stack, len(data), int(time.time()))
        index.entries[name] = entry
        _save_index(root, index)
    return entry


def vault_get(root: str, name: str) -> CipherEnvelope:
    index = load_index(root)
    if name not in index.entries:
        raise NotFoundError(f"no entry named {name!r}")
    path = _blob_path(root, name)
    try:
        with open(path, "rb") as f:
            data = f.read()
    except OSError as exc:
        raise CorruptEnvelopeError(f"blob for {name!r} unreadable: {exc}") from exc
    return envmod.parse(data)


def vault_list(root: str) -> list[VaultEntry]:
    """Entries in lexicographic name order."""
    if not os.path.isdir(root):
        raise IoError(f"vault root {root!r} does not exist")
    index = load_index(root)
    return [index.entries[name] for name in sorted(index.entries)]


def vault_fsck(root: str) -> list[str]:
    """Index/blob consistency problems, empty when healthy."""
    problems = []
    index = load_index(root)
    blobs_dir = os.path.join(root, BLOBS_DIR)
    on_disk = {
        f for f in (os.listdir(blobs_dir) if os.path.isdir(blobs_dir) else [])
        if f.endswith(".cvlt") and not f.startswith(_TMP_PREFIX)
    }
    for name, entry in index.entries.items():
        blob = os.path.basename(_blob_path(root, name))
        if blob not in on_disk:
            problems.append(f"index entry {name!r} has no blob file")
        else:
            on_disk.discard(blob)
            size = os.path.getsize(os.path.join(blobs_dir, blob))
            if size != entry.size_bytes:
                problems.append(
                    f"blob for {name!r} is {size} bytes, index says {entry.size_bytes}"
                )
    problems.extend(f"orphan blob file {f!r}" for f in sorted(on_disk))
    return problems


def vault_homomorphic_add(
    root: str,
    name_a: str,
    name_b: str,
    name_out: str,
    blowfish_key: bytes,
    paillier_pub: PaillierPublicKey,
    overwrite: bool = False,
    rng: random.Random | None = None,
) -> VaultEntry:
    """Store, under name_out, the chunkwise Paillier sum of two stored
    multilevel envelopes. Needs the transport key to reach the
    ciphertexts and the public key to multiply them; no plaintext and
    no private key are ever involved."""
    env_a = vault_get(root, name_a)
    env_b = vault_get(root, name_b)
    for name, env in ((name_a, env_a), (name_b, env_b)):
        if env.layer_stack != envmod.MULTILEVEL_STACK:
            raise StackMismatchError(
                f"entry {name!r} has stack {envmod.stack_names(env.layer_stack)}, "
                "homomorphic add needs [BLOWFISH_CBC, PAILLIER]"
            )
    if env_a.chunk_size != env_b.chunk_size:
        raise ChunkMismatchError(
            f"chunk sizes differ: {env_a.chunk_size} vs {env_b.chunk_size}"
        )
    len_a, cts_a = envmod.unwrap_multilevel(env_a, blowfish_key)
    len_b, cts_b = envmod.unwrap_multilevel(env_b, blowfish_key)
    if len(cts_a) != len(cts_b):
        raise ChunkMismatchError(f"chunk counts differ: {len(cts_a)} vs {len(cts_b)}")
    nn = paillier_pub.n * paillier_pub.n
    for c in (*cts_a, *cts_b):
        if c >= nn:
            raise CiphertextRangeError(
                "stored ciphertext exceeds n^2; wrong Paillier modulus?"
            )
    summed = [paillier_add(paillier_pub, a, b) for a, b in zip(cts_a, cts_b)]
    env_out = envmod.wrap_multilevel(
        max(len_a, len_b), summed, env_a.chunk_size,
        envmod.DIGEST_SENTINEL, blowfish_key, rng,
    )
    return vault_put(root, name_out, env_out, overwrite=overwrite)
