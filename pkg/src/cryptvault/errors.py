"""Exception hierarchy shared by every cryptvault module.

Everything derives from CryptVaultError so callers (notably the CLI) can
catch the whole family and map it to a non-zero exit code.
"""


class CryptVaultError(Exception):
    """Base class for all errors raised by this package."""


# --- cipher primitives ---

class KeyLengthError(CryptVaultError):
    """Symmetric key has an unsupported length."""


class BlockLengthError(CryptVaultError):
    """Block or IV input is not the cipher's block size (or a multiple)."""


# --- public-key arithmetic ---

class MessageRangeError(CryptVaultError):
    """Plaintext integer is outside [0, n)."""


class CiphertextRangeError(CryptVaultError):
    """Ciphertext integer is outside its valid range for the key."""


class RandomnessError(CryptVaultError):
    """Supplied randomness is unusable (e.g. not coprime to the modulus)."""


class PrimeGenerationError(CryptVaultError):
    """Prime search exhausted its candidate budget."""


class KeyRangeError(CryptVaultError):
    """Asymmetric key is too small for the requested operation."""


# --- envelope / pipelines ---

class PaddingError(CryptVaultError):
    """PKCS#7 trailer is malformed."""


class IntegrityError(CryptVaultError):
    """Decrypted plaintext does not match the recorded digest."""


class LayerStackError(CryptVaultError):
    """Envelope layer stack does not match the requested pipeline."""


class CorruptEnvelopeError(CryptVaultError):
    """Serialized envelope cannot be parsed."""


# --- vault ---

class NameConflictError(CryptVaultError):
    """An entry with this name already exists."""


class NameValidationError(CryptVaultError):
    """Entry name violates the naming rules."""


class NotFoundError(CryptVaultError):
    """No entry with this name."""


class IoError(CryptVaultError):
    """Filesystem operation failed."""


class StackMismatchError(CryptVaultError):
    """Stored envelope has the wrong layer stack for this operation."""


class ChunkMismatchError(CryptVaultError):
    """Operands disagree in chunk count or chunk size."""


# --- testkit ---

class ZeroModulusError(CryptVaultError):
    """Modulus must be positive."""


class ParseError(CryptVaultError):
    """Vector file is malformed; message names the offending line."""
