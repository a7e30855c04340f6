"""cryptvault: layered encryption pipelines over a local blob vault.

A from-scratch Blowfish and DES, textbook RSA (multiplicatively
homomorphic) and Paillier (additively homomorphic), two layered
pipelines combining them, and a directory-backed vault that can add
Paillier ciphertexts server-side without decrypting anything.

Educational artifact: none of this is hardened production
cryptography.
"""

from .errors import CryptVaultError

__all__ = ["CryptVaultError"]
__version__ = "0.1.0"
