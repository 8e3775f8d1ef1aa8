"""AES-256-GCM container for log files (``.slog.enc``).

Layout: 12-byte nonce || ciphertext || 16-byte tag. Nonces must never be
reused with the same key; callers pass a counter or :func:`random_nonce`.
"""

from __future__ import annotations

import os

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives.ciphers.aead import AESGCM

KEY_BYTES = 32
NONCE_BYTES = 12
TAG_BYTES = 16


class BadKeyLength(ValueError):
    pass


class AuthenticationFailure(ValueError):
    pass


def _check_key(key: bytes) -> None:
    if len(key) != KEY_BYTES:
        raise BadKeyLength(f"key must be {KEY_BYTES} bytes, got {len(key)}")


def random_nonce() -> bytes:
    return os.urandom(NONCE_BYTES)


def encrypt_log(plain: bytes, key: bytes, nonce: bytes) -> bytes:
    _check_key(key)
    if len(nonce) != NONCE_BYTES:
        raise ValueError(f"nonce must be {NONCE_BYTES} bytes, got {len(nonce)}")
    return bytes(nonce) + AESGCM(bytes(key)).encrypt(bytes(nonce), bytes(plain), None)


def decrypt_log(cipher: bytes, key: bytes) -> bytes:
    _check_key(key)
    if len(cipher) < NONCE_BYTES + TAG_BYTES:
        raise AuthenticationFailure("container shorter than nonce + tag")
    nonce, body = bytes(cipher[:NONCE_BYTES]), bytes(cipher[NONCE_BYTES:])
    try:
        return AESGCM(bytes(key)).decrypt(nonce, body, None)
    except InvalidTag:
        raise AuthenticationFailure("authentication tag mismatch") from None


def read_key_file(path) -> bytes:
    """Load a key stored as 64 hex characters (whitespace ignored) or 32 raw bytes."""
    raw = open(path, "rb").read()
    stripped = raw.strip()
    if len(stripped) == 2 * KEY_BYTES:
        try:
            return bytes.fromhex(stripped.decode("ascii"))
        except ValueError:
            pass
    _check_key(raw)
    return raw
