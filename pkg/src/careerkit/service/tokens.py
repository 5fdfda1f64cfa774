"""Session tokens: compact JSON Web Tokens (RFC 7519), HS256.

24-hour expiry; logout and refresh blacklist the token id (jti) until its
natural expiry so revoked tokens stay dead across restarts.
"""

from __future__ import annotations

import base64
import hashlib
import hmac
import json
import threading
import uuid

from ..errors import CareerKitError

TOKEN_TTL_S = 24 * 3600


class TokenError(CareerKitError):
    """Verification failed: malformed, bad signature, expired or revoked."""


def _b64url_encode(data: bytes) -> str:
    return base64.urlsafe_b64encode(data).rstrip(b"=").decode("ascii")


def _b64url_decode(text: str) -> bytes:
    padding = "=" * (-len(text) % 4)
    return base64.urlsafe_b64decode(text + padding)


def issue_token(subject: str, secret: str, now: float, ttl: int = TOKEN_TTL_S) -> tuple[str, dict]:
    """Sign a token for subject; returns (token, claims)."""
    claims = {
        "sub": subject,
        "iat": int(now),
        "exp": int(now) + ttl,
        "jti": uuid.uuid4().hex,
    }
    header = {"alg": "HS256", "typ": "JWT"}
    signing_input = (
        _b64url_encode(json.dumps(header, separators=(",", ":")).encode())
        + "."
        + _b64url_encode(json.dumps(claims, separators=(",", ":")).encode())
    )
    signature = hmac.new(secret.encode(), signing_input.encode(), hashlib.sha256).digest()
    return signing_input + "." + _b64url_encode(signature), claims


def verify_token(token: str, secret: str, now: float) -> dict:
    """Validate structure, signature and expiry; returns the claims."""
    parts = token.split(".")
    if len(parts) != 3:
        raise TokenError("malformed token")
    signing_input = parts[0] + "." + parts[1]
    expected = hmac.new(secret.encode(), signing_input.encode(), hashlib.sha256).digest()
    try:
        provided = _b64url_decode(parts[2])
        header = json.loads(_b64url_decode(parts[0]))
        claims = json.loads(_b64url_decode(parts[1]))
    except (ValueError, json.JSONDecodeError) as exc:
        raise TokenError("undecodable token") from exc
    if header.get("alg") != "HS256":
        raise TokenError("unsupported algorithm")
    if not hmac.compare_digest(expected, provided):
        raise TokenError("signature mismatch")
    if now >= claims.get("exp", 0):
        raise TokenError("token expired")
    if "sub" not in claims or "jti" not in claims:
        raise TokenError("missing claims")
    return claims


class TokenBlacklist:
    """Revoked token ids, persisted, pruned at their natural expiry."""

    NS = "token_blacklist"

    def __init__(self, store):
        self._store = store
        self._lock = threading.Lock()

    def revoke(self, jti: str, expires_at: int) -> None:
        with self._lock:
            self._store.put(self.NS, jti, expires_at)

    def is_revoked(self, jti: str) -> bool:
        return self._store.get(self.NS, jti) is not None

    def prune(self, now: float) -> int:
        with self._lock:
            stale = [
                jti for jti, exp in self._store.items(self.NS) if exp <= now
            ]
            for jti in stale:
                self._store.delete(self.NS, jti)
            return len(stale)
