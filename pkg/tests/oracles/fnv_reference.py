#!/usr/bin/env python3
"""Standalone FNV-1a token-hash oracle.

Independent of the package under test: tokenizes with a manual character
scan and hashes with a reduce-based FNV-1a 64. The test suite uses this
to cross-check which embedding buckets a text is allowed to touch and
with which signs. Self-checks against published FNV-1a test vectors.

Usage: python fnv_reference.py <dim> <text...>
"""

import sys
from functools import reduce

FNV64_OFFSET = 0xCBF29CE484222325
FNV64_PRIME = 0x100000001B3
MASK64 = (1 << 64) - 1


def fnv1a64(data: bytes) -> int:
    return reduce(lambda h, b: ((h ^ b) * FNV64_PRIME) & MASK64, data, FNV64_OFFSET)


def scan_tokens(text: str) -> list:
    """Maximal alphanumeric runs of the lowercased text, in order."""
    out = []
    cur = []
    for ch in text.lower():
        if ch.isalnum():
            cur.append(ch)
        elif cur:
            out.append("".join(cur))
            cur = []
    if cur:
        out.append("".join(cur))
    return out


def token_buckets(text: str, dim: int) -> list:
    """(token, bucket, sign) per token occurrence; sign from bit 32 of the hash."""
    result = []
    for tok in scan_tokens(text):
        h = fnv1a64(tok.encode("utf-8"))
        bucket = h % dim
        sign = 1 if (h >> 32) & 1 == 0 else -1
        result.append((tok, bucket, sign))
    return result


def bucket_weights(text: str, dim: int) -> dict:
    """Accumulated signed counts per bucket; zero-sum buckets removed."""
    acc = {}
    for _, bucket, sign in token_buckets(text, dim):
        acc[bucket] = acc.get(bucket, 0) + sign
    return {b: w for b, w in acc.items() if w != 0}


# Published FNV-1a 64 vectors (empty string, "a", "foobar").
_VECTORS = {
    b"": 0xCBF29CE484222325,
    b"a": 0xAF63DC4C8601EC8C,
    b"foobar": 0x85944171F73967E8,
}


def self_check() -> None:
    for data, expected in _VECTORS.items():
        got = fnv1a64(data)
        if got != expected:
            raise AssertionError(f"fnv1a64({data!r}) = {got:#x}, expected {expected:#x}")


if __name__ == "__main__":
    self_check()
    if len(sys.argv) < 3:
        print(__doc__)
        sys.exit(1)
    dim_arg = int(sys.argv[1])
    text_arg = " ".join(sys.argv[2:])
    for tok, bucket, sign in token_buckets(text_arg, dim_arg):
        print(f"{tok}\t{bucket}\t{sign:+d}")
