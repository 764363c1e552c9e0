'''
Reproducible 64-bit hashing for repetition detection and replay checks.

Keys come from chained splitmix64 so they are identical across platforms and
independent of allocation order: the key for (kind, site, value) depends only
on those three and the table seed.
'''

from __future__ import annotations

_M64 = (1 << 64) - 1

# Vector kinds that participate in the repetition hash, plus the mover.
KINDS = ('what', 'who', 'state', 'count', 'mover', 'pending')
_KIND_ID = {k: i + 1 for i, k in enumerate(KINDS)}


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _M64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return z ^ (z >> 31)


class ZobristTable:
    """Immutable; safe to share. Keys are memoised on first use."""

    def __init__(self, seed: int = 0x5DEECE66D):
        self.seed = seed & _M64
        self._cache: dict = {}

    def key(self, kind: str, site: int, value: int) -> int:
        t = (kind, site, value)
        k = self._cache.get(t)
        if k is None:
            h = splitmix64(self.seed ^ _KIND_ID[kind])
            h = splitmix64(h ^ ((site + 1) & _M64))
            k = splitmix64(h ^ ((value + 1) & _M64))
            self._cache[t] = k
        return k

    def mover_key(self, mover: int) -> int:
        return self.key('mover', 0, mover)
