'''
Packed fixed-width value vectors.

Each chunk is a power-of-two number of bits so no chunk ever straddles a
64-bit word: chunk i lives in word i // per_word at bit offset
(i % per_word) * bits.
'''

from __future__ import annotations

_M64 = (1 << 64) - 1
_ALLOWED = (1, 2, 4, 8, 16, 32)


def chunk_bits_for(num_values: int) -> int:
    """Smallest power-of-two chunk width that can hold num_values values."""
    if num_values < 1:
        raise ValueError(f'need at least one value, got {num_values}')
    needed = max(1, (max(num_values, 2) - 1).bit_length())
    bits = 1
    while bits < needed:
        bits *= 2
    return bits


class ChunkSet:
    __slots__ = ('bits', 'num_chunks', 'words', '_per_word', '_mask')

    def __init__(self, bits: int, num_chunks: int):
        if bits not in _ALLOWED:
            raise ValueError(f'chunk width {bits} is not a power of two <= 32')
        self.bits = bits
        self.num_chunks = num_chunks
        self._per_word = 64 // bits
        self._mask = (1 << bits) - 1
        self.words = [0] * ((num_chunks + self._per_word - 1) // self._per_word
                            if num_chunks else 0)

    def get(self, i: int) -> int:
        if not (0 <= i < self.num_chunks):
            raise IndexError(f'chunk {i} out of range')
        w, r = divmod(i, self._per_word)
        return (self.words[w] >> (r * self.bits)) & self._mask

    def set(self, i: int, v: int) -> None:
        if not (0 <= i < self.num_chunks):
            raise IndexError(f'chunk {i} out of range')
        if not (0 <= v <= self._mask):
            raise ValueError(f'value {v} does not fit in {self.bits} bits')
        w, r = divmod(i, self._per_word)
        off = r * self.bits
        self.words[w] = (self.words[w] & ~(self._mask << off) | (v << off)) & _M64

    def clear(self) -> None:
        self.words = [0] * len(self.words)

    def copy(self) -> 'ChunkSet':
        c = ChunkSet.__new__(ChunkSet)
        c.bits = self.bits
        c.num_chunks = self.num_chunks
        c._per_word = self._per_word
        c._mask = self._mask
        c.words = list(self.words)
        return c

    def __eq__(self, other):
        return (isinstance(other, ChunkSet) and self.bits == other.bits
                and self.num_chunks == other.num_chunks
                and self.words == other.words)

    def __hash__(self):
        return hash((self.bits, self.num_chunks, tuple(self.words)))

    def __repr__(self):
        vals = [self.get(i) for i in range(min(self.num_chunks, 32))]
        tail = '...' if self.num_chunks > 32 else ''
        return f'ChunkSet({self.bits}b, {vals}{tail})'


class BitSet:
    """One bit per site, backed by a single big int."""

    __slots__ = ('n', '_v')

    def __init__(self, n: int):
        self.n = n
        self._v = 0

    def get(self, i: int) -> bool:
        return bool((self._v >> i) & 1)

    def set(self, i: int, on: bool = True) -> None:
        if not (0 <= i < self.n):
            raise IndexError(f'bit {i} out of range')
        if on:
            self._v |= 1 << i
        else:
            self._v &= ~(1 << i)

    def clear(self) -> None:
        self._v = 0

    def fill(self) -> None:
        self._v = (1 << self.n) - 1

    def count(self) -> int:
        return self._v.bit_count()

    def __iter__(self):
        v = self._v
        while v:
            low = v & -v
            yield low.bit_length() - 1
            v ^= low

    def copy(self) -> 'BitSet':
        b = BitSet(self.n)
        b._v = self._v
        return b

    def __eq__(self, other):
        return isinstance(other, BitSet) and self.n == other.n and self._v == other._v

    def __hash__(self):
        return hash((self.n, self._v))

    def __repr__(self):
        return f'BitSet({sorted(self)})'
