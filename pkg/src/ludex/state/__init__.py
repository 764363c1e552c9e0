'''Compact game state: chunked bit vectors, containers, hashing.'''

from .chunkset import BitSet, ChunkSet, chunk_bits_for
from .zobrist import ZobristTable, splitmix64
from .containers import ContainerFlatState, GameState, PuzzleState

__all__ = ['BitSet', 'ChunkSet', 'chunk_bits_for', 'ZobristTable',
           'splitmix64', 'ContainerFlatState', 'GameState', 'PuzzleState']
