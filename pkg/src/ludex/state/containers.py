'''
Mutable state owned by a single trial: per-container site vectors, puzzle
variable domains, and the whole-game scalar block.

Each container keeps a running hash over its what/who/state/count vectors;
the full repetition hash is the XOR of the containers' hashes with the mover
key, so incremental maintenance and a from-scratch walk must agree.
'''

from __future__ import annotations

from .chunkset import BitSet, ChunkSet, chunk_bits_for
from .zobrist import ZobristTable

MAX_COUNT = 256   # declared per-game ceiling for pieces on one site


class ContainerFlatState:
    """what/who/count/state/rotation/value vectors over one container's sites.

    offset is the container's first global site index; hashing uses global
    indices so containers can be XORed together safely.
    """

    HASHED = ('what', 'who', 'state', 'count')

    def __init__(self, num_sites: int, num_components: int, num_players: int,
                 zobrist: ZobristTable, offset: int = 0,
                 with_count: bool = False, with_state: bool = False,
                 with_rotation: bool = False, with_value: bool = False,
                 max_state: int = 16, max_value: int = 16):
        self.num_sites = num_sites
        self.offset = offset
        self.zobrist = zobrist
        self.what = ChunkSet(chunk_bits_for(num_components + 1), num_sites)
        self.who = ChunkSet(chunk_bits_for(num_players + 1), num_sites)
        self.count = ChunkSet(chunk_bits_for(MAX_COUNT), num_sites) if with_count else None
        self.state = ChunkSet(chunk_bits_for(max_state), num_sites) if with_state else None
        self.rotation = ChunkSet(chunk_bits_for(16), num_sites) if with_rotation else None
        self.value = ChunkSet(chunk_bits_for(max_value), num_sites) if with_value else None
        self.empty = BitSet(num_sites)
        self.empty.fill()
        self.hash = 0

    # -- raw reads -----------------------------------------------------------

    def get_what(self, s): return self.what.get(s)
    def get_who(self, s): return self.who.get(s)

    def get_count(self, s):
        if self.count is not None:
            return self.count.get(s)
        return 1 if self.what.get(s) else 0

    def get_state(self, s):
        return self.state.get(s) if self.state is not None else 0

    def get_rotation(self, s):
        return self.rotation.get(s) if self.rotation is not None else 0

    def get_value(self, s):
        return self.value.get(s) if self.value is not None else 0

    def is_empty(self, s): return self.empty.get(s)

    # -- hashed writes --------------------------------------------------------

    def _hset(self, cs: ChunkSet, kind: str, s: int, v: int) -> None:
        old = cs.get(s)
        if old == v:
            return
        g = self.offset + s
        if old:
            self.hash ^= self.zobrist.key(kind, g, old)
        if v:
            self.hash ^= self.zobrist.key(kind, g, v)
        cs.set(s, v)

    def set_what(self, s: int, v: int) -> None:
        self._hset(self.what, 'what', s, v)
        self.empty.set(s, v == 0)

    def set_who(self, s: int, v: int) -> None:
        self._hset(self.who, 'who', s, v)

    def set_count(self, s: int, v: int) -> None:
        if self.count is not None:
            self._hset(self.count, 'count', s, min(v, MAX_COUNT - 1))

    def set_state(self, s: int, v: int) -> None:
        if self.state is not None:
            self._hset(self.state, 'state', s, v)

    def set_rotation(self, s: int, v: int) -> None:
        if self.rotation is not None:
            self.rotation.set(s, v)

    def set_value(self, s: int, v: int) -> None:
        if self.value is not None:
            self.value.set(s, v)

    def clear_site(self, s: int) -> None:
        self.set_what(s, 0)
        self.set_who(s, 0)
        if self.count is not None:
            self.set_count(s, 0)
        if self.state is not None:
            self.set_state(s, 0)
        if self.rotation is not None:
            self.rotation.set(s, 0)
        if self.value is not None:
            self.value.set(s, 0)

    # -- verification ----------------------------------------------------------

    def hash_from_scratch(self) -> int:
        h = 0
        for kind in self.HASHED:
            cs = getattr(self, kind)
            if cs is None:
                continue
            for s in range(self.num_sites):
                v = cs.get(s)
                if v:
                    h ^= self.zobrist.key(kind, self.offset + s, v)
        return h

    def coherent(self) -> bool:
        for s in range(self.num_sites):
            w = self.what.get(s)
            if self.empty.get(s) != (w == 0):
                return False
            if w == 0 and self.who.get(s) != 0:
                return False
            if w != 0 and self.count is not None and self.count.get(s) < 1:
                return False
        return True

    def copy(self) -> 'ContainerFlatState':
        c = ContainerFlatState.__new__(ContainerFlatState)
        c.num_sites = self.num_sites
        c.offset = self.offset
        c.zobrist = self.zobrist
        for name in ('what', 'who', 'count', 'state', 'rotation', 'value'):
            cs = getattr(self, name)
            setattr(c, name, cs.copy() if cs is not None else None)
        c.empty = self.empty.copy()
        c.hash = self.hash
        return c


class PuzzleState:
    """Per-variable candidate domains for deduction puzzles."""

    def __init__(self, num_vars: int, lo: int, hi: int):
        if hi < lo:
            raise ValueError(f'bad domain range {lo}..{hi}')
        self.num_vars = num_vars
        self.lo = lo
        self.hi = hi
        self.size = hi - lo + 1
        self._full = (1 << self.size) - 1
        self.domains = [self._full] * num_vars

    def _off(self, val: int) -> int:
        if not (self.lo <= val <= self.hi):
            raise ValueError(f'value {val} outside domain {self.lo}..{self.hi}')
        return val - self.lo

    def bit(self, v: int, val: int) -> bool:
        return bool((self.domains[v] >> self._off(val)) & 1)

    def set(self, v: int, val: int) -> None:
        self.domains[v] = 1 << self._off(val)

    def toggle(self, v: int, val: int) -> None:
        self.domains[v] ^= 1 << self._off(val)

    def reset(self, v: int) -> None:
        self.domains[v] = self._full

    def is_resolved(self, v: int) -> bool:
        d = self.domains[v]
        return d != 0 and (d & (d - 1)) == 0

    def what(self, v: int) -> int:
        """The resolved value, or 0 when the variable is not set."""
        if not self.is_resolved(v):
            return 0
        return self.lo + self.domains[v].bit_length() - 1

    def copy(self) -> 'PuzzleState':
        p = PuzzleState.__new__(PuzzleState)
        p.num_vars = self.num_vars
        p.lo, p.hi, p.size, p._full = self.lo, self.hi, self.size, self._full
        p.domains = list(self.domains)
        return p


class GameState:
    """Scalar state shared across containers."""

    def __init__(self, num_players: int):
        n = num_players
        self.num_players = n
        self.mover = 1
        self.prev = 1
        self.next = 2 if n >= 2 else 1
        self.counter = 0            # total moves applied
        self.num_turn = 0           # completed turn changes
        self.num_turn_same_player = 0
        self.pending = set()
        self.visited = set()
        self.passed_in_row = 0
        self.scores = [0] * (n + 1)
        self.amounts = [0] * (n + 1)
        self.values_player = [0] * (n + 1)
        self.teams = list(range(n + 1))
        self.value_map = {}
        self.current_dice = []
        self.dice_all_equal = False
        self.remembering = []
        self.stored_hash = None
        self.prior_stamp = -1       # move index whose do-prior already ran
        self.phases = [0] * (n + 1)
        self.stalemated = [False] * (n + 1)
        self.triggered = [0] * (n + 1)   # 0 = none, else the triggering player

    def copy(self) -> 'GameState':
        g = GameState.__new__(GameState)
        g.num_players = self.num_players
        g.mover, g.prev, g.next = self.mover, self.prev, self.next
        g.counter = self.counter
        g.num_turn = self.num_turn
        g.num_turn_same_player = self.num_turn_same_player
        g.pending = set(self.pending)
        g.visited = set(self.visited)
        g.passed_in_row = self.passed_in_row
        g.scores = list(self.scores)
        g.amounts = list(self.amounts)
        g.values_player = list(self.values_player)
        g.teams = list(self.teams)
        g.value_map = dict(self.value_map)
        g.current_dice = list(self.current_dice)
        g.dice_all_equal = self.dice_all_equal
        g.remembering = list(self.remembering)
        g.stored_hash = self.stored_hash
        g.prior_stamp = self.prior_stamp
        g.phases = list(self.phases)
        g.stalemated = list(self.stalemated)
        g.triggered = list(self.triggered)
        return g
