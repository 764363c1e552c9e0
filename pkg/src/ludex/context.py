'''
Evaluation context: one mutable bundle holding the game, its state, and the
iterator slots that rule functions read while moves are generated or applied.

Sites are global indices: the board occupies [0, board.num_sites) and hand
containers follow. OFF (-1) means nowhere.
'''

from __future__ import annotations

OFF = -1
END = -2


class Trial:
    """Record of one played game: moves, hash history, final ranks."""

    def __init__(self):
        self.moves = []
        self.hashes = []          # hash of s0, then one hash per applied move
        self.over = False
        self.status = None        # None while running, winner index, 0 for draw
        self.ranks = []           # 1-based by player, filled as players finish
        self.active = []          # player -> still active flag (1-based)
        self.winners = []
        self.start_placements = []  # sites filled by start rules
        self.legal_cache = None   # legal moves for the current state
        self.choices = []         # per decision: index into the legal list
        self.random_steps = []    # positions in choices picked by a playout
        self.best_used = 0        # rank positions consumed from the top
        self.worst_used = 0       # and from the bottom

    def num_moves(self) -> int:
        return len(self.moves)

    def last_move(self):
        return self.moves[-1] if self.moves else None


class Context:
    __slots__ = (
        'game', 'state', 'containers', 'puzzle', 'rng', 'trial',
        'from_site', 'to_site', 'between', 'site', 'player', 'value',
        'piece', 'level', 'die', 'direction', 'track', 'edge', 'hint',
        'region', 'pending_again', 'group', 'in_flight',
    )

    def __init__(self, game, state, containers, rng, trial, puzzle=None):
        self.game = game
        self.state = state
        self.containers = containers
        self.puzzle = puzzle
        self.rng = rng
        self.trial = trial
        self.pending_again = False
        self.in_flight = None
        self.reset_iterators()

    def reset_iterators(self) -> None:
        self.from_site = OFF
        self.to_site = OFF
        self.between = OFF
        self.site = OFF
        self.player = OFF
        self.value = OFF
        self.piece = 0
        self.level = 0
        self.die = 0
        self.direction = None
        self.track = None
        self.edge = OFF
        self.hint = OFF
        self.region = None
        self.group = None

    def save_iterators(self) -> tuple:
        return (self.from_site, self.to_site, self.between, self.site,
                self.player, self.value, self.piece, self.level, self.die,
                self.direction, self.track, self.edge, self.hint, self.region,
                self.group)

    def restore_iterators(self, saved: tuple) -> None:
        (self.from_site, self.to_site, self.between, self.site, self.player,
         self.value, self.piece, self.level, self.die, self.direction,
         self.track, self.edge, self.hint, self.region, self.group) = saved

    # -- site access ---------------------------------------------------------

    def container_of(self, site: int):
        for c in self.containers:
            if c.offset <= site < c.offset + c.num_sites:
                return c, site - c.offset
        raise IndexError(f'site {site} is in no container')

    def what(self, site: int) -> int:
        c, s = self.container_of(site)
        return c.get_what(s)

    def who(self, site: int) -> int:
        c, s = self.container_of(site)
        return c.get_who(s)

    def count(self, site: int) -> int:
        c, s = self.container_of(site)
        return c.get_count(s)

    def state_at(self, site: int) -> int:
        c, s = self.container_of(site)
        return c.get_state(s)

    def rotation_at(self, site: int) -> int:
        c, s = self.container_of(site)
        return c.get_rotation(s)

    def value_at(self, site: int) -> int:
        c, s = self.container_of(site)
        return c.get_value(s)

    def is_empty(self, site: int) -> bool:
        c, s = self.container_of(site)
        return c.is_empty(s)

    @property
    def board(self):
        return self.containers[0]

    @property
    def topo(self):
        return self.game.topo

    @property
    def mover(self) -> int:
        return self.state.mover

    def position_hash(self) -> int:
        h = self.game.zobrist.mover_key(self.state.mover)
        for c in self.containers:
            h ^= c.hash
        for v in self.state.pending:
            h ^= self.game.zobrist.key('pending', 0, v)
        return h

    def last_from(self) -> int:
        # The move being applied counts as the last move for its consequents.
        m = self.in_flight if self.in_flight is not None else self.trial.last_move()
        return m.from_site if m is not None else OFF

    def last_to(self) -> int:
        m = self.in_flight if self.in_flight is not None else self.trial.last_move()
        return m.to_site if m is not None else OFF

    def copy(self) -> 'Context':
        c = Context.__new__(Context)
        c.game = self.game
        c.state = self.state.copy()
        c.containers = [x.copy() for x in self.containers]
        c.puzzle = self.puzzle.copy() if self.puzzle is not None else None
        c.rng = self.rng
        c.trial = self.trial
        c.pending_again = self.pending_again
        c.in_flight = self.in_flight
        c.restore_iterators(self.save_iterators())
        return c
