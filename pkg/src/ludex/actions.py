'''
Atomic state changes and the Move that bundles them.

A move is an ordered action list with exactly one decision action; capture and
setup effects travel in the same list, before or after the decision as the
generating ludeme dictates. (then ...) consequents are compiled move functions
evaluated on the post-move state with iterators reset.
'''

from __future__ import annotations

from dataclasses import dataclass, field

from .context import OFF, Context


@dataclass(frozen=True)
class Action:
    decision: bool = False

    def apply(self, ctx: Context) -> None:
        raise NotImplementedError

    def describe(self) -> str:
        return type(self).__name__


@dataclass(frozen=True)
class ActionAdd(Action):
    site: int = OFF
    what: int = 0
    count: int = 1
    state: int = -1
    value: int = -1

    def apply(self, ctx):
        c, s = ctx.container_of(self.site)
        comp = ctx.game.components[self.what]
        if c.get_what(s) == self.what and c.count is not None:
            c.set_count(s, c.get_count(s) + self.count)
        else:
            c.set_what(s, self.what)
            c.set_who(s, comp.owner)
            if c.count is not None:
                c.set_count(s, self.count)
        if self.state >= 0:
            c.set_state(s, self.state)
        if self.value >= 0:
            c.set_value(s, self.value)

    def describe(self):
        comp = self.what
        return f'Add({comp}@{self.site})'


@dataclass(frozen=True)
class ActionMove(Action):
    from_site: int = OFF
    to_site: int = OFF

    def apply(self, ctx):
        fc, fs = ctx.container_of(self.from_site)
        tc, ts = ctx.container_of(self.to_site)
        what = fc.get_what(fs)
        who = fc.get_who(fs)
        state = fc.get_state(fs)
        rot = fc.get_rotation(fs)
        val = fc.get_value(fs)
        cnt = fc.get_count(fs)
        if fc.count is not None and cnt > 1:
            fc.set_count(fs, cnt - 1)
        else:
            fc.clear_site(fs)
        if tc.get_what(ts) == what and tc.count is not None and what != 0:
            tc.set_count(ts, tc.get_count(ts) + 1)
        else:
            tc.set_what(ts, what)
            tc.set_who(ts, who)
            if tc.count is not None:
                tc.set_count(ts, 1)
            tc.set_state(ts, state)
            tc.set_rotation(ts, rot)
            tc.set_value(ts, val)
        ctx.state.visited.add(self.from_site)
        ctx.state.visited.add(self.to_site)

    def describe(self):
        return f'Move({self.from_site}-{self.to_site})'


@dataclass(frozen=True)
class ActionRemove(Action):
    site: int = OFF

    def apply(self, ctx):
        c, s = ctx.container_of(self.site)
        cnt = c.get_count(s)
        if c.count is not None and cnt > 1:
            c.set_count(s, cnt - 1)
        else:
            c.clear_site(s)

    def describe(self):
        return f'Remove({self.site})'


@dataclass(frozen=True)
class ActionSetState(Action):
    site: int = OFF
    state: int = 0

    def apply(self, ctx):
        c, s = ctx.container_of(self.site)
        c.set_state(s, self.state)

    def describe(self):
        return f'SetState({self.site}={self.state})'


@dataclass(frozen=True)
class ActionSetRotation(Action):
    site: int = OFF
    rotation: int = 0

    def apply(self, ctx):
        c, s = ctx.container_of(self.site)
        c.set_rotation(s, self.rotation)


@dataclass(frozen=True)
class ActionSetValue(Action):
    site: int = OFF
    value: int = 0

    def apply(self, ctx):
        c, s = ctx.container_of(self.site)
        c.set_value(s, self.value)


@dataclass(frozen=True)
class ActionSetCount(Action):
    site: int = OFF
    count: int = 0

    def apply(self, ctx):
        c, s = ctx.container_of(self.site)
        if self.count <= 0:
            c.clear_site(s)
        else:
            c.set_count(s, self.count)

    def describe(self):
        return f'SetCount({self.site}={self.count})'


@dataclass(frozen=True)
class ActionPromote(Action):
    site: int = OFF
    what: int = 0

    def apply(self, ctx):
        c, s = ctx.container_of(self.site)
        c.set_what(s, self.what)
        c.set_who(s, ctx.game.components[self.what].owner)

    def describe(self):
        return f'Promote({self.site}->{self.what})'


@dataclass(frozen=True)
class ActionPass(Action):
    def apply(self, ctx):
        pass

    def describe(self):
        return 'Pass'


@dataclass(frozen=True)
class ActionSelect(Action):
    site: int = OFF

    def apply(self, ctx):
        pass

    def describe(self):
        return f'Select({self.site})'


@dataclass(frozen=True)
class ActionAddScore(Action):
    player: int = 0
    amount: int = 0

    def apply(self, ctx):
        ctx.state.scores[self.player] += self.amount

    def describe(self):
        return f'Score(P{self.player}{self.amount:+d})'


@dataclass(frozen=True)
class ActionSetScore(Action):
    player: int = 0
    amount: int = 0

    def apply(self, ctx):
        ctx.state.scores[self.player] = self.amount


@dataclass(frozen=True)
class ActionMoveAgain(Action):
    def apply(self, ctx):
        ctx.pending_again = True

    def describe(self):
        return 'MoveAgain'


@dataclass(frozen=True)
class ActionSetNextPlayer(Action):
    player: int = 0

    def apply(self, ctx):
        ctx.state.next = self.player

    def describe(self):
        return f'SetNext(P{self.player})'


@dataclass(frozen=True)
class ActionSetPending(Action):
    value: int = 1

    def apply(self, ctx):
        ctx.state.pending.add(self.value)


@dataclass(frozen=True)
class ActionSetVar(Action):
    name: str = ''
    value: int = 0

    def apply(self, ctx):
        # OFF is the unset reading, so storing it is the same as clearing.
        if self.value == OFF:
            ctx.state.value_map.pop(self.name, None)
        else:
            ctx.state.value_map[self.name] = self.value


@dataclass(frozen=True)
class ActionRemember(Action):
    value: int = 0

    def apply(self, ctx):
        ctx.state.remembering.append(self.value)


@dataclass(frozen=True)
class ActionForget(Action):
    value: int = 0
    everything: bool = False

    def apply(self, ctx):
        if self.everything:
            ctx.state.remembering.clear()
        elif self.value in ctx.state.remembering:
            ctx.state.remembering.remove(self.value)


@dataclass(frozen=True)
class ActionTrigger(Action):
    event: str = ''
    player: int = 0

    def apply(self, ctx):
        ctx.state.triggered[self.player] = ctx.state.mover or 1


@dataclass(frozen=True)
class ActionStoreState(Action):
    def apply(self, ctx):
        ctx.state.stored_hash = ctx.position_hash()


@dataclass(frozen=True)
class ActionRoll(Action):
    def apply(self, ctx):
        dice = ctx.game.dice
        vals = [d.faces[ctx.rng.randrange(len(d.faces))] for d in dice]
        ctx.state.current_dice = vals
        ctx.state.dice_all_equal = len(set(vals)) <= 1

    def describe(self):
        return 'Roll'


@dataclass(frozen=True)
class ActionSwapPlayers(Action):
    p1: int = 1
    p2: int = 2

    def apply(self, ctx):
        counterpart = ctx.game.counterpart
        for c in ctx.containers:
            for s in range(c.num_sites):
                who = c.get_who(s)
                if who == self.p1:
                    c.set_who(s, self.p2)
                    c.set_what(s, counterpart(c.get_what(s), self.p2))
                elif who == self.p2:
                    c.set_who(s, self.p1)
                    c.set_what(s, counterpart(c.get_what(s), self.p1))
        sc = ctx.state.scores
        sc[self.p1], sc[self.p2] = sc[self.p2], sc[self.p1]

    def describe(self):
        return f'Swap(P{self.p1},P{self.p2})'


@dataclass(frozen=True)
class ActionResolve(Action):
    """Puzzle: fix one variable to one value."""
    site: int = OFF
    value: int = 0

    def apply(self, ctx):
        ctx.puzzle.set(self.site, self.value)

    def describe(self):
        return f'Set({self.site}={self.value})'


@dataclass(frozen=True)
class ActionToggle(Action):
    """Puzzle: flip one candidate bit."""
    site: int = OFF
    value: int = 0

    def apply(self, ctx):
        ctx.puzzle.toggle(self.site, self.value)

    def describe(self):
        return f'Toggle({self.site}:{self.value})'


# Order rank for canonical move sorting; ties fall back to repr.
_KIND_RANK = {
    'ActionMove': 0, 'ActionAdd': 1, 'ActionRemove': 2, 'ActionPromote': 3,
    'ActionSelect': 4, 'ActionSetState': 5, 'ActionSetCount': 6,
    'ActionSetValue': 7, 'ActionSetRotation': 8, 'ActionResolve': 9,
    'ActionToggle': 10, 'ActionPass': 11, 'ActionSetNextPlayer': 12,
    'ActionSwapPlayers': 13, 'ActionRoll': 14,
}


def kind_rank(a: Action) -> int:
    return _KIND_RANK.get(type(a).__name__, 99)


class Move:
    __slots__ = ('actions', 'from_site', 'to_site', 'mover', 'then')

    def __init__(self, actions, from_site=OFF, to_site=OFF, mover=0, then=()):
        self.actions = tuple(actions)
        self.from_site = from_site
        self.to_site = to_site
        self.mover = mover
        self.then = tuple(then)

    def decision_action(self):
        for a in self.actions:
            if a.decision:
                return a
        return None

    def with_then(self, extra) -> 'Move':
        return Move(self.actions, self.from_site, self.to_site, self.mover,
                    self.then + tuple(extra))

    def sort_key(self):
        da = self.decision_action()
        return (self.from_site, self.to_site,
                kind_rank(da) if da is not None else 99,
                tuple(a.describe() for a in self.actions))

    def describe(self) -> str:
        return '+'.join(a.describe() for a in self.actions)

    def __eq__(self, other):
        return (isinstance(other, Move) and self.actions == other.actions
                and self.from_site == other.from_site
                and self.to_site == other.to_site)

    def __hash__(self):
        return hash((self.actions, self.from_site, self.to_site))

    def __repr__(self):
        return f'<Move {self.describe()}>'


def apply_move(ctx: Context, move: Move) -> None:
    """Apply actions in order, then each consequent on the resulting state."""
    prev = ctx.in_flight
    ctx.in_flight = move
    try:
        for a in move.actions:
            a.apply(ctx)
        if move.then:
            saved = ctx.save_iterators()
            for fn in move.then:
                ctx.reset_iterators()
                for sub in fn(ctx):
                    apply_move(ctx, sub)
            ctx.restore_iterators(saved)
    finally:
        ctx.in_flight = prev
