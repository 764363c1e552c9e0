'''Boolean rule functions.'''

from __future__ import annotations

import operator

from ..actions import ActionPass
from ..board.directions import opposite
from ..lud import Array
from .base import (CompileError, as_tag, compile_player, const,
                   skip_site_type, truthy_flag, want_node)
from .ints import compile_int
from .regions import compile_region, group_at


def compile_bool(arg, cc):
    if isinstance(arg, bool):
        return const(arg)
    node = want_node(arg, 'boolean expression')
    tag = as_tag(node)
    if tag == 'True':
        return const(True)
    if tag == 'False':
        return const(False)
    h = _HANDLERS.get(node.label)
    if h is None:
        raise CompileError(f'unsupported boolean ludeme ({node.label} ...)')
    return h(node, cc)


def _cmp(op):
    def make(node, cc):
        pos = node.positional()
        a = compile_int(pos[0], cc)
        b = compile_int(pos[1], cc)
        return lambda ctx: op(a(ctx), b(ctx))
    return make


def _bools(node, cc):
    pos = node.positional()
    if len(pos) == 1 and isinstance(pos[0], Array):
        pos = pos[0].items
    return [compile_bool(a, cc) for a in pos]


def _and(node, cc):
    fs = _bools(node, cc)
    return lambda ctx: all(f(ctx) for f in fs)


def _or(node, cc):
    fs = _bools(node, cc)
    return lambda ctx: any(f(ctx) for f in fs)


def _not(node, cc):
    f = compile_bool(node.positional()[0], cc)
    return lambda ctx: not f(ctx)


def _xor(node, cc):
    a, b = _bools(node, cc)[:2]
    return lambda ctx: a(ctx) != b(ctx)


def _if(node, cc):
    pos = node.positional()
    c = compile_bool(pos[0], cc)
    a = compile_bool(pos[1], cc)
    b = compile_bool(pos[2], cc) if len(pos) > 2 else const(False)
    return lambda ctx: a(ctx) if c(ctx) else b(ctx)


# -- (is ...) ---------------------------------------------------------------

def _is(node, cc):
    pos = skip_site_type(node.positional())
    tag = as_tag(pos[0]) if pos else None
    h = _IS_TAGS.get(tag)
    if h is None:
        raise CompileError(f'unsupported is form (is {tag} ...)')
    return h(node, pos[1:], cc)


def _site_value(ctx, s):
    if ctx.puzzle is not None:
        return ctx.puzzle.what(s)
    return ctx.what(s)


def _is_empty(node, rest, cc):
    rest = skip_site_type(rest)
    s = compile_int(rest[0], cc) if rest else (lambda ctx: ctx.to_site)
    def run(ctx):
        site = s(ctx)
        return 0 <= site < ctx.topo.num_sites and ctx.is_empty(site)
    return run


def _is_occupied(node, rest, cc):
    rest = skip_site_type(rest)
    s = compile_int(rest[0], cc) if rest else (lambda ctx: ctx.to_site)
    def run(ctx):
        site = s(ctx)
        return 0 <= site < ctx.topo.num_sites and not ctx.is_empty(site)
    return run


def _who_test(test):
    def make(node, rest, cc):
        f = compile_player(rest[0], cc) if rest else (
            lambda ctx: ctx.who(ctx.to_site))
        return lambda ctx: test(ctx, f(ctx))
    return make


def _is_even(node, rest, cc):
    f = compile_int(rest[0], cc)
    return lambda ctx: f(ctx) % 2 == 0


def _is_odd(node, rest, cc):
    f = compile_int(rest[0], cc)
    return lambda ctx: f(ctx) % 2 == 1


def _is_in(node, rest, cc):
    if len(rest) < 2:
        raise CompileError('(is In <site> <region>): missing argument')
    f = compile_int(rest[0], cc)
    r = compile_region(rest[1], cc)
    return lambda ctx: f(ctx) in r(ctx)


def _is_pending(node, rest, cc):
    if rest:
        f = compile_int(rest[0], cc)
        return lambda ctx: f(ctx) in ctx.state.pending
    return lambda ctx: bool(ctx.state.pending)


def _is_full(node, rest, cc):
    def run(ctx):
        return all(not ctx.is_empty(s) for s in range(ctx.topo.num_sites))
    return run


def _is_cycle(node, rest, cc):
    def run(ctx):
        h = ctx.position_hash()
        return ctx.trial.hashes.count(h) >= 3
    return run


def _is_repeat(node, rest, cc):
    def run(ctx):
        h = ctx.position_hash()
        return ctx.trial.hashes.count(h) >= 2
    return run


def _is_triggered(node, rest, cc):
    event = None
    player = None
    for a in rest:
        if isinstance(a, str):
            event = a
        else:
            player = compile_player(a, cc)

    def run(ctx):
        if player is not None:
            return ctx.state.triggered[player(ctx)] == event
        return any(t == event for t in ctx.state.triggered[1:])
    return run


def _is_visited(node, rest, cc):
    f = compile_int(rest[0], cc)
    return lambda ctx: f(ctx) in ctx.state.visited


def _is_line(node, rest, cc):
    if not rest:
        raise CompileError('(is Line <n> ...): missing length')
    n = compile_int(rest[0], cc)
    dir_names = [as_tag(a) for a in rest[1:] if as_tag(a) is not None]
    through_arg = node.named('through')
    through = (compile_int(through_arg, cc) if through_arg is not None
               else (lambda ctx: ctx.last_to()))
    what_arg = node.named('what')
    what = compile_int(what_arg, cc) if what_arg is not None else None
    exact = truthy_flag(node, 'exact', False)

    def run(ctx):
        t = through(ctx)
        if t < 0 or t >= ctx.topo.num_sites:
            return False
        target = what(ctx) if what is not None else ctx.what(t)
        if target == 0 or ctx.what(t) != target:
            return False
        want = n(ctx)
        pairs = ctx.topo.resolve_directions(dir_names or ['Adjacent'], t)
        table = {w: rel for rel, w in pairs}
        done = set()
        for rel, w in pairs:
            if w in done:
                continue
            done.add(w)
            total = 1 + _run_length(ctx, t, w, rel, target)
            ow = opposite(w)
            if table.get(ow) == rel:
                done.add(ow)
                total += _run_length(ctx, t, ow, rel, target)
            if total == want or (not exact and total > want):
                return True
        return False
    return run


def _run_length(ctx, site, wind, relation, target):
    k = 0
    for s in ctx.topo.radial(site, wind, relation):
        if ctx.what(s) != target:
            break
        k += 1
    return k


def _is_loop(node, rest, cc):
    through_arg = node.named('through')
    through = (compile_int(through_arg, cc) if through_arg is not None
               else (lambda ctx: ctx.last_to()))
    relation = 'Adjacent'
    for a in rest:
        t = as_tag(a)
        if t in ('Orthogonal', 'Diagonal', 'Adjacent'):
            relation = t

    def run(ctx):
        v = through(ctx)
        if v < 0 or v >= ctx.topo.num_sites:
            return False
        owner = ctx.who(v)
        if owner == 0:
            return False
        mates = [nb for nb in ctx.topo.neighbors[relation][v]
                 if ctx.who(nb) == owner]
        if len(mates) < 2:
            return False
        # A cycle through v exists iff two of its like-coloured neighbours
        # connect without passing through v itself.
        remaining = set(mates)
        while remaining:
            start = remaining.pop()
            seen = {start}
            frontier = [start]
            while frontier:
                s = frontier.pop()
                for nb in ctx.topo.neighbors[relation][s]:
                    if nb == v or nb in seen or ctx.who(nb) != owner:
                        continue
                    seen.add(nb)
                    frontier.append(nb)
            if any(m in seen for m in remaining):
                return True
            remaining -= seen
        return False
    return run


def _is_connected(node, rest, cc):
    role = None
    region_args = None
    for a in rest:
        if isinstance(a, Array):
            region_args = a.items
        elif as_tag(a) is not None:
            role = a
    if region_args is None:
        raise CompileError('(is Connected {..}): missing regions')
    regions = [compile_region(a, cc) for a in region_args]
    player = compile_player(role, cc) if role is not None else (
        lambda ctx: ctx.state.mover)

    def run(ctx):
        owner = player(ctx)
        targets = [set(r(ctx)) for r in regions]
        visited = set()
        for s in range(ctx.topo.num_sites):
            if s in visited or ctx.who(s) != owner:
                continue
            grp = group_at(ctx, s)
            visited |= grp
            if all(t & grp for t in targets):
                return True
        return False
    return run


def _is_solved(node, rest, cc):
    return lambda ctx: ctx.game.puzzle_solved(ctx)


def _is_blocked(node, rest, cc):
    p = compile_player(rest[0], cc) if rest else (lambda ctx: ctx.state.mover)
    return lambda ctx: not ctx.game.has_moves(ctx, p(ctx))


def _is_count(node, rest, cc):
    rest = skip_site_type(rest)
    r = compile_region(rest[0], cc)
    n = compile_int(rest[1], cc) if len(rest) > 1 else const(1)
    of_arg = node.named('of')
    of = compile_int(of_arg, cc) if of_arg is not None else const(1)

    def run(ctx):
        v = of(ctx)
        return sum(1 for s in r(ctx) if _site_value(ctx, s) == v) == n(ctx)
    return run


def _is_sum(node, rest, cc):
    rest = skip_site_type(rest)
    r = compile_region(rest[0], cc)
    n = compile_int(rest[1], cc)

    def run(ctx):
        return sum(_site_value(ctx, s) for s in r(ctx)) == n(ctx)
    return run


# -- other heads ------------------------------------------------------------

def _no(node, cc):
    pos = node.positional()
    tag = as_tag(pos[0]) if pos else None
    if tag == 'Moves':
        role = pos[1] if len(pos) > 1 else None
        rtag = as_tag(role)
        if rtag == 'All':
            def run(ctx):
                return all(not ctx.game.has_moves(ctx, p)
                           for p in range(1, ctx.game.num_players + 1))
            return run
        p = compile_player(role, cc) if role is not None else (
            lambda ctx: ctx.state.mover)
        return lambda ctx: not ctx.game.has_moves(ctx, p(ctx))
    if tag == 'Pieces':
        from .ints import _count_pieces
        f = _count_pieces(node, pos[1:], cc)
        return lambda ctx: f(ctx) == 0
    raise CompileError(f'unsupported no form (no {tag} ...)')


def _was(node, cc):
    tag = as_tag(node.positional()[0]) if node.positional() else None
    if tag != 'Pass':
        raise CompileError(f'unsupported was form (was {tag})')

    def run(ctx):
        mv = ctx.trial.last_move()
        if mv is None:
            return False
        d = mv.decision_action()
        return isinstance(d, ActionPass)
    return run


def _can(node, cc):
    pos = node.positional()
    if not pos or as_tag(pos[0]) != 'Move':
        raise CompileError('(can ...): only (can Move <moves>) is supported')
    from ..movegen import compile_moves
    gen = compile_moves(pos[1], cc)
    return lambda ctx: bool(gen(ctx, limit=1))


def _all(node, cc):
    pos = node.positional()
    tag = as_tag(pos[0]) if pos else None
    if tag == 'Passed':
        def run(ctx):
            return ctx.state.passed_in_row >= ctx.game.num_players
        return run
    if tag == 'Different':
        exc_arg = node.named('except')
        exc = compile_int(exc_arg, cc) if exc_arg is not None else None
        game = cc.game

        def run(ctx):
            skip = exc(ctx) if exc is not None else None
            for _, sites in game.puzzle_regions:
                seen = set()
                for s in sites:
                    if ctx.puzzle is not None and not ctx.puzzle.is_resolved(s):
                        continue
                    v = _site_value(ctx, s)
                    if v == skip:
                        continue
                    if v in seen:
                        return False
                    seen.add(v)
            return True
        return run
    if tag == 'Sites':
        r = compile_region(pos[1], cc)
        cond = compile_bool(node.named('if'), cc)

        def run(ctx):
            saved = ctx.save_iterators()
            ok = True
            for s in r(ctx):
                ctx.site = s
                if not cond(ctx):
                    ok = False
                    break
            ctx.restore_iterators(saved)
            return ok
        return run
    raise CompileError(f'unsupported all form (all {tag} ...)')


_IS_TAGS = {
    'Empty': _is_empty,
    'Occupied': _is_occupied,
    'Enemy': _who_test(lambda ctx, w: w != 0 and w != ctx.state.mover),
    'Friend': _who_test(lambda ctx, w: w == ctx.state.mover),
    'Mover': _who_test(lambda ctx, w: w == ctx.state.mover),
    'Next': _who_test(lambda ctx, w: w == ctx.state.next),
    'Prev': _who_test(lambda ctx, w: w == ctx.state.prev),
    'Even': _is_even,
    'Odd': _is_odd,
    'In': _is_in,
    'Pending': _is_pending,
    'Full': _is_full,
    'Cycle': _is_cycle,
    'Repeat': _is_repeat,
    'Triggered': _is_triggered,
    'Visited': _is_visited,
    'Line': _is_line,
    'Loop': _is_loop,
    'Connected': _is_connected,
    'Solved': _is_solved,
    'Blocked': _is_blocked,
    'Count': _is_count,
    'Sum': _is_sum,
}

_HANDLERS = {
    '=': _cmp(operator.eq),
    '!=': _cmp(operator.ne),
    '<': _cmp(operator.lt),
    '<=': _cmp(operator.le),
    '>': _cmp(operator.gt),
    '>=': _cmp(operator.ge),
    'and': _and,
    'or': _or,
    'not': _not,
    'xor': _xor,
    'if': _if,
    'is': _is,
    'no': _no,
    'was': _was,
    'can': _can,
    'all': _all,
}
