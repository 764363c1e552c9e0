'''Move operators and requirements: combinators over generator lists.'''

from __future__ import annotations

import dataclasses

from ..actions import Move, apply_move
from ..functions import (CompileError, compile_bool, compile_int,
                         compile_intarray, compile_player, compile_region)
from ..functions.base import as_tag
from ..lud import Array, LudNode
from .core import compile_moves, compile_then


def _operands(node, cc):
    fs = []
    for a in node.positional():
        if isinstance(a, Array):
            fs.extend(compile_moves(x, cc) for x in a.items)
        elif isinstance(a, LudNode) and a.label != 'then':
            fs.append(compile_moves(a, cc))
    if not fs:
        raise CompileError(f'({node.label} ...): no move operands')
    return fs


def _with_then(moves, then):
    if not then:
        return moves
    return [m.with_then(then) for m in moves]


def _or(node, cc):
    fs = _operands(node, cc)
    then = compile_then(node, cc)

    def run(ctx, limit=None):
        out = []
        for f in fs:
            rem = None if limit is None else limit - len(out)
            out.extend(f(ctx, rem))
            if limit is not None and len(out) >= limit:
                break
        return _with_then(out, then)
    return run


def _if(node, cc):
    pos = node.positional()
    cond = compile_bool(pos[0], cc)
    yes = compile_moves(pos[1], cc)
    no = compile_moves(pos[2], cc) if len(pos) > 2 and not (
        isinstance(pos[2], LudNode) and pos[2].label == 'then') else None
    then = compile_then(node, cc)

    def run(ctx, limit=None):
        if cond(ctx):
            return _with_then(yes(ctx, limit), then)
        if no is not None:
            return _with_then(no(ctx, limit), then)
        return []
    return run


def _append(node, cc):
    pos = node.positional()
    inner = compile_moves(pos[0], cc)
    then = compile_then(node, cc)
    if not then:
        raise CompileError('(append ...): missing (then ...)')

    def run(ctx, limit=None):
        return [m.with_then(then) for m in inner(ctx, limit)]
    return run


def _all_combinations(node, cc):
    fs = _operands(node, cc)
    if len(fs) != 2:
        raise CompileError('(allCombinations ...): exactly two operand lists')
    then = compile_then(node, cc)

    def run(ctx, limit=None):
        out = []
        first = fs[0](ctx)
        second = fs[1](ctx)
        for a in first:
            for b in second:
                demoted = tuple(dataclasses.replace(x, decision=False)
                                for x in b.actions)
                merged = Move(a.actions + demoted, a.from_site, a.to_site,
                              mover=ctx.state.mover,
                              then=a.then + b.then + then)
                out.append(merged)
                if limit is not None and len(out) >= limit:
                    return out
        return out
    return run


def _priority(node, cc):
    fs = _operands(node, cc)
    then = compile_then(node, cc)

    def run(ctx, limit=None):
        for f in fs:
            got = f(ctx, limit)
            if got:
                return _with_then(got, then)
        return []
    return run


def _do(node, cc):
    pos = node.positional()
    prior = compile_moves(pos[0], cc) if pos else None
    nxt = None
    if node.has_named('next'):
        nxt = compile_moves(node.named('next'), cc)
    after = None
    if node.has_named('ifAfterwards'):
        after = compile_bool(node.named('ifAfterwards'), cc)

    if nxt is not None:
        def run(ctx, limit=None):
            # Run the prior (e.g. a dice roll) once per decision point; a
            # second evaluation of the same position must not re-roll.
            stamp = ctx.trial.num_moves()
            if ctx.state.prior_stamp != stamp:
                ctx.state.prior_stamp = stamp
                for mv in prior(ctx):
                    apply_move(ctx, mv)
            return nxt(ctx, limit)
        return run

    if after is None:
        raise CompileError('(do ...): needs next: or ifAfterwards:')

    def run(ctx, limit=None):
        out = []
        for mv in prior(ctx):
            probe = ctx.copy()
            apply_move(probe, mv)
            if after(probe):
                out.append(mv)
                if limit is not None and len(out) >= limit:
                    break
        return out
    return run


def _avoid_stored(node, cc):
    pos = node.positional()
    inner = compile_moves(pos[0], cc)

    def run(ctx, limit=None):
        out = []
        for mv in inner(ctx):
            probe = ctx.copy()
            apply_move(probe, mv)
            if probe.position_hash() != ctx.state.stored_hash:
                out.append(mv)
                if limit is not None and len(out) >= limit:
                    break
        return out
    return run


def _max(node, cc):
    pos = node.positional()
    kind = as_tag(pos[0]) if pos else None
    inner = compile_moves(pos[1], cc)
    then = compile_then(node, cc)
    if kind == 'Captures':
        def run(ctx, limit=None):
            moves = inner(ctx)
            if not moves:
                return []
            scored = [(_removals(ctx, m), m) for m in moves]
            best = max(s for s, _ in scored)
            out = [m for s, m in scored if s == best]
            return _with_then(out, then)
        return run
    if kind == 'Moves':
        def run(ctx, limit=None):
            moves = inner(ctx)
            if not moves:
                return []
            scored = [(_chain_depth(ctx, m, inner, 0), m) for m in moves]
            best = max(s for s, _ in scored)
            out = [m for s, m in scored if s == best]
            return _with_then(out, then)
        return run
    raise CompileError(f'unsupported max form (max {kind} ...)')


def _removals(ctx, move):
    probe = ctx.copy()
    before = _piece_total(probe)
    apply_move(probe, move)
    return before - _piece_total(probe)


def _piece_total(ctx):
    return sum(ctx.count(s) for s in range(ctx.topo.num_sites)
               if not ctx.is_empty(s))


def _chain_depth(ctx, move, gen, depth):
    if depth >= 64:
        return depth
    probe = ctx.copy()
    probe.pending_again = False
    apply_move(probe, move)
    if not probe.pending_again:
        return depth + 1
    subs = gen(probe)
    if not subs:
        return depth + 1
    return max(_chain_depth(probe, m, gen, depth + 1) for m in subs)


def _foreach(node, cc):
    pos = node.positional()
    tag = as_tag(pos[0]) if pos else None
    if tag == 'Piece':
        return _foreach_piece(node, pos[1:], cc)
    if tag == 'Site':
        return _foreach_site(node, pos[1:], cc)
    if tag == 'Value':
        return _foreach_value(node, pos[1:], cc)
    if tag == 'Player':
        return _foreach_player(node, pos[1:], cc)
    if tag == 'Die':
        return _foreach_die(node, pos[1:], cc)
    if tag == 'Direction':
        return _foreach_direction(node, pos[1:], cc)
    if tag == 'Group':
        return _foreach_group(node, pos[1:], cc)
    # Region filter form lives in functions.regions; moves form needs a tag.
    raise CompileError(f'unsupported forEach form (forEach {tag} ...)')


def _foreach_piece(node, rest, cc):
    names = [a for a in rest if isinstance(a, str)]
    role = None
    inner = None
    for a in rest:
        if isinstance(a, LudNode):
            if a.args:
                inner = compile_moves(a, cc)
            else:
                role = a
    player = compile_player(role, cc) if role is not None else (
        lambda ctx: ctx.state.mover)
    then = compile_then(node, cc)
    game = cc.game

    def run(ctx, limit=None):
        p = player(ctx)
        out = []
        saved = ctx.save_iterators()
        for s in range(ctx.topo.num_sites):
            w = ctx.what(s)
            if w == 0 or ctx.who(s) != p:
                continue
            comp = game.components[w]
            if names and comp.root not in names:
                continue
            gen = inner if inner is not None else comp.moves_fn
            if gen is None:
                continue
            ctx.from_site = s
            ctx.piece = w
            rem = None if limit is None else limit - len(out)
            out.extend(gen(ctx, rem))
            if limit is not None and len(out) >= limit:
                break
        ctx.restore_iterators(saved)
        return _with_then(out, then)
    return run


def _foreach_site(node, rest, cc):
    region = compile_region(rest[0], cc)
    inner = compile_moves(rest[1], cc)
    then = compile_then(node, cc)

    def run(ctx, limit=None):
        out = []
        saved = ctx.save_iterators()
        for s in region(ctx):
            ctx.site = s
            rem = None if limit is None else limit - len(out)
            out.extend(inner(ctx, rem))
            if limit is not None and len(out) >= limit:
                break
        ctx.restore_iterators(saved)
        return _with_then(out, then)
    return run


def _foreach_value(node, rest, cc):
    array = None
    inner = None
    for a in rest:
        if isinstance(a, (Array, LudNode)) and inner is None:
            if isinstance(a, LudNode) and a.label in ('move', 'or', 'if',
                                                      'forEach', 'do',
                                                      'priority', 'fromTo'):
                inner = compile_moves(a, cc)
            elif array is None:
                array = compile_intarray(a, cc)
            else:
                inner = compile_moves(a, cc)
    lo = hi = None
    if node.has_named('min'):
        lo = compile_int(node.named('min'), cc)
    if node.has_named('max'):
        hi = compile_int(node.named('max'), cc)
    if inner is None:
        raise CompileError('(forEach Value ...): missing moves')
    then = compile_then(node, cc)

    def run(ctx, limit=None):
        if array is not None:
            vals = array(ctx)
        else:
            vals = range(lo(ctx), hi(ctx) + 1)
        out = []
        saved = ctx.save_iterators()
        for v in vals:
            ctx.value = v
            rem = None if limit is None else limit - len(out)
            out.extend(inner(ctx, rem))
            if limit is not None and len(out) >= limit:
                break
        ctx.restore_iterators(saved)
        return _with_then(out, then)
    return run


def _foreach_player(node, rest, cc):
    inner = compile_moves(rest[0], cc)
    then = compile_then(node, cc)

    def run(ctx, limit=None):
        out = []
        saved = ctx.save_iterators()
        for p in range(1, ctx.game.num_players + 1):
            ctx.player = p
            rem = None if limit is None else limit - len(out)
            out.extend(inner(ctx, rem))
            if limit is not None and len(out) >= limit:
                break
        ctx.restore_iterators(saved)
        return _with_then(out, then)
    return run


def _foreach_die(node, rest, cc):
    inner = None
    for a in rest:
        if isinstance(a, LudNode) and a.args:
            inner = compile_moves(a, cc)
    if inner is None:
        raise CompileError('(forEach Die ...): missing moves')
    cond = None
    if node.has_named('if'):
        cond = compile_bool(node.named('if'), cc)
    then = compile_then(node, cc)

    def run(ctx, limit=None):
        out = []
        saved = ctx.save_iterators()
        seen = set()
        for v in ctx.state.current_dice:
            if v in seen:
                continue
            seen.add(v)
            ctx.die = v
            if cond is not None and not cond(ctx):
                continue
            rem = None if limit is None else limit - len(out)
            out.extend(inner(ctx, rem))
            if limit is not None and len(out) >= limit:
                break
        ctx.restore_iterators(saved)
        return _with_then(out, then)
    return run


def _foreach_direction(node, rest, cc):
    from_arg = node.first('from')
    from_f = None
    if from_arg is not None:
        from_f = compile_int(from_arg.positional()[0], cc)
    dirs = [as_tag(a) for a in rest if as_tag(a) is not None]
    inner = None
    for a in rest:
        if isinstance(a, LudNode) and a.args and a.label != 'from':
            inner = compile_moves(a, cc)
    if inner is None:
        raise CompileError('(forEach Direction ...): missing moves')
    then = compile_then(node, cc)

    def run(ctx, limit=None):
        f = from_f(ctx) if from_f is not None else ctx.from_site
        if f < 0:
            return []
        out = []
        saved = ctx.save_iterators()
        for rel, w in ctx.topo.resolve_directions(dirs or ['Adjacent'], f):
            t = ctx.topo.step(f, w, rel)
            if t is None:
                continue
            ctx.to_site = t
            rem = None if limit is None else limit - len(out)
            out.extend(inner(ctx, rem))
            if limit is not None and len(out) >= limit:
                break
        ctx.restore_iterators(saved)
        return _with_then(out, then)
    return run


def _foreach_group(node, rest, cc):
    from ..functions.regions import group_at
    inner = None
    for a in rest:
        if isinstance(a, LudNode) and a.args:
            inner = compile_moves(a, cc)
    if inner is None:
        raise CompileError('(forEach Group ...): missing moves')
    then = compile_then(node, cc)

    def run(ctx, limit=None):
        out = []
        saved = ctx.save_iterators()
        seen = set()
        for s in range(ctx.topo.num_sites):
            if s in seen or ctx.who(s) != ctx.state.mover:
                continue
            grp = group_at(ctx, s)
            seen |= grp
            ctx.site = min(grp)
            rem = None if limit is None else limit - len(out)
            out.extend(inner(ctx, rem))
            if limit is not None and len(out) >= limit:
                break
        ctx.restore_iterators(saved)
        return _with_then(out, then)
    return run


HEADS = {
    'or': _or,
    'and': _or,
    'if': _if,
    'append': _append,
    'allCombinations': _all_combinations,
    'priority': _priority,
    'do': _do,
    'avoidStoredState': _avoid_stored,
    'max': _max,
    'forEach': _foreach,
}
