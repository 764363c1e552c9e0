'''Decision move generators: the (move ...) family.'''

from __future__ import annotations

from ..actions import (ActionAdd, ActionMove, ActionPass, ActionPromote,
                       ActionRemove, ActionSelect, ActionSetNextPlayer,
                       ActionSwapPlayers, Move)
from ..functions import CompileError, compile_int, compile_player
from ..functions.base import as_tag, flatten_items, truthy_flag
from ..lud import Array, LudNode
from .core import (child_spec, compile_then, direction_names, eval_between,
                   eval_to, from_sites, inline_actions, parse_spec)

_SPEC_LABELS = ('from', 'to', 'between', 'piece', 'then')


def compile_move(node, cc):
    pos = node.positional()
    tag = as_tag(pos[0]) if pos else None
    if tag in _MOVE_TAGS:
        return _MOVE_TAGS[tag](node, cc)
    if pos and isinstance(pos[0], LudNode) and pos[0].label == 'from':
        return _move_fromto(node, cc)
    raise CompileError(f'unsupported decision move (move {tag} ...)')


def _dirs_of(node, skip=1):
    """Direction tags among the positionals, skipping the move-kind tag."""
    out = []
    for a in node.positional()[skip:]:
        t = as_tag(a)
        if t is not None:
            out.append(t)
    return out


def _pack(ctx, actions, f, t, then):
    return Move(actions, from_site=f, to_site=t, mover=ctx.state.mover,
                then=then)


def _piece_ids(node, cc):
    """(piece ...) child -> fn(ctx) -> list of component ids."""
    pn = node.first('piece')
    if pn is None:
        game = cc.game

        def default(ctx):
            return [game.mover_piece(ctx.state.mover)]
        return default
    items = []
    for a in pn.positional():
        items.extend(flatten_items(a) if isinstance(a, Array) else [a])
    fs = []
    game = cc.game
    for it in items:
        if isinstance(it, str):
            fs.append(lambda ctx, name=it: game.piece_id(name, ctx.state.mover))
        else:
            f = compile_int(it, cc)
            fs.append(f)
    if not fs:
        raise CompileError('(piece ...): missing piece name')
    return lambda ctx: [f(ctx) for f in fs]


def _move_add(node, cc):
    what = _piece_ids(node, cc)
    to = child_spec(node, 'to', cc)
    if to.region is None:
        raise CompileError('(move Add ...): (to ...) needs a region')
    then = compile_then(node, cc)
    decision = cc.decision

    def run(ctx, limit=None):
        out = []
        for w in what(ctx):
            for t in to.region(ctx):
                ok, extra = eval_to(ctx, to, t)
                if not ok:
                    continue
                acts = [ActionAdd(site=t, what=w, decision=decision)] + extra
                out.append(_pack(ctx, acts, t, t, then))
                if limit is not None and len(out) >= limit:
                    return out
        return out
    return run


def _move_step(node, cc):
    frm = child_spec(node, 'from', cc)
    dirs = _dirs_of(node) or ['Adjacent']
    to = child_spec(node, 'to', cc)
    then = compile_then(node, cc)
    decision = cc.decision

    def run(ctx, limit=None):
        out = []
        for f in from_sites(ctx, frm):
            for rel, w in ctx.topo.resolve_directions(dirs, f):
                t = ctx.topo.step(f, w, rel)
                if t is None:
                    continue
                saved = ctx.save_iterators()
                ctx.from_site = f
                ctx.to_site = t
                ok = to.ok(ctx)
                extra = inline_actions(ctx, to.apply) if ok else []
                ctx.restore_iterators(saved)
                if not ok:
                    continue
                acts = [ActionMove(from_site=f, to_site=t, decision=decision)]
                acts += extra
                out.append(_pack(ctx, acts, f, t, then))
                if limit is not None and len(out) >= limit:
                    return out
        return out
    return run


def _move_slide(node, cc):
    frm = child_spec(node, 'from', cc)
    dirs = _dirs_of(node) or ['Adjacent']
    between = child_spec(node, 'between', cc)
    to = child_spec(node, 'to', cc)
    then = compile_then(node, cc)
    decision = cc.decision

    def between_ok(ctx, f, s):
        if between.cond is None:
            return ctx.is_empty(s)
        saved = ctx.save_iterators()
        ctx.from_site = f
        ctx.between = s
        ok = between.cond(ctx)
        ctx.restore_iterators(saved)
        return ok

    def run(ctx, limit=None):
        out = []
        for f in from_sites(ctx, frm):
            for rel, w in ctx.topo.resolve_directions(dirs, f):
                passed = []
                for s in ctx.topo.radial(f, w, rel):
                    if between_ok(ctx, f, s):
                        trail_acts = []
                        if between.trail is not None:
                            saved = ctx.save_iterators()
                            ctx.from_site = f
                            trail_id = between.trail(ctx)
                            ctx.restore_iterators(saved)
                            trail_acts = [ActionAdd(site=p, what=trail_id)
                                          for p in passed + [f]]
                        landing_ok = True
                        extra = []
                        if to.cond is not None:
                            saved = ctx.save_iterators()
                            ctx.from_site = f
                            ctx.to_site = s
                            landing_ok = to.cond(ctx)
                            if landing_ok:
                                extra = inline_actions(ctx, to.apply)
                            ctx.restore_iterators(saved)
                        if landing_ok:
                            acts = [ActionMove(from_site=f, to_site=s,
                                               decision=decision)]
                            acts += extra + trail_acts
                            out.append(_pack(ctx, acts, f, s, then))
                            if limit is not None and len(out) >= limit:
                                return out
                        passed.append(s)
                        continue
                    # Blocked: terminal landing allowed when the to-condition
                    # accepts the blocking site (capture by replacement).
                    if to.cond is not None:
                        saved = ctx.save_iterators()
                        ctx.from_site = f
                        ctx.to_site = s
                        ok = to.cond(ctx)
                        extra = inline_actions(ctx, to.apply) if ok else []
                        ctx.restore_iterators(saved)
                        if ok:
                            trail_acts = []
                            if between.trail is not None:
                                saved = ctx.save_iterators()
                                ctx.from_site = f
                                trail_id = between.trail(ctx)
                                ctx.restore_iterators(saved)
                                trail_acts = [ActionAdd(site=p, what=trail_id)
                                              for p in passed + [f]]
                            acts = extra + [ActionMove(from_site=f, to_site=s,
                                                       decision=decision)]
                            acts += trail_acts
                            out.append(_pack(ctx, acts, f, s, then))
                            if limit is not None and len(out) >= limit:
                                return out
                    break
        return out
    return run


def _move_hop(node, cc):
    frm = child_spec(node, 'from', cc)
    dirs = _dirs_of(node) or ['Adjacent']
    between = child_spec(node, 'between', cc)
    to = child_spec(node, 'to', cc)
    then = compile_then(node, cc)
    decision = cc.decision

    def run(ctx, limit=None):
        out = []
        for f in from_sites(ctx, frm):
            for rel, w in ctx.topo.resolve_directions(dirs, f):
                ray = ctx.topo.radial(f, w, rel)
                before_max = between.before(ctx) if between.before else 0
                after_max = between.after(ctx) if between.after else 0
                if between.range is not None:
                    lo, hi = (between.range[0](ctx), between.range[1](ctx))
                else:
                    lo, hi = 1, 1
                for nb in range(before_max + 1):
                    if nb > 0 and (nb - 1 >= len(ray)
                                   or not ctx.is_empty(ray[nb - 1])):
                        break
                    got = _hop_runs(ctx, f, ray, nb, lo, hi, after_max,
                                    between, to, then, decision)
                    out.extend(got)
                    if limit is not None and len(out) >= limit:
                        return out
        return out
    return run


def _hop_runs(ctx, f, ray, nb, lo, hi, after_max, between, to, then, decision):
    out = []
    for r in range(lo, hi + 1):
        if nb + r > len(ray):
            break
        run = ray[nb:nb + r]
        acts_between = []
        ok = True
        for b in run:
            saved = ctx.save_iterators()
            ctx.from_site = f
            ctx.between = b
            good = between.cond is None or between.cond(ctx)
            if good:
                acts_between.extend(inline_actions(ctx, between.apply))
            ctx.restore_iterators(saved)
            if not good:
                ok = False
                break
        if not ok:
            break
        for k in range(after_max + 1):
            ti = nb + r + k
            if ti >= len(ray):
                break
            t = ray[ti]
            saved = ctx.save_iterators()
            ctx.from_site = f
            ctx.to_site = t
            land = to.cond is None or to.cond(ctx)
            extra = inline_actions(ctx, to.apply) if land else []
            ctx.restore_iterators(saved)
            if land:
                acts = [ActionMove(from_site=f, to_site=t, decision=decision)]
                acts += list(acts_between) + extra
                out.append(_pack(ctx, acts, f, t, then))
            if not ctx.is_empty(t):
                break
    return out


def _walk_targets(ctx, start, walk, facing):
    """Follow one turtle walk (F/L/R tokens) from start; None when blocked.

    Turns rotate within the tiling's full wind basis, not the winds the
    current site happens to support, so a walk near the edge dies when its
    step leaves the board instead of wrapping onto a leftover direction.
    """
    topo = ctx.topo
    basis = topo.wind_basis('Orthogonal')
    pos = start
    face = facing
    for tok in walk:
        if tok == 'F':
            nxt = topo.step(pos, face, 'Orthogonal')
            if nxt is None:
                return None
            pos = nxt
        elif tok in ('R', 'L'):
            face = _turn(face, basis, clockwise=(tok == 'R'))
        else:
            raise CompileError(f'unknown walk token {tok!r} (only F, L, R)')
    return pos


def _turn(face, supported, clockwise):
    from ..board.directions import WIND_ANGLE
    base = WIND_ANGLE[face]

    def cw_delta(w):
        return (base - WIND_ANGLE[w]) % 360.0
    cands = [w for w in supported if w != face]
    if not cands:
        return face
    if clockwise:
        return min(cands, key=lambda w: cw_delta(w) or 360.0)
    return min(cands, key=lambda w: (-cw_delta(w)) % 360.0 or 360.0)


def _move_leap(node, cc):
    frm = child_spec(node, 'from', cc)
    walks = None
    for a in node.positional()[1:]:
        if isinstance(a, Array):
            walks = [[as_tag(t) for t in flatten_items(w)]
                     for w in a.items]
    if walks is None:
        raise CompileError('(move Leap ...): missing walk set')
    to = child_spec(node, 'to', cc)
    then = compile_then(node, cc)
    rotations = truthy_flag(node, 'rotations', True)
    forward = truthy_flag(node, 'forward', False)
    decision = cc.decision
    game = cc.game

    def run(ctx, limit=None):
        out = []
        basis = ctx.topo.wind_basis('Orthogonal')
        for f in from_sites(ctx, frm):
            if rotations:
                facings = basis
            else:
                facings = basis[:1]
            if forward:
                fw = game.forward_wind(ctx.state.mover)
                from ..board.directions import angle_between
                facings = [w for w in facings
                           if w == fw or angle_between(w, fw) < 90.0]
            targets = []
            for facing in facings:
                for walk in walks:
                    t = _walk_targets(ctx, f, walk, facing)
                    if t is not None and t != f and t not in targets:
                        targets.append(t)
            for t in sorted(targets):
                saved = ctx.save_iterators()
                ctx.from_site = f
                ctx.to_site = t
                ok = to.ok(ctx)
                extra = inline_actions(ctx, to.apply) if ok else []
                ctx.restore_iterators(saved)
                if not ok:
                    continue
                acts = extra + [ActionMove(from_site=f, to_site=t,
                                           decision=decision)]
                out.append(_pack(ctx, acts, f, t, then))
                if limit is not None and len(out) >= limit:
                    return out
        return out
    return run


def _move_shoot(node, cc):
    what = _piece_ids(node, cc)
    frm = child_spec(node, 'from', cc)
    dirs = _dirs_of(node) or ['Adjacent']
    to = child_spec(node, 'to', cc)
    then = compile_then(node, cc)
    decision = cc.decision

    def run(ctx, limit=None):
        out = []
        ids = what(ctx)
        if frm.region is not None:
            starts = from_sites(ctx, frm)
        else:
            s = ctx.last_to()
            starts = [s] if s >= 0 else []
        for f in starts:
            for rel, w in ctx.topo.resolve_directions(dirs, f):
                for t in ctx.topo.radial(f, w, rel):
                    if to.cond is None:
                        ok = ctx.is_empty(t)
                        extra = []
                    else:
                        saved = ctx.save_iterators()
                        ctx.from_site = f
                        ctx.to_site = t
                        ok = to.cond(ctx)
                        extra = inline_actions(ctx, to.apply) if ok else []
                        ctx.restore_iterators(saved)
                    if not ok:
                        break
                    for wid in ids:
                        acts = [ActionAdd(site=t, what=wid,
                                          decision=decision)] + extra
                        out.append(_pack(ctx, acts, f, t, then))
                        if limit is not None and len(out) >= limit:
                            return out
        return out
    return run


def _move_select(node, cc):
    frm = child_spec(node, 'from', cc)
    if frm.region is None:
        raise CompileError('(move Select ...): (from ...) needs a region')
    to = child_spec(node, 'to', cc)
    then = compile_then(node, cc)
    decision = cc.decision

    def run(ctx, limit=None):
        out = []
        for f in from_sites(ctx, frm):
            if to.region is None:
                acts = [ActionSelect(site=f, decision=decision)]
                out.append(_pack(ctx, acts, f, f, then))
            else:
                for t in to.region(ctx):
                    ok, extra = eval_to(ctx, to, t)
                    if not ok:
                        continue
                    acts = [ActionSelect(site=f, decision=decision)] + extra
                    out.append(_pack(ctx, acts, f, t, then))
            if limit is not None and len(out) >= limit:
                return out[:limit]
        return out
    return run


def _move_remove(node, cc):
    from ..functions import compile_region
    region = None
    for a in node.positional()[1:]:
        if as_tag(a) in ('Cell', 'Vertex', 'Edge'):
            continue
        region = compile_region(a, cc)
        break
    if region is None:
        raise CompileError('(move Remove ...): missing sites')
    then = compile_then(node, cc)
    decision = cc.decision

    def run(ctx, limit=None):
        out = []
        for s in region(ctx):
            if ctx.is_empty(s):
                continue
            acts = [ActionRemove(site=s, decision=decision)]
            out.append(_pack(ctx, acts, s, s, then))
            if limit is not None and len(out) >= limit:
                return out
        return out
    return run


def _move_promote(node, cc):
    pos = node.positional()[1:]
    site_f = None
    role = None
    for a in pos:
        if isinstance(a, LudNode) and a.label == 'piece':
            continue
        t = as_tag(a)
        if t in ('Mover', 'Next', 'Prev') or (t and t[0] == 'P'
                                              and t[1:].isdigit()):
            role = a
        elif site_f is None and as_tag(a) is None:
            site_f = compile_int(a, cc)
    if site_f is None:
        site_f = lambda ctx: ctx.last_to()
    player = compile_player(role, cc) if role is not None else (
        lambda ctx: ctx.state.mover)
    pn = node.first('piece')
    if pn is None:
        raise CompileError('(move Promote ...): missing (piece ...)')
    names = []
    for a in pn.positional():
        names.extend(flatten_items(a))
    then = compile_then(node, cc)
    decision = cc.decision
    game = cc.game

    def run(ctx, limit=None):
        s = site_f(ctx)
        if s < 0:
            return []
        p = player(ctx)
        out = []
        for nm in names:
            wid = game.piece_id(nm, p) if isinstance(nm, str) else nm
            acts = [ActionPromote(site=s, what=wid, decision=decision)]
            out.append(_pack(ctx, acts, s, s, then))
            if limit is not None and len(out) >= limit:
                return out
        return out
    return run


def _move_pass(node, cc):
    then = compile_then(node, cc)
    decision = cc.decision

    def run(ctx, limit=None):
        return [Move([ActionPass(decision=decision)], mover=ctx.state.mover,
                     then=then)]
    return run


def _move_set(node, cc):
    pos = node.positional()
    kind = as_tag(pos[1]) if len(pos) > 1 else None
    if kind != 'NextPlayer':
        raise CompileError(f'unsupported decision (move Set {kind} ...)')
    player_arg = None
    for a in pos[2:]:
        if isinstance(a, LudNode) and a.label == 'player':
            player_arg = a.positional()[0]
        elif as_tag(a) is not None or isinstance(a, (int, LudNode)):
            player_arg = a
    if player_arg is None:
        raise CompileError('(move Set NextPlayer ...): missing player')
    p = compile_player(player_arg, cc)
    then = compile_then(node, cc)
    decision = cc.decision

    def run(ctx, limit=None):
        return [Move([ActionSetNextPlayer(player=p(ctx), decision=decision)],
                     mover=ctx.state.mover, then=then)]
    return run


def _move_swap(node, cc):
    pos = node.positional()
    if len(pos) < 2 or as_tag(pos[1]) != 'Players':
        raise CompileError('(move Swap ...): only (move Swap Players) works')
    ps = [compile_player(a, cc) for a in pos[2:]] or [
        lambda ctx: 1, lambda ctx: 2]
    then = compile_then(node, cc)
    decision = cc.decision

    def run(ctx, limit=None):
        a = ps[0](ctx)
        b = ps[1](ctx) if len(ps) > 1 else 2
        return [Move([ActionSwapPlayers(p1=a, p2=b, decision=decision)],
                     mover=ctx.state.mover, then=then)]
    return run


def _move_fromto(node, cc):
    # A bare (from) leans on the piece iterator, see from_sites().
    frm = child_spec(node, 'from', cc)
    to = child_spec(node, 'to', cc)
    if to.region is None:
        raise CompileError('(move (from ...) (to ...)): to needs a region')
    then = compile_then(node, cc)
    decision = cc.decision

    def run(ctx, limit=None):
        out = []
        for f in from_sites(ctx, frm):
            for t in to.region(ctx):
                saved = ctx.save_iterators()
                ctx.from_site = f
                ctx.to_site = t
                ok = to.ok(ctx)
                extra = inline_actions(ctx, to.apply) if ok else []
                ctx.restore_iterators(saved)
                if not ok:
                    continue
                acts = extra + [ActionMove(from_site=f, to_site=t,
                                           decision=decision)]
                out.append(_pack(ctx, acts, f, t, then))
                if limit is not None and len(out) >= limit:
                    return out
        return out
    return run


_MOVE_TAGS = {
    'Add': _move_add,
    'Step': _move_step,
    'Slide': _move_slide,
    'Hop': _move_hop,
    'Leap': _move_leap,
    'Shoot': _move_shoot,
    'Select': _move_select,
    'Remove': _move_remove,
    'Promote': _move_promote,
    'Pass': _move_pass,
    'Set': _move_set,
    'Swap': _move_swap,
}
