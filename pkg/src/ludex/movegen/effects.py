'''
Effect generators: capture patterns and state edits, usable standalone or
under (then ...). Each compiles to the same fn(ctx, limit) -> [Move] shape as
a decision generator; when a move applies, every generated effect move is
applied, they are consequences rather than choices.
'''

from __future__ import annotations

from dataclasses import dataclass

from ..actions import (Action, ActionAdd, ActionAddScore, ActionForget,
                       ActionMove, ActionMoveAgain, ActionPass, ActionPromote,
                       ActionRemember, ActionRemove, ActionRoll,
                       ActionSetCount, ActionSetNextPlayer, ActionSetPending,
                       ActionSetRotation, ActionSetScore, ActionSetState,
                       ActionSetValue, ActionSetVar, ActionStoreState,
                       ActionTrigger, Move)
from ..board.directions import opposite
from ..context import OFF
from ..functions import (CompileError, compile_bool, compile_int,
                         compile_player, compile_region)
from ..functions.base import as_tag, truthy_flag
from ..lud import LudNode
from .core import (child_spec, compile_moves, compile_then, direction_names,
                   effect_mode, inline_actions)


@dataclass(frozen=True)
class _SetCounter(Action):
    value: int = -1

    def apply(self, ctx):
        ctx.state.counter = self.value


def _one(ctx, actions, f=OFF, t=OFF, then=()):
    return [Move(actions, from_site=f, to_site=t, mover=ctx.state.mover,
                 then=then)]


def _anchor(ctx, spec):
    """Effect anchor site: declared (from ...), else the running from
    iterator, else where the last move landed."""
    if spec.region is not None:
        sites = spec.region(ctx)
        return sites[0] if sites else OFF
    if ctx.from_site >= 0:
        return ctx.from_site
    return ctx.last_to()


def _enemy_at(ctx, s):
    w = ctx.who(s)
    return w != 0 and w != ctx.state.mover


def _friend_at(ctx, s):
    return ctx.who(s) == ctx.state.mover


def _eval_at(ctx, spec, field, site, default):
    """Condition + apply of a spec with one iterator bound to `site`."""
    saved = ctx.save_iterators()
    setattr(ctx, field, site)
    if spec.cond is not None:
        ok = spec.cond(ctx)
    else:
        ok = default(ctx, site)
    acts = inline_actions(ctx, spec.apply) if ok else []
    ctx.restore_iterators(saved)
    return ok, acts


# -- movement effects ---------------------------------------------------------

def _from_to(node, cc):
    frm = child_spec(node, 'from', cc)
    to = child_spec(node, 'to', cc)
    if to.region is None:
        raise CompileError('(fromTo ...): (to ...) needs a site')
    count_f = None
    if node.has_named('count'):
        count_f = compile_int(node.named('count'), cc)
    then = compile_then(node, cc)
    dec = cc.decision

    def run(ctx, limit=None):
        if frm.region is not None:
            starts = frm.region(ctx)
        elif ctx.from_site >= 0:
            starts = [ctx.from_site]
        else:
            starts = []
        out = []
        for f in starts:
            saved = ctx.save_iterators()
            ctx.from_site = f
            if not frm.ok(ctx):
                ctx.restore_iterators(saved)
                continue
            targets = to.region(ctx)
            ctx.restore_iterators(saved)
            for t in targets:
                saved = ctx.save_iterators()
                ctx.from_site = f
                ctx.to_site = t
                ok = to.ok(ctx)
                extra = inline_actions(ctx, to.apply) if ok else []
                ctx.restore_iterators(saved)
                if not ok:
                    continue
                if count_f is not None:
                    saved = ctx.save_iterators()
                    ctx.from_site = f
                    ctx.to_site = t
                    n = count_f(ctx)
                    ctx.restore_iterators(saved)
                    have = ctx.count(f)
                    if ctx.is_empty(f) or n <= 0:
                        continue
                    n = min(n, have)
                    acts = extra + [
                        ActionSetCount(site=f, count=have - n),
                        ActionAdd(site=t, what=ctx.what(f), count=n,
                                  decision=dec)]
                else:
                    acts = extra + [ActionMove(from_site=f, to_site=t,
                                               decision=dec)]
                out.append(Move(acts, from_site=f, to_site=t,
                                mover=ctx.state.mover, then=then))
                if limit is not None and len(out) >= limit:
                    return out
        return out
    return run


def _add(node, cc):
    from .decisions import _piece_ids
    what = _piece_ids(node, cc)
    to = child_spec(node, 'to', cc)
    if to.region is None:
        raise CompileError('(add ...): (to ...) needs a site')
    count_f = None
    if node.has_named('count'):
        count_f = compile_int(node.named('count'), cc)
    then = compile_then(node, cc)
    dec = cc.decision

    def run(ctx, limit=None):
        out = []
        for w in what(ctx):
            for t in to.region(ctx):
                saved = ctx.save_iterators()
                ctx.to_site = t
                ok = to.ok(ctx)
                extra = inline_actions(ctx, to.apply) if ok else []
                n = count_f(ctx) if count_f is not None else 1
                ctx.restore_iterators(saved)
                if not ok:
                    continue
                acts = [ActionAdd(site=t, what=w, count=n, decision=dec)]
                out.append(Move(acts + extra, from_site=t, to_site=t,
                                mover=ctx.state.mover, then=then))
                if limit is not None and len(out) >= limit:
                    return out
        return out
    return run


def _remove(node, cc):
    region = None
    for a in node.positional():
        # Skip site-type qualifiers; iterator refs like (between) are sites.
        if as_tag(a) in ('Cell', 'Vertex', 'Edge'):
            continue
        region = compile_region(a, cc)
        break
    if region is None:
        raise CompileError('(remove ...): missing sites')
    count_f = None
    if node.has_named('count'):
        count_f = compile_int(node.named('count'), cc)
    then = compile_then(node, cc)
    dec = cc.decision

    def run(ctx, limit=None):
        out = []
        for s in region(ctx):
            if s < 0 or ctx.is_empty(s):
                continue
            n = 1
            if count_f is not None:
                saved = ctx.save_iterators()
                ctx.to_site = s
                n = min(count_f(ctx), ctx.count(s))
                ctx.restore_iterators(saved)
            if n <= 0:
                continue
            acts = [ActionRemove(site=s, decision=dec)]
            acts += [ActionRemove(site=s) for _ in range(n - 1)]
            out.append(Move(acts, from_site=s, to_site=s,
                            mover=ctx.state.mover, then=then))
            if limit is not None and len(out) >= limit:
                return out
        return out
    return run


def _flip(node, cc):
    pos = node.positional()
    site_f = compile_int(pos[0], cc) if pos else None
    game = cc.game
    then = compile_then(node, cc)

    def run(ctx, limit=None):
        if site_f is not None:
            s = site_f(ctx)
        elif ctx.between >= 0:
            s = ctx.between
        else:
            s = ctx.last_to()
        if s < 0 or ctx.is_empty(s):
            return []
        w = ctx.what(s)
        owner = game.components[w].owner
        if owner in (1, 2):
            flipped = game.counterpart(w, 3 - owner)
            if flipped == w:
                return []
            return _one(ctx, [ActionPromote(site=s, what=flipped)], s, s,
                        then)
        return []
    return run


def _push(node, cc):
    frm = child_spec(node, 'from', cc)
    dirs = direction_names(node.positional()) or ['Adjacent']
    then = compile_then(node, cc)

    def run(ctx, limit=None):
        f = _anchor(ctx, frm)
        if f < 0 or ctx.is_empty(f):
            return []
        acts = []
        for rel, w in ctx.topo.resolve_directions(dirs, f):
            ray = ctx.topo.radial(f, w, rel)
            run_sites = [f]
            for s in ray:
                if ctx.is_empty(s):
                    break
                run_sites.append(s)
            # Shift farthest first so nothing lands on a still-occupied site;
            # the lead piece falls off the board when the ray ends.
            for i in reversed(range(len(run_sites))):
                if i < len(ray):
                    acts.append(ActionMove(from_site=run_sites[i],
                                           to_site=ray[i]))
                else:
                    acts.append(ActionRemove(site=run_sites[i]))
        if not acts:
            return []
        return _one(ctx, acts, f, f, then)
    return run


def _attract(node, cc):
    frm = child_spec(node, 'from', cc)
    dirs = direction_names(node.positional()) or ['Adjacent']
    then = compile_then(node, cc)

    def run(ctx, limit=None):
        f = _anchor(ctx, frm)
        if f < 0:
            return []
        acts = []
        for rel, w in ctx.topo.resolve_directions(dirs, f):
            ray = ctx.topo.radial(f, w, rel)
            occupied = [s for s in ray if not ctx.is_empty(s)]
            for src, dst in zip(occupied, ray):
                if src != dst:
                    acts.append(ActionMove(from_site=src, to_site=dst))
        if not acts:
            return []
        return _one(ctx, acts, f, f, then)
    return run


# -- capture patterns ---------------------------------------------------------

def _custodial(node, cc):
    frm = child_spec(node, 'from', cc)
    dirs = direction_names(node.positional()) or ['Adjacent']
    between = child_spec(node, 'between', cc)
    to = child_spec(node, 'to', cc)
    then = compile_then(node, cc)

    def run(ctx, limit=None):
        f = _anchor(ctx, frm)
        if f < 0:
            return []
        cap = None
        if between.max is not None:
            cap = between.max(ctx)
        acts = []
        for rel, w in ctx.topo.resolve_directions(dirs, f):
            ray = ctx.topo.radial(f, w, rel)
            flanked = []
            flanker = None
            for s in ray:
                saved = ctx.save_iterators()
                ctx.from_site = f
                ctx.between = s
                inside = (between.cond(ctx) if between.cond is not None
                          else _enemy_at(ctx, s))
                ctx.restore_iterators(saved)
                if inside:
                    flanked.append(s)
                else:
                    flanker = s
                    break
            if not flanked or flanker is None:
                continue
            if cap is not None and len(flanked) > cap:
                continue
            saved = ctx.save_iterators()
            ctx.from_site = f
            ctx.to_site = flanker
            closes = (to.cond(ctx) if to.cond is not None
                      else _friend_at(ctx, flanker))
            ctx.restore_iterators(saved)
            if not closes:
                continue
            for b in flanked:
                ok, got = _eval_at(ctx, between, 'between', b,
                                   lambda c, s: True)
                acts.extend(got)
        if not acts:
            return []
        return _one(ctx, acts, f, f, then)
    return run


def _enclose(node, cc):
    frm = child_spec(node, 'from', cc)
    dirs = direction_names(node.positional()) or ['Adjacent']
    between = child_spec(node, 'between', cc)
    if between.cond is None:
        raise CompileError('(enclose ...): (between if:...) is required')
    then = compile_then(node, cc)

    def neighbors(ctx, s):
        out = []
        for rel, w in ctx.topo.resolve_directions(dirs, s):
            t = ctx.topo.step(s, w, rel)
            if t is not None:
                out.append(t)
        return out

    def inside(ctx, s):
        saved = ctx.save_iterators()
        ctx.between = s
        ok = between.cond(ctx)
        ctx.restore_iterators(saved)
        return ok

    def run(ctx, limit=None):
        f = _anchor(ctx, frm)
        if f < 0:
            return []
        acts = []
        seen = set()
        for n in neighbors(ctx, f):
            if n in seen or not inside(ctx, n):
                continue
            comp = {n}
            stack = [n]
            free = False
            while stack:
                x = stack.pop()
                for y in neighbors(ctx, x):
                    if y in comp:
                        continue
                    if inside(ctx, y):
                        comp.add(y)
                        stack.append(y)
                    elif ctx.is_empty(y):
                        free = True
            seen |= comp
            if free:
                continue
            for s in sorted(comp):
                ok, got = _eval_at(ctx, between, 'between', s,
                                   lambda c, x: True)
                acts.extend(got)
        if not acts:
            return []
        return _one(ctx, acts, f, f, then)
    return run


def _intervene(node, cc):
    frm = child_spec(node, 'from', cc)
    dirs = direction_names(node.positional()) or ['Adjacent']
    between = child_spec(node, 'between', cc)
    to = child_spec(node, 'to', cc)
    then = compile_then(node, cc)

    def side_run(ctx, f, ray, cap):
        got = []
        for s in ray:
            saved = ctx.save_iterators()
            ctx.from_site = f
            ctx.to_site = s
            ok = to.cond(ctx) if to.cond is not None else _enemy_at(ctx, s)
            ctx.restore_iterators(saved)
            if not ok:
                break
            got.append(s)
            if len(got) >= cap:
                break
        return got

    def run(ctx, limit=None):
        f = _anchor(ctx, frm)
        if f < 0:
            return []
        cap = between.max(ctx) if between.max is not None else 1
        acts = []
        done = set()
        for rel, w in ctx.topo.resolve_directions(dirs, f):
            ow = opposite(w)
            key = (rel, frozenset((w, ow)))
            if key in done:
                continue
            done.add(key)
            a = side_run(ctx, f, ctx.topo.radial(f, w, rel), cap)
            b = side_run(ctx, f, ctx.topo.radial(f, ow, rel), cap)
            if not a or not b:
                continue
            for s in a + b:
                ok, got = _eval_at(ctx, to, 'to_site', s,
                                   lambda c, x: True)
                acts.extend(got)
        if not acts:
            return []
        return _one(ctx, acts, f, f, then)
    return run


def _surround(node, cc):
    frm = child_spec(node, 'from', cc)
    dirs = direction_names(node.positional()) or ['Adjacent']
    between = child_spec(node, 'between', cc)
    to = child_spec(node, 'to', cc)
    then = compile_then(node, cc)

    def run(ctx, limit=None):
        f = _anchor(ctx, frm)
        if f < 0:
            return []
        acts = []
        for rel, w in ctx.topo.resolve_directions(dirs, f):
            b = ctx.topo.step(f, w, rel)
            if b is None:
                continue
            saved = ctx.save_iterators()
            ctx.from_site = f
            ctx.between = b
            target = (between.cond(ctx) if between.cond is not None
                      else _enemy_at(ctx, b))
            ctx.restore_iterators(saved)
            if not target:
                continue
            ring = []
            for rel2, w2 in ctx.topo.resolve_directions(dirs, b):
                t = ctx.topo.step(b, w2, rel2)
                if t is not None:
                    ring.append(t)
            if not ring:
                continue
            closed = True
            for t in ring:
                saved = ctx.save_iterators()
                ctx.from_site = f
                ctx.between = b
                ctx.to_site = t
                ok = (to.cond(ctx) if to.cond is not None
                      else _friend_at(ctx, t))
                ctx.restore_iterators(saved)
                if not ok:
                    closed = False
                    break
            if not closed:
                continue
            ok, got = _eval_at(ctx, between, 'between', b, lambda c, x: True)
            acts.extend(got)
        if not acts:
            return []
        return _one(ctx, acts, f, f, then)
    return run


def _direction_capture(node, cc):
    frm = child_spec(node, 'from', cc)
    to = child_spec(node, 'to', cc)
    reverse = truthy_flag(node, 'opposite', False)
    then = compile_then(node, cc)

    def move_wind(ctx):
        lf, lt = ctx.last_from(), ctx.last_to()
        if lf < 0 or lt < 0 or lf == lt:
            return None, None
        best = None
        for w in ctx.topo.supported_winds(lf, 'Adjacent'):
            ray = ctx.topo.radial(lf, w, 'Adjacent')
            if lt in ray:
                idx = ray.index(lt)
                if best is None or idx < best[1]:
                    best = (w, idx)
        return (best[0], 'Adjacent') if best else (None, None)

    def run(ctx, limit=None):
        w, rel = move_wind(ctx)
        if w is None:
            return []
        if reverse:
            w = opposite(w)
        f = _anchor(ctx, frm)
        if f < 0:
            return []
        acts = []
        for s in ctx.topo.radial(f, w, rel):
            ok, got = _eval_at(ctx, to, 'to_site', s, _enemy_at)
            if not ok:
                break
            acts.extend(got)
        if not acts:
            return []
        return _one(ctx, acts, f, f, then)
    return run


# -- sowing -------------------------------------------------------------------

def _sow(node, cc):
    track_name = None
    start_f = None
    for a in node.positional():
        if isinstance(a, str):
            track_name = a
        elif start_f is None and as_tag(a) is None:
            start_f = compile_int(a, cc)
    count_f = None
    if node.has_named('count'):
        count_f = compile_int(node.named('count'), cc)
    per_f = None
    if node.has_named('numPerHole'):
        per_f = compile_int(node.named('numPerHole'), cc)
    cond = None
    if node.has_named('if'):
        cond = compile_bool(node.named('if'), cc)
    skip = None
    if node.has_named('skipIf'):
        skip = compile_bool(node.named('skipIf'), cc)
    apply_f = None
    if node.has_named('apply'):
        with effect_mode(cc):
            apply_f = compile_moves(node.named('apply'), cc)
    include_self = truthy_flag(node, 'includeSelf', True)
    origin = truthy_flag(node, 'origin', False)
    backtracking = truthy_flag(node, 'backtracking', False)
    game = cc.game
    then = compile_then(node, cc)

    def run(ctx, limit=None):
        start = start_f(ctx) if start_f is not None else ctx.last_to()
        if start < 0 or ctx.is_empty(start):
            return []
        n = count_f(ctx) if count_f is not None else ctx.count(start)
        if n <= 0:
            return []
        per = per_f(ctx) if per_f is not None else 1
        track = game.track_for(ctx.state.mover, track_name)
        seed = ctx.what(start)
        # Simulate on a scratch copy: the final-hole condition and any
        # backtracking read post-sowing counts, and the caller replays the
        # recorded actions on the real state.
        probe = ctx.copy()
        acts = [ActionSetCount(site=start, count=0)]
        acts[0].apply(probe)
        landed = []

        def drop(site, k):
            a = ActionAdd(site=site, what=seed, count=k)
            a.apply(probe)
            acts.append(a)
            landed.append(site)

        if origin:
            k = min(per, n)
            drop(start, k)
            n -= k
        cur = start
        fuel = 4 * (n + len(track.elems) + 4)
        while n > 0 and fuel > 0:
            fuel -= 1
            cur = track.walk(cur, 1)
            if cur < 0:
                break
            if cur == start and not include_self:
                continue
            if skip is not None:
                saved = probe.save_iterators()
                probe.to_site = cur
                skipped = skip(probe)
                probe.restore_iterators(saved)
                if skipped:
                    continue
            k = min(per, n)
            drop(cur, k)
            n -= k
        if landed:
            idx = len(landed) - 1
            while idx >= 0:
                s = landed[idx]
                saved = probe.save_iterators()
                probe.to_site = s
                ok = cond is None or cond(probe)
                if ok and apply_f is not None:
                    for mv in apply_f(probe):
                        for a in mv.actions:
                            a.apply(probe)
                            acts.append(a)
                probe.restore_iterators(saved)
                if not ok or not backtracking:
                    break
                idx -= 1
        last = landed[-1] if landed else start
        return _one(ctx, acts, start, last, then)
    return run


# -- scalar effects -----------------------------------------------------------

def _roll(node, cc):
    def run(ctx, limit=None):
        return _one(ctx, [ActionRoll()])
    return run


def _add_score(node, cc):
    pos = [a for a in node.positional()]
    pairs = []
    i = 0
    while i + 1 < len(pos):
        pairs.append((compile_player(pos[i], cc), compile_int(pos[i + 1], cc)))
        i += 2
    if not pairs:
        raise CompileError('(addScore ...): needs player and amount')

    def run(ctx, limit=None):
        acts = [ActionAddScore(player=p(ctx), amount=a(ctx))
                for p, a in pairs]
        return _one(ctx, acts)
    return run


def _move_again(node, cc):
    def run(ctx, limit=None):
        return _one(ctx, [ActionMoveAgain()])
    return run


def _pass_effect(node, cc):
    dec = cc.decision

    def run(ctx, limit=None):
        return _one(ctx, [ActionPass(decision=dec)])
    return run


def _set(node, cc):
    pos = node.positional()
    kind = as_tag(pos[0]) if pos else None
    rest = pos[1:]
    if kind == 'NextPlayer':
        arg = rest[0]
        if isinstance(arg, LudNode) and arg.label == 'player' and arg.args:
            arg = arg.positional()[0]
        p = compile_player(arg, cc)
        return lambda ctx, limit=None: _one(
            ctx, [ActionSetNextPlayer(player=p(ctx))])
    if kind == 'Score':
        p = compile_player(rest[0], cc)
        v = compile_int(rest[1], cc)
        return lambda ctx, limit=None: _one(
            ctx, [ActionSetScore(player=p(ctx), amount=v(ctx))])
    if kind in ('State', 'Value', 'Count', 'Rotation'):
        at = compile_int(node.named('at'), cc) if node.has_named('at') else \
            (lambda ctx: ctx.to_site if ctx.to_site >= 0 else ctx.last_to())
        v = compile_int(rest[0], cc) if rest else (lambda ctx: 0)

        def run(ctx, limit=None):
            s = at(ctx)
            if s < 0:
                return []
            val = v(ctx)
            if kind == 'State':
                return _one(ctx, [ActionSetState(site=s, state=val)])
            if kind == 'Count':
                return _one(ctx, [ActionSetCount(site=s, count=val)])
            if kind == 'Rotation':
                return _one(ctx, [ActionSetRotation(site=s, rotation=val)])
            return _one(ctx, [ActionSetValue(site=s, value=val)])
        return run
    if kind == 'Counter':
        v = compile_int(rest[0], cc) if rest else (lambda ctx: -1)

        def run(ctx, limit=None):
            return _one(ctx, [_SetCounter(value=v(ctx))])
        return run
    if kind == 'Var':
        name = rest[0] if rest and isinstance(rest[0], str) else ''
        v = compile_int(rest[1], cc) if len(rest) > 1 else (lambda ctx: OFF)
        return lambda ctx, limit=None: _one(
            ctx, [ActionSetVar(name=name, value=v(ctx))])
    if kind == 'Pending':
        v = compile_int(rest[0], cc) if rest else (lambda ctx: 1)
        return lambda ctx, limit=None: _one(
            ctx, [ActionSetPending(value=v(ctx))])
    raise CompileError(f'unsupported set form (set {kind} ...)')


def _remember(node, cc):
    pos = node.positional()
    if not pos or as_tag(pos[0]) != 'Value':
        raise CompileError('(remember ...): only (remember Value ...) works')
    v = compile_int(pos[1], cc)
    unique = truthy_flag(node, 'unique', False)

    def run(ctx, limit=None):
        val = v(ctx)
        if unique and val in ctx.state.remembering:
            return []
        return _one(ctx, [ActionRemember(value=val)])
    return run


def _forget(node, cc):
    pos = node.positional()
    if not pos or as_tag(pos[0]) != 'Value':
        raise CompileError('(forget ...): only (forget Value ...) works')
    if len(pos) > 1 and as_tag(pos[1]) == 'All':
        return lambda ctx, limit=None: _one(
            ctx, [ActionForget(everything=True)])
    v = compile_int(pos[1], cc)
    return lambda ctx, limit=None: _one(ctx, [ActionForget(value=v(ctx))])


def _trigger(node, cc):
    pos = node.positional()
    event = pos[0] if pos and isinstance(pos[0], str) else ''
    p = compile_player(pos[1], cc) if len(pos) > 1 else (
        lambda ctx: ctx.state.mover)
    return lambda ctx, limit=None: _one(
        ctx, [ActionTrigger(event=event, player=p(ctx))])


def _store_state(node, cc):
    return lambda ctx, limit=None: _one(ctx, [ActionStoreState()])


HEADS = {
    'fromTo': _from_to,
    'add': _add,
    'remove': _remove,
    'flip': _flip,
    'push': _push,
    'attract': _attract,
    'custodial': _custodial,
    'enclose': _enclose,
    'intervene': _intervene,
    'surround': _surround,
    'directionCapture': _direction_capture,
    'sow': _sow,
    'roll': _roll,
    'addScore': _add_score,
    'moveAgain': _move_again,
    'pass': _pass_effect,
    'set': _set,
    'remember': _remember,
    'forget': _forget,
    'trigger': _trigger,
    'storeState': _store_state,
}
