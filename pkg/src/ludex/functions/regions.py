'''Region-valued rule functions. A region is a list of site indices.'''

from __future__ import annotations

from ..lud import Array
from .base import (CompileError, as_tag, compile_player, role_predicate,
                   skip_site_type, want_node)
from .ints import compile_int


def compile_region(arg, cc):
    if isinstance(arg, Array):
        return _literal(arg, cc)
    if isinstance(arg, int):
        return lambda ctx: [arg]
    if isinstance(arg, str):
        return _by_name(arg, cc)
    node = want_node(arg, 'region expression')
    h = _HANDLERS.get(node.label)
    if h is not None:
        return h(node, cc)
    # Anything integer-valued doubles as a one-site region, e.g. (last To).
    f = compile_int(arg, cc)

    def run(ctx):
        s = f(ctx)
        return [s] if s >= 0 else []
    return run


def _literal(arr, cc):
    fs = []
    for item in arr.items:
        if isinstance(item, str):
            site = cc.game.topo.site_by_label(item)
            fs.append(lambda ctx, s=site: [s])
        else:
            fs.append(compile_region(item, cc))

    def run(ctx):
        out = []
        for f in fs:
            out.extend(f(ctx))
        return out
    return run


def _by_name(name, cc):
    game = cc.game
    if game.has_region(name):
        return lambda ctx: game.region_sites(ctx, name)
    site = game.topo.labels.get(name)
    if site is None:
        raise CompileError(f'unknown region or coordinate {name!r}')
    return lambda ctx: [site]


def _board_sites(ctx):
    return ctx.topo.num_sites


def _sites(node, cc):
    pos = node.positional()
    pos = skip_site_type(pos)
    if pos and isinstance(pos[0], str):
        return _by_name(pos[0], cc)
    if pos and isinstance(pos[0], Array):
        return _literal(pos[0], cc)
    tag = as_tag(pos[0]) if pos else None
    h = _SITES_TAGS.get(tag)
    if h is None:
        raise CompileError(f'unsupported sites form (sites {tag} ...)')
    return h(node, pos[1:], cc)


def _static_set(key):
    def make(node, rest, cc):
        return lambda ctx: list(ctx.topo.sets[key])
    return make


def _sites_empty(node, rest, cc):
    def run(ctx):
        n = _board_sites(ctx)
        return [s for s in range(n) if ctx.is_empty(s)]
    return run


def _sites_occupied(node, rest, cc):
    by = node.named('by')
    pred = role_predicate(by, cc) if by is not None else (lambda ctx, w: w != 0)
    comp = node.named('component')
    roots = None
    if comp is not None:
        if not isinstance(comp, str):
            raise CompileError('(sites Occupied ...): component: expects a name')
        roots = [c.index for c in cc.game.components[1:] if c.root == comp]

    def run(ctx):
        out = []
        for s in range(_board_sites(ctx)):
            w = ctx.what(s)
            if w == 0:
                continue
            if roots is not None and w not in roots:
                continue
            if pred(ctx, ctx.who(s)):
                out.append(s)
        return out
    return run


def _indexed_set(attr):
    def make(node, rest, cc):
        if not rest:
            raise CompileError(f'(sites {attr} ...): missing index')
        f = compile_int(rest[0], cc)

        def run(ctx):
            i = f(ctx)
            sets = getattr(ctx.topo, attr)
            if 0 <= i < len(sets):
                return list(sets[i])
            return []
        return run
    return make


def _sites_around(node, rest, cc):
    base = None
    dir_names = []
    for a in rest:
        t = as_tag(a)
        if t is not None and base is not None:
            dir_names.append(t)
        elif base is None:
            base = compile_region(a, cc)
        else:
            raise CompileError('(sites Around ...): too many arguments')
    if base is None:
        raise CompileError('(sites Around ...): missing centre site')
    cond = None
    if node.has_named('if'):
        from .bools import compile_bool
        cond = compile_bool(node.named('if'), cc)
    include_self = _flag(node, 'includeSelf', False, cc)

    def run(ctx):
        out = set()
        for s in base(ctx):
            if s < 0 or s >= ctx.topo.num_sites:
                continue
            if dir_names:
                pairs = ctx.topo.resolve_directions(dir_names, s)
                cands = [ctx.topo.step(s, w, rel) for rel, w in pairs]
                cands = [c for c in cands if c is not None]
            else:
                cands = ctx.topo.neighbors['Adjacent'][s]
            for c in cands:
                if cond is not None:
                    saved = ctx.save_iterators()
                    ctx.to_site = c
                    ok = cond(ctx)
                    ctx.restore_iterators(saved)
                    if not ok:
                        continue
                out.add(c)
            if include_self:
                out.add(s)
        return sorted(out)
    return run


def _sites_direction(node, rest, cc):
    from_arg = node.named('from')
    if from_arg is None:
        raise CompileError('(sites Direction ...): missing from:')
    f = compile_int(from_arg, cc)
    dir_names = [as_tag(a) for a in rest if as_tag(a) is not None]
    dist = node.named('distance')
    d = compile_int(dist, cc) if dist is not None else None
    stop = None
    if node.has_named('stop'):
        from .bools import compile_bool
        stop = compile_bool(node.named('stop'), cc)
    stop_included = _flag(node, 'stopIncluded', False, cc)

    def run(ctx):
        s = f(ctx)
        if s < 0 or s >= ctx.topo.num_sites:
            return []
        pairs = ctx.topo.resolve_directions(dir_names or ['Adjacent'], s)
        cap = d(ctx) if d is not None else None
        out = []
        for rel, w in pairs:
            ray = ctx.topo.radial(s, w, rel)
            for k, site in enumerate(ray):
                if cap is not None and k >= cap:
                    break
                if stop is not None:
                    saved = ctx.save_iterators()
                    ctx.to_site = site
                    hit = stop(ctx)
                    ctx.restore_iterators(saved)
                    if hit:
                        if stop_included:
                            out.append(site)
                        break
                out.append(site)
        return sorted(set(out))
    return run


def _sites_los(node, rest, cc):
    mode = 'Empty'
    dir_names = []
    for a in rest:
        t = as_tag(a)
        if t in ('Empty', 'Piece', 'Farthest'):
            mode = t
        elif t is not None:
            dir_names.append(t)
    at = node.named('at')
    if at is None:
        raise CompileError('(sites LineOfSight ...): missing at:')
    f = compile_int(at, cc)

    def run(ctx):
        s = f(ctx)
        if s < 0 or s >= ctx.topo.num_sites:
            return []
        pairs = ctx.topo.resolve_directions(dir_names or ['Adjacent'], s)
        out = []
        for rel, w in pairs:
            ray = ctx.topo.radial(s, w, rel)
            last_empty = None
            for site in ray:
                if ctx.is_empty(site):
                    last_empty = site
                    if mode == 'Empty':
                        out.append(site)
                    continue
                if mode == 'Piece':
                    out.append(site)
                break
            if mode == 'Farthest' and last_empty is not None:
                out.append(last_empty)
        return sorted(set(out))
    return run


def _sites_track(node, rest, cc):
    name = None
    player = None
    for a in rest:
        if isinstance(a, str):
            name = a
        elif as_tag(a) is not None:
            player = compile_player(a, cc)
    game = cc.game

    def run(ctx):
        p = player(ctx) if player is not None else ctx.state.mover
        track = game.track_for(p, name)
        out = []
        seen = set()
        for e in track.elems:
            if e >= 0 and e not in seen:
                seen.add(e)
                out.append(e)
        return out
    return run


def _sites_hand(node, rest, cc):
    if not rest:
        raise CompileError('(sites Hand ...): missing player')
    p = compile_player(rest[0], cc)
    game = cc.game

    def run(ctx):
        return game.hand_sites(p(ctx))
    return run


def _sites_last(which):
    def make(node, rest, cc):
        def run(ctx):
            s = ctx.last_from() if which == 'from' else ctx.last_to()
            return [s] if s >= 0 else []
        return run
    return make


def _sites_start(node, rest, cc):
    # Sites filled by the start rules, before any move was played.
    return lambda ctx: sorted(set(ctx.trial.start_placements))


def _sites_group(node, rest, cc):
    at = node.named('at')
    if at is None:
        raise CompileError('(sites Group ...): missing at:')
    f = compile_int(at, cc)
    return lambda ctx: sorted(group_at(ctx, f(ctx)))


def _sites_incident(node, rest, cc):
    # (sites Incident Edge of:Vertex at:<s>) crosses element types; the
    # engine keeps one site type per game, so only same-type incidence
    # (shared edges between cells) is meaningful here.
    raise CompileError('(sites Incident ...) is not supported')


def group_at(ctx, site, relation='Adjacent'):
    """Connected set of same-owner pieces containing site (empty if none)."""
    if site < 0 or site >= ctx.topo.num_sites:
        return set()
    owner = ctx.who(site)
    if owner == 0:
        return set()
    seen = {site}
    frontier = [site]
    while frontier:
        s = frontier.pop()
        for nb in ctx.topo.neighbors[relation][s]:
            if nb not in seen and ctx.who(nb) == owner:
                seen.add(nb)
                frontier.append(nb)
    return seen


def _flag(node, key, default, cc):
    from .base import truthy_flag
    return truthy_flag(node, key, default)


def _difference(node, cc):
    pos = node.positional()
    a = compile_region(pos[0], cc)
    b = compile_region(pos[1], cc)

    def run(ctx):
        drop = set(b(ctx))
        return [s for s in a(ctx) if s not in drop]
    return run


def _union(node, cc):
    pos = node.positional()
    if len(pos) == 1 and isinstance(pos[0], Array):
        fs = [compile_region(a, cc) for a in pos[0].items]
    else:
        fs = [compile_region(a, cc) for a in pos]

    def run(ctx):
        out = set()
        for f in fs:
            out.update(f(ctx))
        return sorted(out)
    return run


def _intersection(node, cc):
    pos = node.positional()
    if len(pos) == 1 and isinstance(pos[0], Array):
        fs = [compile_region(a, cc) for a in pos[0].items]
    else:
        fs = [compile_region(a, cc) for a in pos]

    def run(ctx):
        sets = [set(f(ctx)) for f in fs]
        if not sets:
            return []
        out = sets[0]
        for s in sets[1:]:
            out &= s
        return sorted(out)
    return run


def _expand(node, cc):
    pos = node.positional()
    base = compile_region(pos[0], cc)
    steps_arg = node.named('steps')
    steps = compile_int(steps_arg, cc) if steps_arg is not None else None
    relation = 'Adjacent'
    for a in pos[1:]:
        t = as_tag(a)
        if t in ('Orthogonal', 'Diagonal', 'Adjacent', 'All'):
            relation = t

    def run(ctx):
        out = set(base(ctx))
        for _ in range(steps(ctx) if steps is not None else 1):
            grown = set(out)
            for s in out:
                if 0 <= s < ctx.topo.num_sites:
                    grown.update(ctx.topo.neighbors[relation][s])
            out = grown
        return sorted(out)
    return run


def _foreach(node, cc):
    from .bools import compile_bool
    pos = node.positional()
    base = compile_region(pos[0], cc)
    cond_arg = node.named('if')
    if cond_arg is None:
        raise CompileError('(forEach <region> ...): missing if:')
    cond = compile_bool(cond_arg, cc)

    def run(ctx):
        out = []
        saved = ctx.save_iterators()
        for s in base(ctx):
            ctx.site = s
            if cond(ctx):
                out.append(s)
        ctx.restore_iterators(saved)
        return out
    return run


def _if_region(node, cc):
    from .bools import compile_bool
    pos = node.positional()
    c = compile_bool(pos[0], cc)
    a = compile_region(pos[1], cc)
    b = compile_region(pos[2], cc) if len(pos) > 2 else (lambda ctx: [])
    return lambda ctx: a(ctx) if c(ctx) else b(ctx)


_SITES_TAGS = {
    'Board': _static_set('Board'),
    'All': _static_set('All'),
    'Inner': _static_set('Inner'),
    'Outer': _static_set('Outer'),
    'Perimeter': _static_set('Perimeter'),
    'Corners': _static_set('Corners'),
    'ConcaveCorners': _static_set('ConcaveCorners'),
    'ConvexCorners': _static_set('ConvexCorners'),
    'Top': _static_set('Top'),
    'Bottom': _static_set('Bottom'),
    'Left': _static_set('Left'),
    'Right': _static_set('Right'),
    'Centre': _static_set('Centre'),
    'Empty': _sites_empty,
    'Occupied': _sites_occupied,
    'Row': _indexed_set('row_sets'),
    'Column': _indexed_set('col_sets'),
    'Phase': _indexed_set('phase_sets'),
    'Around': _sites_around,
    'Direction': _sites_direction,
    'LineOfSight': _sites_los,
    'Track': _sites_track,
    'Hand': _sites_hand,
    'LastTo': _sites_last('to'),
    'LastFrom': _sites_last('from'),
    'Start': _sites_start,
    'Group': _sites_group,
    'Incident': _sites_incident,
}

_HANDLERS = {
    'sites': _sites,
    'difference': _difference,
    'union': _union,
    'intersection': _intersection,
    'expand': _expand,
    'forEach': _foreach,
    'if': _if_region,
    'array': lambda n, cc: compile_region(n.positional()[0], cc),
}
