'''Integer-valued rule functions.'''

from __future__ import annotations

from fractions import Fraction

from ..context import OFF
from ..lud import Array
from .base import (CompileError, as_tag, compile_player, const, role_predicate,
                   skip_site_type, want_node)


def compile_int(arg, cc):
    if isinstance(arg, bool):
        raise CompileError(f'expected an integer expression, got {arg!r}')
    if isinstance(arg, int):
        return const(arg)
    if isinstance(arg, Fraction):
        if arg.denominator != 1:
            raise CompileError(f'non-integer constant {arg} in integer position')
        return const(int(arg))
    node = want_node(arg, 'integer expression')
    h = _HANDLERS.get(node.label)
    if h is None:
        raise CompileError(f'unsupported integer ludeme ({node.label} ...)')
    return h(node, cc)


def _ints(args, cc):
    return [compile_int(a, cc) for a in args]


def _spread(node, cc):
    """Arguments of arithmetic: either varargs or one array literal."""
    pos = node.positional()
    if len(pos) == 1 and isinstance(pos[0], Array):
        pos = pos[0].items
    return _ints(pos, cc)


def _add(node, cc):
    fs = _spread(node, cc)
    return lambda ctx: sum(f(ctx) for f in fs)


def _sub(node, cc):
    pos = node.positional()
    if len(pos) == 1:
        f = compile_int(pos[0], cc)
        return lambda ctx: -f(ctx)
    a, b = compile_int(pos[0], cc), compile_int(pos[1], cc)
    return lambda ctx: a(ctx) - b(ctx)


def _mul(node, cc):
    fs = _spread(node, cc)

    def run(ctx):
        out = 1
        for f in fs:
            out *= f(ctx)
        return out
    return run


def _div(node, cc):
    a, b = _ints(node.positional()[:2], cc)

    def run(ctx):
        d = b(ctx)
        if d == 0:
            raise ZeroDivisionError('division by zero in rule')
        q = a(ctx) // d
        # Truncate toward zero, matching conventional integer division.
        if q < 0 and q * d != a(ctx):
            q += 1
        return q
    return run


def _mod(node, cc):
    a, b = _ints(node.positional()[:2], cc)
    return lambda ctx: a(ctx) % b(ctx)


def _pow(node, cc):
    a, b = _ints(node.positional()[:2], cc)
    return lambda ctx: a(ctx) ** b(ctx)


def _min(node, cc):
    fs = _spread(node, cc)
    return lambda ctx: min(f(ctx) for f in fs)


def _max(node, cc):
    fs = _spread(node, cc)
    return lambda ctx: max(f(ctx) for f in fs)


def _abs(node, cc):
    f = compile_int(node.positional()[0], cc)
    return lambda ctx: abs(f(ctx))


def _if(node, cc):
    from .bools import compile_bool
    pos = node.positional()
    c = compile_bool(pos[0], cc)
    a = compile_int(pos[1], cc)
    b = compile_int(pos[2], cc) if len(pos) > 2 else const(OFF)
    return lambda ctx: a(ctx) if c(ctx) else b(ctx)


def _site_arg(node, cc, key='at'):
    v = node.named(key)
    if v is None:
        pos = skip_site_type(node.positional())
        if not pos:
            raise CompileError(f'({node.label} ...): missing {key}: site')
        v = pos[0]
    return compile_int(v, cc)


def _what(node, cc):
    s = _site_arg(node, cc)
    return lambda ctx: ctx.what(s(ctx))


def _who(node, cc):
    s = _site_arg(node, cc)
    return lambda ctx: ctx.who(s(ctx))


def _state(node, cc):
    if not node.args:
        return lambda ctx: ctx.state_at(ctx.site if ctx.site != OFF else ctx.to_site)
    s = _site_arg(node, cc)
    return lambda ctx: ctx.state_at(s(ctx))


def _count(node, cc):
    pos = node.positional()
    tag = as_tag(pos[0]) if pos else None
    if node.has_named('at'):
        s = _site_arg(node, cc)
        return lambda ctx: ctx.count(s(ctx))
    if tag == 'Moves':
        return lambda ctx: ctx.trial.num_moves()
    if tag == 'Turns':
        return lambda ctx: ctx.state.num_turn + 1
    if tag == 'MovesThisTurn':
        return lambda ctx: ctx.state.num_turn_same_player
    if tag == 'Players':
        return lambda ctx: ctx.game.num_players
    if tag == 'Rows':
        return lambda ctx: ctx.topo.num_rows
    if tag == 'Columns':
        return lambda ctx: ctx.topo.num_cols
    if tag == 'Cells':
        return lambda ctx: len(ctx.topo.graph.faces)
    if tag == 'Vertices':
        return lambda ctx: len(ctx.topo.graph.vertices)
    if tag == 'Edges':
        return lambda ctx: len(ctx.topo.graph.edges)
    if tag == 'Pips':
        return lambda ctx: sum(ctx.state.current_dice)
    if tag == 'Sites':
        from .regions import compile_region
        reg = node.named('in')
        if reg is None:
            reg = pos[1] if len(pos) > 1 else None
        if reg is None:
            raise CompileError('(count Sites ...): missing region')
        r = compile_region(reg, cc)
        return lambda ctx: len(r(ctx))
    if tag == 'Pieces':
        return _count_pieces(node, pos[1:], cc)
    raise CompileError(f'unsupported count form (count {tag} ...)')


def _count_pieces(node, rest, cc):
    from .regions import compile_region
    pred = lambda ctx, who: True
    whats = None
    for a in rest:
        t = as_tag(a)
        if isinstance(a, str):
            whats = [c.index for c in cc.game.components[1:] if c.root == a]
        elif t is not None:
            pred = role_predicate(a, cc)
    reg = node.named('in')
    r = compile_region(reg, cc) if reg is not None else None

    def run(ctx):
        sites = r(ctx) if r is not None else range(ctx.game.total_sites)
        total = 0
        for s in sites:
            w = ctx.what(s)
            if w == 0:
                continue
            if whats is not None and w not in whats:
                continue
            if not pred(ctx, ctx.who(s)):
                continue
            total += ctx.count(s)
        return total
    return run


def _score(node, cc):
    p = compile_player(node.positional()[0], cc)
    return lambda ctx: ctx.state.scores[p(ctx)]


def _var(node, cc):
    pos = node.positional()
    name = pos[0] if pos and isinstance(pos[0], str) else ''
    return lambda ctx: ctx.state.value_map.get(name, OFF)


def _last(node, cc):
    tag = as_tag(node.positional()[0]) if node.positional() else None
    if tag == 'From':
        return lambda ctx: ctx.last_from()
    if tag == 'To':
        return lambda ctx: ctx.last_to()
    raise CompileError(f'unsupported last form (last {tag})')


def _map_entry(node, cc):
    pos = node.positional()
    name = None
    key_arg = None
    for a in pos:
        if isinstance(a, str):
            name = a
        else:
            key_arg = a
    if key_arg is None:
        raise CompileError('(mapEntry ...): missing key')
    # keys are most often roles (P1, Mover); plain ints still work
    k = compile_player(key_arg, cc)
    game = cc.game

    def run(ctx):
        m = game.map_named(name)
        key = k(ctx)
        if key not in m:
            raise KeyError(f'map has no entry for {key}')
        return m[key]
    return run


def _track_site(node, cc):
    pos = node.positional()
    if not pos or as_tag(pos[0]) != 'Move':
        raise CompileError('(trackSite ...): only the Move form is supported')
    name = None
    for a in pos[1:]:
        if isinstance(a, str):
            name = a
    from_arg = node.named('from')
    steps_arg = node.named('steps')
    f = compile_int(from_arg, cc) if from_arg is not None else None
    s = compile_int(steps_arg, cc) if steps_arg is not None else const(1)
    game = cc.game

    def run(ctx):
        track = game.track_for(ctx.state.mover, name)
        start = f(ctx) if f is not None else ctx.from_site
        return track.walk(start, s(ctx))
    return run


def _hand_site(node, cc):
    pos = node.positional()
    p = compile_player(pos[0], cc)
    idx = compile_int(pos[1], cc) if len(pos) > 1 else const(0)
    game = cc.game

    def run(ctx):
        return game.hand_offset(p(ctx)) + idx(ctx)
    return run


def _coord(node, cc):
    pos = node.positional()
    label = pos[0] if pos and isinstance(pos[0], str) else None
    if label is None:
        raise CompileError('(coord ...): missing label')
    site = cc.game.topo.site_by_label(label)
    return const(site)


def _id(node, cc):
    pos = node.positional()
    name = None
    role = None
    for a in pos:
        if isinstance(a, str):
            name = a
        else:
            role = a
    if name is None:
        raise CompileError('(id ...): missing piece name')
    p = compile_player(role, cc) if role is not None else _ROLE_MOVER
    game = cc.game
    return lambda ctx: game.piece_id(name, p(ctx))


_ROLE_MOVER = lambda ctx: ctx.state.mover


def _where(node, cc):
    pos = node.positional()
    name = None
    role = None
    for a in pos:
        if isinstance(a, str):
            name = a
        elif as_tag(a) is not None:
            role = a
    p = compile_player(role, cc) if role is not None else _ROLE_MOVER
    game = cc.game

    def run(ctx):
        who = p(ctx)
        wanted = game.piece_id(name, who) if name else None
        for s in range(game.total_sites):
            w = ctx.what(s)
            if w == 0:
                continue
            if wanted is not None:
                if w == wanted:
                    return s
            elif ctx.who(s) == who:
                return s
        return OFF
    return run


def _row_col_phase(which):
    def make(node, cc):
        s = _site_arg(node, cc, key='of')

        def run(ctx):
            site = s(ctx)
            topo = ctx.topo
            if not (0 <= site < topo.num_sites):
                return OFF
            if which == 'row':
                return topo.rows_of[site]
            if which == 'col':
                return topo.cols_of[site]
            return topo.site_phases[site]
        return run
    return make


def _size(node, cc):
    pos = node.positional()
    tag = as_tag(pos[0]) if pos else None
    if tag == 'Group':
        s = _site_arg(node, cc)
        from .regions import group_at
        return lambda ctx: len(group_at(ctx, s(ctx)))
    if tag == 'Array':
        from .arrays import compile_intarray
        arr = compile_intarray(node.positional()[1], cc)
        return lambda ctx: len(arr(ctx))
    raise CompileError(f'unsupported size form (size {tag} ...)')


def _centre_point(node, cc):
    return lambda ctx: ctx.topo.sets['Centre'][0]


_HANDLERS = {
    '+': _add, '-': _sub, '*': _mul, '/': _div, '%': _mod, '^': _pow,
    'min': _min, 'max': _max, 'abs': _abs, 'if': _if,
    'what': _what, 'who': _who, 'state': _state, 'count': _count,
    'score': _score, 'var': _var, 'last': _last, 'mapEntry': _map_entry,
    'trackSite': _track_site, 'handSite': _hand_site, 'coord': _coord,
    'id': _id, 'where': _where, 'size': _size, 'centrePoint': _centre_point,
    'row': _row_col_phase('row'), 'column': _row_col_phase('col'),
    'phase': _row_col_phase('phase'),
    'mover': lambda n, cc: lambda ctx: ctx.state.mover,
    'next': lambda n, cc: lambda ctx: ctx.state.next,
    'prev': lambda n, cc: lambda ctx: ctx.state.prev,
    'counter': lambda n, cc: lambda ctx: ctx.state.counter,
    'from': lambda n, cc: lambda ctx: ctx.from_site,
    'to': lambda n, cc: lambda ctx: ctx.to_site,
    'between': lambda n, cc: lambda ctx: ctx.between,
    'site': lambda n, cc: lambda ctx: ctx.site,
    'player': lambda n, cc: lambda ctx: ctx.player,
    'value': lambda n, cc: lambda ctx: ctx.value,
    'level': lambda n, cc: lambda ctx: ctx.level,
    'pips': lambda n, cc: lambda ctx: ctx.die,
    'hint': lambda n, cc: lambda ctx: ctx.hint,
}
