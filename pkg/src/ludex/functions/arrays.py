'''Integer-array rule functions (value lists rather than site sets).'''

from __future__ import annotations

from ..lud import Array
from .base import CompileError, as_tag, role_predicate, want_node
from .ints import compile_int
from .regions import compile_region, group_at


def compile_intarray(arg, cc):
    if isinstance(arg, Array):
        fs = [compile_int(a, cc) for a in arg.items]
        return lambda ctx: [f(ctx) for f in fs]
    node = want_node(arg, 'array expression')
    h = _HANDLERS.get(node.label)
    if h is None:
        # Regions double as arrays of site indices.
        r = compile_region(arg, cc)
        return lambda ctx: list(r(ctx))
    return h(node, cc)


def _values(node, cc):
    tag = as_tag(node.positional()[0]) if node.positional() else None
    if tag != 'Remembered':
        raise CompileError(f'unsupported values form (values {tag})')
    return lambda ctx: list(ctx.state.remembering)


def _results(node, cc):
    from_arg = node.named('from')
    to_arg = node.named('to')
    if from_arg is None or to_arg is None:
        raise CompileError('(results ...): needs from: and to:')
    fr = compile_region(from_arg, cc)
    to = compile_region(to_arg, cc)
    pos = node.positional()
    if not pos:
        raise CompileError('(results ...): missing value expression')
    val = compile_int(pos[0], cc)

    def run(ctx):
        out = []
        saved = ctx.save_iterators()
        for f in fr(ctx):
            for t in to(ctx):
                ctx.from_site = f
                ctx.to_site = t
                out.append(val(ctx))
        ctx.restore_iterators(saved)
        return out
    return run


def _sizes(node, cc):
    pos = node.positional()
    if not pos or as_tag(pos[0]) != 'Group':
        raise CompileError('(sizes ...): only (sizes Group ...) is supported')
    role = pos[1] if len(pos) > 1 else None
    pred = role_predicate(role, cc) if role is not None else (
        lambda ctx, w: w == ctx.state.mover)
    min_arg = node.named('min')
    min_f = compile_int(min_arg, cc) if min_arg is not None else None

    def run(ctx):
        lo = min_f(ctx) if min_f is not None else 0
        out = []
        seen = set()
        for s in range(ctx.topo.num_sites):
            if s in seen:
                continue
            w = ctx.who(s)
            if w == 0 or not pred(ctx, w):
                continue
            grp = group_at(ctx, s)
            seen |= grp
            if len(grp) >= lo:
                out.append(len(grp))
        return sorted(out)
    return run


def _difference(node, cc):
    pos = node.positional()
    a = compile_intarray(pos[0], cc)
    b = compile_intarray(pos[1], cc)

    def run(ctx):
        drop = set(b(ctx))
        return [v for v in a(ctx) if v not in drop]
    return run


_HANDLERS = {
    'values': _values,
    'results': _results,
    'sizes': _sizes,
    'difference': _difference,
    'array': lambda n, cc: compile_intarray(n.positional()[0], cc),
}
