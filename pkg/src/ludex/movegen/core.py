'''
Move-generator compilation plumbing.

Every generator compiles to fn(ctx, limit=None) -> list[Move]. Decision
generators mark their key action decision=True only while the compile
context is in decision mode; anything compiled under (then ...) or an
(apply ...) wrapper is an effect.
'''

from __future__ import annotations

from contextlib import contextmanager

from ..functions import CompileError
from ..functions.base import as_tag, want_node
from ..lud import Array, LudNode


@contextmanager
def effect_mode(cc):
    old = cc.decision
    cc.decision = False
    try:
        yield
    finally:
        cc.decision = old


def compile_moves(arg, cc):
    """Dispatch a moves ludeme to its generator handler."""
    if isinstance(arg, Array):
        fs = [compile_moves(a, cc) for a in arg.items]

        def run(ctx, limit=None):
            out = []
            for f in fs:
                out.extend(f(ctx, limit))
                if limit is not None and len(out) >= limit:
                    break
            return out
        return run
    node = want_node(arg, 'moves expression')
    from . import HEADS
    h = HEADS.get(node.label)
    if h is None:
        where = f' at line {node.pos[0]}' if node.pos and node.pos[0] else ''
        raise CompileError(f'unsupported ludeme: {node.label}{where}')
    return h(node, cc)


def compile_then(node, cc):
    """(then <effect>) child -> tuple of consequent generators (or ())."""
    t = node.first('then')
    if t is None:
        return ()
    with effect_mode(cc):
        fs = tuple(compile_moves(a, cc) for a in t.positional())
    if not fs:
        raise CompileError('(then ...): missing consequent')
    return fs


class SiteSpec:
    """Parsed (from ...) / (to ...) / (between ...) clause."""

    __slots__ = ('region', 'cond', 'apply', 'max', 'range', 'before', 'after',
                 'trail')

    def __init__(self):
        self.region = None
        self.cond = None
        self.apply = None
        self.max = None
        self.range = None
        self.before = None
        self.after = None
        self.trail = None

    def ok(self, ctx):
        return self.cond is None or self.cond(ctx)


def parse_spec(node, cc):
    from ..functions import compile_bool, compile_int, compile_region
    spec = SiteSpec()
    if node is None:
        return spec
    for a in node.positional():
        if isinstance(a, LudNode) and a.label == 'apply':
            with effect_mode(cc):
                body = a.positional()
                spec.apply = compile_moves(body[0], cc)
        elif isinstance(a, LudNode) and a.label == 'max':
            spec.max = compile_int(a.positional()[0], cc)
        elif isinstance(a, LudNode) and a.label == 'range':
            lo = compile_int(a.positional()[0], cc)
            hi = compile_int(a.positional()[1], cc)
            spec.range = (lo, hi)
        elif spec.region is None:
            spec.region = compile_region(a, cc)
        else:
            raise CompileError(f'({node.label} ...): unexpected argument {a!r}')
    if node.has_named('if'):
        spec.cond = compile_bool(node.named('if'), cc)
    if node.has_named('before'):
        spec.before = compile_int(node.named('before'), cc)
    if node.has_named('after'):
        spec.after = compile_int(node.named('after'), cc)
    if node.has_named('trail'):
        spec.trail = compile_int(node.named('trail'), cc)
    return spec


def child_spec(node, label, cc):
    return parse_spec(node.first(label), cc)


def direction_names(args):
    """Leading direction tags of a moves node (after the move kind tag)."""
    names = []
    for a in args:
        t = as_tag(a)
        if t is not None and t not in ('True', 'False'):
            names.append(t)
    return names


def inline_actions(ctx, effect_fn):
    """Evaluate an (apply ...) effect now; returns its actions flattened."""
    if effect_fn is None:
        return []
    out = []
    for mv in effect_fn(ctx):
        out.extend(mv.actions)
    return out


def eval_to(ctx, spec, to):
    saved = ctx.save_iterators()
    ctx.to_site = to
    ok = spec.ok(ctx)
    acts = inline_actions(ctx, spec.apply) if ok else []
    ctx.restore_iterators(saved)
    return ok, acts


def eval_between(ctx, spec, b):
    saved = ctx.save_iterators()
    ctx.between = b
    ok = spec.ok(ctx)
    acts = inline_actions(ctx, spec.apply) if ok else []
    ctx.restore_iterators(saved)
    return ok, acts


def from_sites(ctx, spec):
    """Sites a move may start from: declared region or the (from) iterator."""
    if spec.region is not None:
        sites = spec.region(ctx)
    elif ctx.from_site >= 0:
        sites = [ctx.from_site]
    else:
        sites = []
    if spec.cond is None:
        return list(sites)
    out = []
    saved = ctx.save_iterators()
    for s in sites:
        ctx.from_site = s
        if spec.cond(ctx):
            out.append(s)
    ctx.restore_iterators(saved)
    return out
