'''
Shared compilation helpers. Every compile_* function turns a parse-tree
argument into a plain callable taking a Context; unsupported ludemes raise
CompileError with the offending label so games fail loudly at compile time.
'''

from __future__ import annotations

from ..context import OFF
from ..lud import Array, LudNode

SITE_TYPES = ('Cell', 'Vertex', 'Edge')


class CompileError(Exception):
    pass


class CompileCtx:
    """What compile_* functions need to know while building closures: the
    game being compiled and whether we are under a decision move."""

    __slots__ = ('game', 'decision')

    def __init__(self, game, decision=True):
        self.game = game
        self.decision = decision


def as_tag(arg):
    """The label of a bare (argument-free) node, else None."""
    if isinstance(arg, LudNode) and not arg.args:
        return arg.label
    return None


def positional_tags(node):
    return [as_tag(a) for a in node.positional()]


def skip_site_type(args):
    """Drop a leading Cell/Vertex/Edge qualifier; we keep one site type."""
    if args and as_tag(args[0]) in SITE_TYPES:
        return args[1:]
    return args


def const(v):
    return lambda ctx: v


_ROLE_SIMPLE = {
    'Mover': lambda ctx: ctx.state.mover,
    'Next': lambda ctx: ctx.state.next,
    'Prev': lambda ctx: ctx.state.prev,
    'Shared': lambda ctx: 0,
    'Neutral': lambda ctx: 0,
    'Player': lambda ctx: ctx.player,
}


def compile_player(arg, cc):
    """Player index function from a role name, number, or int expression."""
    tag = as_tag(arg)
    if tag in _ROLE_SIMPLE:
        return _ROLE_SIMPLE[tag]
    if tag is not None and len(tag) >= 2 and tag[0] == 'P' and tag[1:].isdigit():
        return const(int(tag[1:]))
    from .ints import compile_int
    return compile_int(arg, cc)


def role_predicate(arg, cc):
    """(ctx, who) -> bool ownership test for by:/role arguments."""
    tag = as_tag(arg)
    if tag == 'All' or tag == 'Each':
        return lambda ctx, who: True
    if tag == 'Enemy':
        return lambda ctx, who: who != 0 and who != ctx.state.mover
    if tag == 'NonMover':
        return lambda ctx, who: who != ctx.state.mover
    p = compile_player(arg, cc)
    return lambda ctx, who: who == p(ctx)


def first_node(args, label):
    for a in args:
        if isinstance(a, LudNode) and a.label == label:
            return a
    return None


def want_node(arg, what):
    if not isinstance(arg, LudNode):
        raise CompileError(f'{what}: expected a ludeme, got {arg!r}')
    return arg


def flatten_items(arg):
    """Array or single value -> list of values."""
    if isinstance(arg, Array):
        return list(arg.items)
    return [arg]


def truthy_flag(node, key, default=False):
    v = node.named(key)
    if v is None:
        return default
    t = as_tag(v)
    if t in ('True', 'true'):
        return True
    if t in ('False', 'false'):
        return False
    raise CompileError(f'{node.label}: {key}: expects True or False')
