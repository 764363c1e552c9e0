'''
Exhaustive solver for deduction puzzles: depth-first over variable
assignments with incremental pruning for the two constraint shapes the
solver understands. Every complete assignment is verified against the
game's own compiled constraints, so pruning can only skip work, never
change the answer set.
'''

from __future__ import annotations

from ..functions import as_tag
from .run import initial_context


class _DifferentCheck:
    """Resolved values within each region must be pairwise different,
    ignoring the exempt values."""

    def __init__(self, regions, exempt):
        self.regions = [tuple(r) for r in regions]
        self.exempt = frozenset(exempt)
        self.counts = [dict() for _ in self.regions]
        self.by_var = {}
        for i, r in enumerate(self.regions):
            for v in r:
                self.by_var.setdefault(v, []).append(i)

    def assign(self, var, val):
        if val in self.exempt:
            return True
        ok = True
        for i in self.by_var.get(var, ()):
            c = self.counts[i]
            c[val] = c.get(val, 0) + 1
            if c[val] > 1:
                ok = False
        return ok

    def unassign(self, var, val):
        if val in self.exempt:
            return
        for i in self.by_var.get(var, ()):
            self.counts[i][val] -= 1


class _CountCheck:
    """Exactly `target` variables of the region resolve to `value`."""

    def __init__(self, region, target, value):
        self.region = frozenset(region)
        self.target = target
        self.value = value
        self.hits = 0
        self.free = len(self.region)

    def assign(self, var, val):
        if var not in self.region:
            return True
        self.free -= 1
        if val == self.value:
            self.hits += 1
        return self.hits <= self.target and self.hits + self.free >= self.target

    def unassign(self, var, val):
        if var not in self.region:
            return
        self.free += 1
        if val == self.value:
            self.hits -= 1


def _pruners(game, ctx):
    out = []
    for node in game.puzzle_constraint_nodes:
        label = node.label
        pos = node.positional()
        tag = as_tag(pos[0]) if pos else None
        if label == 'all' and tag == 'Different':
            exempt = []
            ex = node.named('except')
            if isinstance(ex, int):
                exempt.append(ex)
            regions = [sites for _, sites in game.puzzle_regions]
            if regions:
                out.append(_DifferentCheck(regions, exempt))
        elif label == 'is' and tag == 'Count':
            from ..functions import compile_region
            from ..functions.base import CompileCtx
            cc = CompileCtx(game)
            region_arg = next((a for a in pos[1:]
                               if not isinstance(a, int)), None)
            ints = [a for a in pos[1:] if isinstance(a, int)]
            target = ints[0] if ints else 1
            of = node.named('of')
            value = of if isinstance(of, int) else 1
            if region_arg is not None:
                sites = compile_region(region_arg, cc)(ctx)
                out.append(_CountCheck(sites, target, value))
    return out


def solve(game, limit=None):
    """All assignments satisfying the puzzle, as value tuples indexed by
    variable. `limit` caps the number of solutions gathered."""
    if game.puzzle_domain is None:
        raise ValueError(f'{game.name!r} is not a deduction puzzle')
    ctx = initial_context(game, seed=0)
    puzzle = ctx.puzzle
    nv = puzzle.num_vars
    lo, hi = game.puzzle_domain
    checks = _pruners(game, ctx)
    assignment = [lo] * nv
    solutions = []

    def verify():
        for v in range(nv):
            puzzle.set(v, assignment[v])
        try:
            return game.puzzle_solved(ctx)
        finally:
            for v in range(nv):
                puzzle.reset(v)

    def descend(var):
        if limit is not None and len(solutions) >= limit:
            return
        if var == nv:
            if verify():
                solutions.append(tuple(assignment))
            return
        for val in range(lo, hi + 1):
            assignment[var] = val
            ok = True
            for c in checks:
                if not c.assign(var, val):
                    ok = False
            if ok:
                descend(var + 1)
            for c in checks:
                c.unassign(var, val)

    descend(0)
    return solutions
