'''
Game compilation: bind equipment to concrete topology/containers, scan feature
flags, and compile start/play/end rules into closures over a Context.

A compiled Game is immutable at runtime. All per-trial data lives in the
Context handed around by the run module, so one Game can serve any number of
concurrent trials.
'''

from __future__ import annotations

from ..board.topology import BoardError, Topology, build_topology, graph_literal
from ..board.tracks import Track, TrackError, build_track, build_tracks
from ..functions import (
    CompileCtx, CompileError, as_tag, compile_bool, compile_int,
    compile_player, compile_region, role_predicate,
)
from ..lud import Array, LudNode, Named
from ..state.zobrist import ZobristTable

FLAG_NAMES = (
    'UsesFromPositions', 'SiteState', 'Count', 'Stochastic', 'Score',
    'Visited', 'Value', 'Rotation', 'Track', 'DeductionPuzzle', 'MoveAgain',
    'Team', 'NotAllPass',
)

META_NAMES = ('Swap', 'NoRepeat', 'Automove')


class Component:
    """One indexed piece type. Per-player pieces get owner-suffixed names,
    so (piece "Ball" Each) in a 2-player game yields Ball1 and Ball2."""

    __slots__ = ('index', 'name', 'root', 'owner', 'moves_node', 'moves_fn')

    def __init__(self, index, name, root, owner, moves_node=None):
        self.index = index
        self.name = name
        self.root = root
        self.owner = owner
        self.moves_node = moves_node
        self.moves_fn = None

    def __repr__(self):
        return f'<Component {self.index} {self.name!r} owner={self.owner}>'


class DieSpec:
    __slots__ = ('faces',)

    def __init__(self, faces):
        self.faces = tuple(faces)


class Phase:
    __slots__ = ('name', 'play_fn', 'next_cond', 'next_target')

    def __init__(self, name):
        self.name = name
        self.play_fn = None
        self.next_cond = None     # bool fn, or None meaning unconditional
        self.next_target = None   # phase index, or None meaning no transition


class Game:
    """Compiled game. Built by compile_game, never mutated afterwards."""

    def __init__(self, name, num_players):
        self.name = name
        self.num_players = num_players
        self.topo: Topology = None
        self.zobrist: ZobristTable = None
        self.components = [None]          # index 0 is the empty marker
        self.tracks = []
        self.maps = {}                    # name (or None) -> {key: site}
        self.dice = []
        self.flags = set()
        self.metas = set()
        self.max_moves = 10000
        self.max_turns = 1250 * num_players
        self.start_fns = []
        self.play_fn = None
        self.phases = []                  # non-empty only for phased games
        self.end_fns = []
        self.end_kinds = set()            # result kinds the end rules can emit
        self.puzzle_domain = None         # (lo, hi) for deduction puzzles
        self.puzzle_constraints = []
        self.puzzle_constraint_nodes = []
        self.puzzle_regions = []          # [(name, tuple(sites))]
        self.options_used = []
        self._by_name = {}
        self._regions = {}                # name -> [region fn]
        self._hands = {}                  # player -> (offset, size)
        self._hand_total = 0
        self._forward = {}                # player -> wind name

    # -- piece lookups --------------------------------------------------------

    def piece_id(self, name, player):
        c = (self._by_name.get(name)
             or self._by_name.get(f'{name}{player}')
             or self._by_name.get(f'{name}0'))
        return c.index if c else 0

    def mover_piece(self, mover):
        """Default component when a move rule names no piece: the mover's own
        piece type if unique, else the first shared one."""
        owned = [c for c in self.components[1:] if c.owner == mover]
        if len(owned) == 1:
            return owned[0].index
        shared = [c for c in self.components[1:] if c.owner == 0]
        if len(owned) == 0 and shared:
            return shared[0].index
        return owned[0].index if owned else 0

    def counterpart(self, what, player):
        """Same piece root re-owned by player (used by swap and flip)."""
        if not (0 < what < len(self.components)):
            return what
        root = self.components[what].root
        c = (self._by_name.get(f'{root}{player}')
             or self._by_name.get(f'{root}0'))
        return c.index if c else what

    # -- equipment lookups ----------------------------------------------------

    def forward_wind(self, player):
        w = self._forward.get(player)
        if w is not None:
            return w
        return 'N' if player != 2 else 'S'

    @property
    def total_sites(self):
        return self.topo.num_sites + self._hand_total

    def hand_offset(self, player):
        entry = self._hands.get(player)
        if entry is None:
            raise KeyError(f'player {player} has no hand')
        return entry[0]

    def hand_sites(self, player):
        entry = self._hands.get(player)
        if entry is None:
            return []
        off, size = entry
        return list(range(off, off + size))

    def track_for(self, player, name=None):
        for t in self.tracks:
            if name is not None and t.name != name:
                continue
            if t.owner in (0, player):
                return t
        for t in self.tracks:
            if name is None or t.name == name:
                return t
        raise KeyError(f'no track named {name!r} for player {player}')

    def map_named(self, name=None):
        if name in self.maps:
            return self.maps[name]
        if name is None and self.maps:
            return next(iter(self.maps.values()))
        raise KeyError(f'no map named {name!r}')

    def has_region(self, name):
        return name in self._regions

    def region_sites(self, ctx, name):
        out = []
        for fn in self._regions[name]:
            out.extend(fn(ctx))
        return out

    # -- rule evaluation helpers ----------------------------------------------

    def play_for(self, ctx):
        if self.phases:
            return self.phases[ctx.state.phases[ctx.state.mover]].play_fn
        return self.play_fn

    def has_moves(self, ctx, player):
        """Would `player` have at least one legal move if it were their turn?
        Temporarily rewires the mover; meta rules are not consulted."""
        state = ctx.state
        saved = (state.mover, state.next, state.prev)
        saved_iters = ctx.save_iterators()
        n = self.num_players
        state.mover = player
        state.next = player % n + 1 if n > 1 else player
        state.prev = saved[0]
        try:
            return bool(self.play_for(ctx)(ctx, limit=1))
        finally:
            state.mover, state.next, state.prev = saved
            ctx.restore_iterators(saved_iters)

    def puzzle_solved(self, ctx):
        if ctx.puzzle is None:
            return False
        if not all(ctx.puzzle.is_resolved(v)
                   for v in range(ctx.puzzle.num_vars)):
            return False
        return all(c(ctx) for c in self.puzzle_constraints)


# ---------------------------------------------------------------------------
# Equipment.

def _players_spec(node):
    if node is None:
        raise CompileError('game has no (players ...) entry')
    pos = node.positional()
    forward = {}
    if pos and isinstance(pos[0], int):
        n = pos[0]
    elif pos and isinstance(pos[0], Array):
        entries = [a for a in pos[0].items
                   if isinstance(a, LudNode) and a.label == 'player']
        n = len(entries)
        for i, e in enumerate(entries, start=1):
            for a in e.positional():
                t = as_tag(a)
                if t is not None:
                    forward[i] = t
    else:
        raise CompileError('(players ...): expected a count or {(player ..)}')
    if n < 1:
        raise CompileError(f'player count must be at least 1, got {n}')
    return n, forward


def _mancala_graph(rows, cols):
    """Two rows of holes between two stores. Numbering: 0 is the left store,
    1..cols the bottom row west to east, then the top row, last the right
    store. Geometry is laid out so E/W/N/S steps follow the rows."""
    if rows != 2:
        raise BoardError('mancalaBoard: only the two-row form is supported')
    verts = [(0.0, 0.5)]
    verts += [(float(x), 0.0) for x in range(1, cols + 1)]
    verts += [(float(x), 1.0) for x in range(1, cols + 1)]
    verts.append((float(cols + 1), 0.5))
    edges = []
    for x in range(1, cols):
        edges.append((x, x + 1))                  # bottom chain
        edges.append((cols + x, cols + x + 1))    # top chain
    for x in range(1, cols + 1):
        edges.append((x, cols + x))               # verticals
    last = 2 * cols + 1
    edges += [(0, 1), (0, cols + 1), (last, cols), (last, 2 * cols)]
    return graph_literal(verts, edges)


def _build_board(item, game):
    label = item.label
    if label == 'board':
        game.topo = build_topology(item)
        game.tracks = build_tracks(item, game.topo)
        return
    if label == 'mancalaBoard':
        pos = item.positional()
        ints = [a for a in pos if isinstance(a, int)]
        if len(ints) < 2:
            raise CompileError('(mancalaBoard rows cols ...): missing sizes')
        g = _mancala_graph(ints[0], ints[1])
        game.topo = Topology(g, 'Vertex')
        game.tracks = build_tracks(item, game.topo)
        return
    if label == 'puzzleBoard':
        pos = item.positional()
        graph_expr = None
        values_node = None
        for a in pos:
            if isinstance(a, LudNode) and a.label == 'values':
                values_node = a
            elif isinstance(a, LudNode):
                graph_expr = a
        if graph_expr is None:
            raise CompileError('(puzzleBoard ...): missing board expression')
        game.topo = build_topology(graph_expr)
        lo, hi = 0, 1
        if values_node is not None:
            rng = values_node.first('range')
            if rng is not None:
                rpos = [a for a in rng.positional() if isinstance(a, int)]
                if len(rpos) == 2:
                    lo, hi = rpos
        game.puzzle_domain = (lo, hi)
        return
    raise CompileError(f'unsupported board form {label!r}')


def _add_piece(item, game):
    pos = item.positional()
    strings = [a for a in pos if isinstance(a, str)]
    if not strings:
        raise CompileError('(piece ...): missing name')
    root = strings[0]
    role = None
    moves_node = None
    for a in pos[1:]:
        t = as_tag(a)
        if t is not None:
            role = t
        elif isinstance(a, LudNode):
            moves_node = a
    role = role or 'Each'

    def register(name, owner):
        idx = len(game.components)
        comp = Component(idx, name, root, owner, moves_node)
        game.components.append(comp)
        game._by_name[name] = comp

    if role == 'Each':
        for p in range(1, game.num_players + 1):
            register(f'{root}{p}', p)
    elif role in ('Shared', 'Neutral'):
        register(f'{root}0', 0)
    elif role.startswith('P') and role[1:].isdigit():
        p = int(role[1:])
        if not (1 <= p <= game.num_players):
            raise CompileError(f'(piece {root!r} {role}): no such player')
        register(f'{root}{p}', p)
    else:
        raise CompileError(f'(piece {root!r} ...): unknown role {role!r}')


_LANDMARKS = ('FirstSite', 'LastSite', 'CentreSite')


def _landmark_site(tag, topo):
    if tag == 'FirstSite':
        return 0
    if tag == 'LastSite':
        return topo.num_sites - 1
    if tag == 'CentreSite':
        centre = sorted(topo.sets['Centre'])
        if not centre:
            raise CompileError('board has no centre site')
        return centre[0]
    raise CompileError(f'unknown site landmark {tag!r}')


def _map_key(arg, game):
    if isinstance(arg, str):
        return arg
    if isinstance(arg, int):
        return arg
    t = as_tag(arg)
    if t is not None and t.startswith('P') and t[1:].isdigit():
        return int(t[1:])
    if t in ('Mover', 'Next', 'Prev'):
        raise CompileError(f'(map ...): {t} is not a valid pair key')
    raise CompileError(f'(map ...): bad pair key {arg!r}')


def _map_value(arg, game):
    if isinstance(arg, int):
        return arg
    if isinstance(arg, str):
        return game.topo.site_by_label(arg)
    t = as_tag(arg)
    if t in _LANDMARKS:
        return _landmark_site(t, game.topo)
    if t is not None and t.startswith('P') and t[1:].isdigit():
        return int(t[1:])
    raise CompileError(f'(map ...): bad pair value {arg!r}')


def _add_map(item, game):
    pos = item.positional()
    name = None
    entries = {}
    for a in pos:
        if isinstance(a, str):
            name = a
        elif isinstance(a, Array):
            for pair in a.items:
                if not (isinstance(pair, LudNode) and pair.label == 'pair'):
                    continue
                ppos = pair.positional()
                if len(ppos) != 2:
                    raise CompileError('(pair ...): expected key and value')
                entries[_map_key(ppos[0], game)] = _map_value(ppos[1], game)
    game.maps[name] = entries


def _add_dice(item, game):
    faces_count = item.named('d')
    start = item.named('from')
    num = item.named('num')
    d = faces_count if isinstance(faces_count, int) else 6
    lo = start if isinstance(start, int) else 1
    n = num if isinstance(num, int) else 1
    faces = list(range(lo, lo + d))
    game.dice = [DieSpec(faces) for _ in range(n)]


def _add_hand(item, game):
    pos = item.positional()
    role = as_tag(pos[0]) if pos else 'Each'
    size = item.named('size')
    size = size if isinstance(size, int) else 1
    players = []
    if role == 'Each':
        players = list(range(1, game.num_players + 1))
    elif role and role.startswith('P') and role[1:].isdigit():
        players = [int(role[1:])]
    elif role in ('Shared', 'Neutral'):
        players = [0]
    else:
        raise CompileError(f'(hand ...): unknown role {role!r}')
    for p in players:
        off = game.topo.num_sites + game._hand_total
        game._hands[p] = (off, size)
        game._hand_total += size


def _line_regions(topo):
    """Every maximal straight line of 2+ sites, one region per line. A site
    starts a line when it has no predecessor in that direction."""
    from ..board.directions import opposite
    out = []
    seen = set()
    for s in range(topo.num_sites):
        for w in topo.supported_winds(s, 'All'):
            if topo.step(s, opposite(w), 'All') is not None:
                continue
            line = (s,) + tuple(topo.radial(s, w, 'All'))
            key = tuple(sorted(line))
            if len(line) < 2 or key in seen:
                continue
            seen.add(key)
            out.append((f'line-{len(out)}', line))
    return out


def _add_regions(item, game, pending):
    pos = item.positional()
    name = None
    owner_tag = None
    bodies = []
    for a in pos:
        if isinstance(a, str):
            name = a
        elif isinstance(a, Array):
            for x in a.items:
                t = as_tag(x)
                if t == 'AllDirections':
                    game.puzzle_regions.extend(_line_regions(game.topo))
                else:
                    bodies.append(x)
        elif as_tag(a) == 'AllDirections':
            game.puzzle_regions.extend(_line_regions(game.topo))
        elif as_tag(a) is not None:
            owner_tag = as_tag(a)
        else:
            bodies.append(a)
    if not bodies:
        return
    if name is None and owner_tag is not None:
        name = owner_tag
    if name is None:
        raise CompileError('(regions ...): site list needs a name')
    pending.append((name, bodies))


def _bind_equipment(node, game):
    if node is None:
        raise CompileError('game has no (equipment ...) entry')
    items = []
    for a in node.positional():
        if isinstance(a, Array):
            items.extend(x for x in a.items if isinstance(x, LudNode))
        elif isinstance(a, LudNode):
            items.append(a)
    boards = [i for i in items
              if i.label in ('board', 'mancalaBoard', 'puzzleBoard')]
    if not boards:
        raise CompileError('equipment declares no board')
    _build_board(boards[0], game)

    pending_regions = []
    for item in items:
        if item in boards:
            continue
        label = item.label
        if label == 'piece':
            _add_piece(item, game)
        elif label == 'map':
            _add_map(item, game)
        elif label == 'dice':
            _add_dice(item, game)
        elif label == 'hand':
            _add_hand(item, game)
        elif label == 'regions':
            _add_regions(item, game, pending_regions)
        elif label == 'values':
            pass   # handled inside puzzleBoard
        else:
            raise CompileError(f'unsupported equipment {label!r}')
    return pending_regions


# ---------------------------------------------------------------------------
# Flags.

def _named_keys(node):
    return {a.name for a in node.args if isinstance(a, Named)}


def _first_tag(node):
    pos = node.positional()
    return as_tag(pos[0]) if pos else None


def _scan_flags(game, root):
    flags = set()
    for node in root.walk():
        label = node.label
        keys = _named_keys(node)
        if label == 'from':
            flags.add('UsesFromPositions')
        if 'state' in keys or (label == 'set' and _first_tag(node) == 'State'):
            flags.add('SiteState')
        if label in ('sow',) or (label == 'set' and _first_tag(node) == 'Count'):
            flags.add('Count')
        if 'count' in keys and label in ('place', 'fromTo', 'add', 'sow'):
            flags.add('Count')
        if label == 'count' and node.has_named('at'):
            flags.add('Count')
        if label == 'roll':
            flags.add('Stochastic')
        if label in ('addScore', 'byScore') or (
                label == 'set' and _first_tag(node) in ('Score', 'score')):
            flags.add('Score')
        if label in ('is', 'sites') and _first_tag(node) == 'Visited':
            flags.add('Visited')
        if 'value' in keys or (label == 'set' and _first_tag(node) == 'Value'):
            flags.add('Value')
        if 'rotation' in keys or (
                label == 'set' and _first_tag(node) == 'Rotation'):
            flags.add('Rotation')
        if label == 'moveAgain':
            flags.add('MoveAgain')
        if label == 'set' and _first_tag(node) == 'Team':
            flags.add('Team')
        if label == 'all' and _first_tag(node) == 'Passed':
            flags.add('NotAllPass')
        if label == 'satisfy':
            flags.add('DeductionPuzzle')
    if game.tracks:
        flags.add('Track')
    if game.dice:
        flags.add('Stochastic')
    if game.puzzle_domain is not None:
        flags.add('DeductionPuzzle')
    return flags


# ---------------------------------------------------------------------------
# Piece reference validation.

def _validate_piece_refs(game, rules):
    def check(name, node):
        if name in game._by_name:
            return
        if any(c.root == name for c in game.components[1:]):
            return
        raise CompileError(
            f'undefined piece {name!r} at line {node.pos[0]}')

    for node in rules.walk():
        if node.label == 'piece':
            for a in node.positional():
                if isinstance(a, str):
                    check(a, node)
        elif node.label == 'place':
            pos = node.positional()
            if pos and isinstance(pos[0], str):
                check(pos[0], node)


# ---------------------------------------------------------------------------
# Start rules.

def _start_sites(node, cc):
    """Where a (place ...) puts pieces: coordinate labels, site integers,
    arrays of either, region expressions, or a coord: named argument."""
    topo = cc.game.topo

    def coord(label):
        try:
            return topo.site_by_label(label)
        except KeyError:
            raise CompileError(f'(place ...): no coordinate {label!r}')

    pos = node.positional()
    fixed = []
    region_fn = None
    for a in pos[1:]:
        if isinstance(a, str):
            fixed.append(coord(a))
        elif isinstance(a, int):
            fixed.append(a)
        elif isinstance(a, Array):
            for x in a.items:
                if isinstance(x, str):
                    fixed.append(coord(x))
                elif isinstance(x, int):
                    fixed.append(x)
                else:
                    raise CompileError('(place ...): bad site list entry')
        elif isinstance(a, LudNode):
            region_fn = compile_region(a, cc)
    at = node.named('coord')
    if isinstance(at, str):
        fixed.append(coord(at))
    if region_fn is None and not fixed:
        raise CompileError('(place ...): nowhere to place')
    if region_fn is None:
        return lambda ctx: list(fixed)
    if not fixed:
        return region_fn
    return lambda ctx: fixed + list(region_fn(ctx))


def _compile_place(node, cc):
    from ..actions import ActionAdd, ActionSetRotation

    game = cc.game
    pos = node.positional()
    if not pos or not isinstance(pos[0], str):
        t = as_tag(pos[0]) if pos else None
        raise CompileError(f'(place {t} ...) is not supported (no stacking)')
    name = pos[0]
    comp = game._by_name.get(name) or game._by_name.get(f'{name}0')
    if comp is None:
        raise CompileError(f'undefined piece {name!r} in start rule')
    sites_fn = _start_sites(node, cc)

    def opt(key):
        v = node.named(key)
        if v is None:
            return None
        if isinstance(v, int):
            return v
        raise CompileError(f'(place ...): {key}: expects an integer')

    count = opt('count')
    state = opt('state')
    value = opt('value')
    rotation = opt('rotation')

    def run(ctx):
        for s in sites_fn(ctx):
            if not (0 <= s < game.total_sites):
                raise CompileError(f'(place {name!r} ...): no site {s}')
            ActionAdd(site=s, what=comp.index, count=count or 1,
                      state=-1 if state is None else state,
                      value=-1 if value is None else value).apply(ctx)
            if rotation is not None:
                ActionSetRotation(site=s, rotation=rotation).apply(ctx)
            ctx.trial.start_placements.append(s)
    return run


def _compile_start_set(node, cc):
    from ..actions import ActionSetCount, ActionSetScore

    game = cc.game
    pos = node.positional()
    tag = as_tag(pos[0]) if pos else None
    if tag in ('Score', 'score'):
        player = compile_player(pos[1], cc)
        amount = compile_int(pos[2], cc)

        def run(ctx):
            ActionSetScore(player=player(ctx), amount=amount(ctx)).apply(ctx)
        return run
    if tag == 'Count':
        amount = compile_int(pos[1], cc)
        to = node.named('to')
        if to is None:
            raise CompileError('(set Count n to:<region>): missing to:')
        region = compile_region(to, cc)
        # Seeding empty sites needs a piece too; there must be exactly one
        # component for the shorthand to be unambiguous.
        shared = [c.index for c in game.components[1:]]
        if len(shared) != 1:
            raise CompileError(
                '(set Count ...) start rule needs exactly one piece type')
        what = shared[0]

        def run(ctx):
            from ..actions import ActionAdd
            n = amount(ctx)
            for s in region(ctx):
                if ctx.what(s) == 0:
                    ActionAdd(site=s, what=what, count=n).apply(ctx)
                else:
                    ActionSetCount(site=s, count=n).apply(ctx)
                ctx.trial.start_placements.append(s)
        return run
    raise CompileError(f'unsupported start rule (set {tag} ...)')


def _compile_start(node, game, cc):
    items = []
    for a in node.positional():
        if isinstance(a, Array):
            items.extend(x for x in a.items if isinstance(x, LudNode))
        elif isinstance(a, LudNode):
            items.append(a)
    out = []
    for item in items:
        if item.label == 'place':
            out.append(_compile_place(item, cc))
        elif item.label == 'set':
            out.append(_compile_start_set(item, cc))
        else:
            raise CompileError(f'unsupported start rule {item.label!r}')
    return out


# ---------------------------------------------------------------------------
# Play rules.

def _compile_satisfy(node, game, cc):
    from ..actions import ActionResolve, ActionToggle
    from ..movegen import Move

    nodes = []
    for a in node.positional():
        if isinstance(a, Array):
            nodes.extend(x for x in a.items if isinstance(x, LudNode))
        elif isinstance(a, LudNode):
            nodes.append(a)
    game.puzzle_constraints = [compile_bool(x, cc) for x in nodes]
    game.puzzle_constraint_nodes = nodes
    lo, hi = game.puzzle_domain

    def play(ctx, limit=None):
        out = []
        pz = ctx.puzzle
        for v in range(pz.num_vars):
            if pz.is_resolved(v):
                continue
            for val in range(lo, hi + 1):
                out.append(Move([ActionResolve(site=v, value=val,
                                               decision=True)],
                                from_site=v, to_site=v))
                out.append(Move([ActionToggle(site=v, value=val,
                                              decision=True)],
                                from_site=v, to_site=v))
                if limit is not None and len(out) >= limit:
                    return out
        return out
    return play


def _compile_play(node, game, cc):
    from ..movegen import compile_moves

    pos = [a for a in node.positional() if isinstance(a, LudNode)]
    if not pos:
        raise CompileError('(play ...): empty')
    inner = pos[0]
    if inner.label == 'satisfy':
        if game.puzzle_domain is None:
            raise CompileError('(satisfy ...) needs a puzzleBoard')
        return _compile_satisfy(inner, game, cc)
    return compile_moves(inner, cc)


def _compile_phases(phase_nodes, game, cc):
    phases = [Phase(_phase_name(p, i)) for i, p in enumerate(phase_nodes)]
    by_name = {ph.name: i for i, ph in enumerate(phases)}
    for i, node in enumerate(phase_nodes):
        ph = phases[i]
        play = node.first('play')
        if play is None:
            raise CompileError(f'phase {ph.name!r} has no (play ...)')
        ph.play_fn = _compile_play(play, game, cc)
        nxt = node.first('nextPhase')
        if nxt is not None:
            cond = None
            target = None
            for a in nxt.positional():
                if isinstance(a, str):
                    target = a
                elif isinstance(a, LudNode) and a.args:
                    cond = compile_bool(a, cc)
            ph.next_cond = cond
            if target is not None:
                if target not in by_name:
                    raise CompileError(f'unknown phase {target!r}')
                ph.next_target = by_name[target]
            else:
                ph.next_target = (i + 1) % len(phases)
    return phases


def _phase_name(node, i):
    for a in node.positional():
        if isinstance(a, str):
            return a
    return f'phase-{i}'


# ---------------------------------------------------------------------------
# End rules.

_RESULT_KINDS = ('Win', 'Loss', 'Draw')


def _compile_result(node, cc, game):
    pos = node.positional()
    if len(pos) < 2:
        raise CompileError('(result <role> <kind>): missing arguments')
    kind = as_tag(pos[1])
    if kind not in _RESULT_KINDS:
        raise CompileError(f'unknown result kind {kind!r}')
    game.end_kinds.add(kind)
    if kind == 'Draw':
        return lambda ctx: ('draw',)
    player = compile_player(pos[0], cc)

    def run(ctx):
        return ('results', {player(ctx): kind})
    return run


def _compile_byscore(node, cc, game):
    game.end_kinds.add('ByScore')
    overrides = []
    for a in node.positional():
        items = a.items if isinstance(a, Array) else [a]
        for x in items:
            if isinstance(x, LudNode) and x.label == 'score':
                xpos = x.positional()
                overrides.append((compile_player(xpos[0], cc),
                                  compile_int(xpos[1], cc)))

    def run(ctx):
        scores = {}
        for pf, sf in overrides:
            scores[pf(ctx)] = sf(ctx)
        return ('byscore', scores)
    return run


def _compile_end_clause(node, cc, game):
    label = node.label
    if label == 'if':
        pos = node.positional()
        cond = compile_bool(pos[0], cc)
        branches = [a for a in pos[1:] if isinstance(a, LudNode)]
        if not branches:
            raise CompileError('(if ...) end rule has no consequence')
        then_fn = _compile_end_clause(branches[0], cc, game)
        else_fn = (_compile_end_clause(branches[1], cc, game)
                   if len(branches) > 1 else None)

        def run(ctx):
            if cond(ctx):
                return then_fn(ctx)
            return else_fn(ctx) if else_fn is not None else None
        return run
    if label == 'result':
        return _compile_result(node, cc, game)
    if label == 'byScore':
        return _compile_byscore(node, cc, game)
    if label == 'forEach':
        role = node.positional()
        role_node = role[0] if role else None
        pred = role_predicate(role_node, cc)
        cond_node = node.named('if')
        cond = compile_bool(cond_node, cc) if cond_node is not None else None
        result_node = node.first('result')
        if result_node is None:
            raise CompileError('(forEach ...) end rule needs a (result ...)')
        result_fn = _compile_result(result_node, cc, game)

        def run(ctx):
            combined = {}
            outcome = None
            for p in range(1, ctx.game.num_players + 1):
                if not ctx.trial.active[p] or not pred(ctx, p):
                    continue
                saved = ctx.player
                ctx.player = p
                try:
                    if cond is None or cond(ctx):
                        r = result_fn(ctx)
                        if r[0] == 'results':
                            combined.update(r[1])
                        else:
                            outcome = r
                finally:
                    ctx.player = saved
            if combined:
                return ('results', combined)
            return outcome
        return run
    raise CompileError(f'unsupported end rule {label!r}')


def _compile_end(node, game, cc):
    clauses = []
    for a in node.positional():
        if isinstance(a, Array):
            clauses.extend(x for x in a.items if isinstance(x, LudNode))
        elif isinstance(a, LudNode):
            clauses.append(a)
    return [_compile_end_clause(c, cc, game) for c in clauses]


# ---------------------------------------------------------------------------
# The compiler.

def compile_game(root: LudNode) -> Game:
    if not isinstance(root, LudNode) or root.label != 'game':
        raise CompileError('expected a (game ...) tree')
    pos = root.positional()
    name = pos[0] if pos and isinstance(pos[0], str) else 'untitled'

    num_players, forward = _players_spec(root.first('players'))
    game = Game(name, num_players)
    game._forward = forward
    pending_regions = _bind_equipment(root.first('equipment'), game)

    rules = root.first('rules')
    if rules is None:
        raise CompileError('game has no (rules ...) entry')

    game.flags = _scan_flags(game, root)
    game.zobrist = ZobristTable()
    _validate_piece_refs(game, rules)

    cc = CompileCtx(game)

    # Named regions compile before play so (sites "Name") can resolve.
    for rname, bodies in pending_regions:
        fns = []
        for b in bodies:
            if isinstance(b, str):
                site = game.topo.site_by_label(b)
                fns.append(lambda ctx, s=site: [s])
            elif isinstance(b, int):
                fns.append(lambda ctx, s=b: [s])
            else:
                fns.append(compile_region(b, cc))
        game._regions.setdefault(rname, []).extend(fns)

    for meta in rules.walk():
        if meta.label == 'meta':
            for a in meta.positional():
                items = a.items if isinstance(a, Array) else [a]
                for x in items:
                    t = x.label if isinstance(x, LudNode) else as_tag(x)
                    if t is not None:
                        # the rule names appear lowercased in game text
                        t = t[0].upper() + t[1:]
                    if t in META_NAMES:
                        game.metas.add(t)
                    elif t is not None:
                        raise CompileError(f'unsupported meta rule {t!r}')

    start = rules.first('start')
    if start is not None:
        game.start_fns = _compile_start(start, game, cc)

    phase_nodes = []
    for a in rules.positional():
        items = a.items if isinstance(a, Array) else [a]
        for x in items:
            if isinstance(x, LudNode) and x.label == 'phase':
                phase_nodes.append(x)
    ph = rules.named('phases')
    if isinstance(ph, Array):
        phase_nodes.extend(x for x in ph.items
                           if isinstance(x, LudNode) and x.label == 'phase')

    if phase_nodes:
        game.phases = _compile_phases(phase_nodes, game, cc)
    else:
        play = rules.first('play')
        if play is None:
            raise CompileError('game has no (play ...) entry')
        game.play_fn = _compile_play(play, game, cc)

    end = rules.first('end')
    if end is not None:
        game.end_fns = _compile_end(end, game, cc)

    # Component move rules compile once per piece declaration; clones of an
    # Each piece share the closure since it reads the mover from the context.
    compiled = {}
    for comp in game.components[1:]:
        if comp.moves_node is None:
            continue
        key = id(comp.moves_node)
        if key not in compiled:
            from ..movegen import compile_moves
            compiled[key] = compile_moves(comp.moves_node, cc)
        comp.moves_fn = compiled[key]

    if game.puzzle_domain is not None and game.puzzle_regions:
        game.puzzle_regions = list(game.puzzle_regions)
    return game
