"""Move generation checked against from-scratch enumerators.

Each scenario compiles one small game, sweeps seeded random positions, and
compares the full legal move set with an independent brute-force enumerator.
A move is compared by its observable footprint: the decision endpoints plus
the exact set of board cells it changes when applied. The enumerators only
consult the topology tables (step/radial/winds), which have their own tests.
"""

import random

from conftest import game_of, start
from ludex.actions import ActionAdd, ActionRemove, apply_move
from ludex.engine.run import legal_moves

# Own angle table so direction arithmetic does not lean on engine internals.
ANGLE = {
    'E': 0.0, 'ENE': 30.0, 'NE': 45.0, 'NNE': 60.0, 'N': 90.0,
    'NNW': 120.0, 'NW': 135.0, 'WNW': 150.0, 'W': 180.0, 'WSW': 210.0,
    'SW': 225.0, 'SSW': 240.0, 'S': 270.0, 'SSE': 300.0, 'SE': 315.0,
    'ESE': 330.0,
}


def flip(w):
    a = (ANGLE[w] + 180.0) % 360.0
    return next(k for k, v in ANGLE.items() if v == a)


def span(a, b):
    d = abs(ANGLE[a] - ANGLE[b]) % 360.0
    return min(d, 360.0 - d)


class Pos:
    """Read-only snapshot of a position: flat arrays plus topology lookups."""

    def __init__(self, ctx, piece_ids):
        topo = ctx.topo
        self.n = topo.num_sites
        self.what = [ctx.what(s) for s in range(self.n)]
        owner = {i: c.owner for i, c in enumerate(ctx.game.components)
                 if c is not None}
        self.who = [owner.get(w, 0) for w in self.what]
        self.mover = ctx.state.mover
        self.piece = dict(piece_ids)
        self._topo = topo

    def mine(self):
        return self.piece[self.mover]

    def ray(self, s, w, rel='Orthogonal'):
        return list(self._topo.radial(s, w, rel))

    def step(self, s, w, rel='Orthogonal'):
        return self._topo.step(s, w, rel)

    def winds(self, s, rel='Orthogonal'):
        return self._topo.supported_winds(s, rel)

    def basis(self, rel='Orthogonal'):
        # Every wind the tiling uses anywhere, clockwise from north.
        seen = {w for s in range(self.n) for w in self.winds(s, rel)}
        return sorted(seen, key=lambda w: (90.0 - ANGLE[w]) % 360.0)

    def empty(self, s):
        return self.what[s] == 0

    def enemy(self, s):
        return self.who[s] not in (0, self.mover)

    def friend(self, s):
        return self.who[s] == self.mover


def footprint(ctx, mv):
    probe = ctx.copy()
    probe.reset_iterators()
    before = [probe.what(s) for s in range(probe.topo.num_sites)]
    apply_move(probe, mv)
    after = [probe.what(s) for s in range(probe.topo.num_sites)]
    delta = frozenset((s, b, a)
                      for s, (b, a) in enumerate(zip(before, after)) if b != a)
    return (mv.from_site, mv.to_site, delta)


def engine_moves(ctx):
    ctx.trial.legal_cache = None
    ctx.reset_iterators()
    moves = legal_moves(ctx)
    sigs = {footprint(ctx, m) for m in moves}
    assert len(sigs) == len(moves), 'two legal moves share a footprint'
    return sigs


def scatter(ctx, rng, pieces, density, mover):
    for s in range(ctx.topo.num_sites):
        if ctx.what(s) != 0:
            ActionRemove(site=s).apply(ctx)
    k = int(ctx.topo.num_sites * density)
    for s in rng.sample(range(ctx.topo.num_sites), k):
        ActionAdd(site=s, what=rng.choice(pieces)).apply(ctx)
    ctx.state.mover = mover
    ctx.trial.legal_cache = None


def sweep(text, oracle, piece='Disc', positions=20, density=0.35,
          base_delta=2, min_captures=1):
    """Compare engine and oracle on seeded random positions for both movers.

    min_captures guards against a vacuous pass: at least that many generated
    moves across the sweep must disturb more sites than a bare move would
    (base_delta is the footprint size of a capture-free move).
    """
    g = game_of(text)
    ctx = start(g, seed=0)
    ids = {1: g.piece_id(piece, 1), 2: g.piece_id(piece, 2)}
    rng = random.Random(99)

    def lively(sig):
        f, _, d = sig
        if len(d) > base_delta:
            return True
        # A capture by replacement keeps the footprint small but still
        # wipes out a piece somewhere other than the origin.
        return any(s != f and b != 0 for (s, b, a) in d)

    captures = 0
    compared = 0
    for attempt in range(positions):
        for mover in (1, 2):
            scatter(ctx, rng, list(ids.values()), density, mover)
            got = engine_moves(ctx)
            want = oracle(Pos(ctx, ids))
            assert got == want, f'position {attempt} mover {mover}'
            compared += len(got)
            captures += sum(1 for sig in got if lively(sig))
    assert compared > 0
    assert captures >= min_captures, 'sweep never exercised a capture'
    return compared


def put(ctx, placements):
    """Wipe the board and place {site: component_id}."""
    for s in range(ctx.topo.num_sites):
        if ctx.what(s) != 0:
            ActionRemove(site=s).apply(ctx)
    for s, w in placements.items():
        ActionAdd(site=s, what=w).apply(ctx)
    ctx.trial.legal_cache = None


# -- hop ---------------------------------------------------------------------

HOP = '''
(game "HopOver"
    (players 2)
    (equipment {{
        (board {board})
        (piece "Disc" Each
            (move Hop Orthogonal
                (between {extra} if:(is Enemy (who at:(between)))
                    (apply (remove (between))))
                (to if:(is Empty (to)))))
    }})
    (rules
        (play (forEach Piece))
        (end (if (no Moves Next) (result Mover Win)))
    )
)
'''


def hop_oracle(pos, lo=1, hi=1, before=0, after=0):
    sigs = set()
    for f in range(pos.n):
        if not pos.friend(f):
            continue
        wf = pos.what[f]
        for w in pos.winds(f):
            ray = pos.ray(f, w)
            for nb in range(before + 1):
                if nb > 0 and (nb - 1 >= len(ray) or not pos.empty(ray[nb - 1])):
                    break
                for r in range(lo, hi + 1):
                    if nb + r > len(ray):
                        break
                    run = ray[nb:nb + r]
                    if not all(pos.enemy(b) for b in run):
                        break
                    for k in range(after + 1):
                        ti = nb + r + k
                        if ti >= len(ray):
                            break
                        t = ray[ti]
                        if pos.empty(t):
                            delta = {(f, wf, 0), (t, 0, wf)}
                            delta |= {(b, pos.what[b], 0) for b in run}
                            sigs.add((f, t, frozenset(delta)))
                        else:
                            break
    return sigs


def test_hop_single_hurdle_square():
    text = HOP.format(board='(square 7)', extra='')
    sweep(text, hop_oracle, min_captures=20)


def test_hop_single_hurdle_hex():
    text = HOP.format(board='(hex 3)', extra='')
    sweep(text, hop_oracle, density=0.45, min_captures=10)


def test_hop_hurdle_run_range():
    text = HOP.format(board='(square 7)', extra='(range 1 2)')
    sweep(text, lambda pos: hop_oracle(pos, lo=1, hi=2), density=0.45,
          min_captures=20)


def test_hop_before_and_after_gaps():
    text = HOP.format(board='(square 7)', extra='before:1 after:2')
    sweep(text, lambda pos: hop_oracle(pos, before=1, after=2),
          min_captures=20)


def test_hop_crafted_neighbour_jump():
    g = game_of(HOP.format(board='(square 7)', extra=''))
    ctx = start(g)
    d1, d2 = g.piece_id('Disc', 1), g.piece_id('Disc', 2)
    put(ctx, {8: d1, 9: d2})
    ctx.state.mover = 1
    got = engine_moves(ctx)
    assert (8, 10, frozenset({(8, d1, 0), (9, d2, 0), (10, 0, d1)})) in got
    assert all(f == 8 for (f, _, _) in got)
    # Hurdles must be enemies: a friendly neighbour is not jumpable.
    put(ctx, {8: d1, 9: d1})
    got = engine_moves(ctx)
    assert not any(t == 10 for (_, t, _) in got)


# -- slide ---------------------------------------------------------------------

SLIDE_ROOK = '''
(game "Rook"
    (players 2)
    (equipment { (board (square 7)) (piece "Disc" Each (move Slide Orthogonal)) })
    (rules
        (play (forEach Piece))
        (end (if (no Moves Next) (result Mover Win)))
    )
)
'''


def slide_oracle(pos):
    sigs = set()
    for f in range(pos.n):
        if not pos.friend(f):
            continue
        wf = pos.what[f]
        for w in pos.winds(f):
            for t in pos.ray(f, w):
                if not pos.empty(t):
                    break
                sigs.add((f, t, frozenset({(f, wf, 0), (t, 0, wf)})))
    return sigs


def test_slide_rook_lines():
    sweep(SLIDE_ROOK, slide_oracle, density=0.3, min_captures=0)


SLIDE_TRAIL = '''
(game "Scorch"
    (players 2)
    (equipment {
        (board (square 7))
        (piece "Queen" Each (move Slide Orthogonal (between trail:(id "Dot0"))))
        (piece "Dot" Neutral)
    })
    (rules
        (start { (place "Queen1" {"A1"}) (place "Queen2" {"G7"}) })
        (play (forEach Piece))
        (end (if (no Moves Next) (result Mover Win)))
    )
)
'''


def trail_oracle(dot):
    def run(pos):
        sigs = set()
        for f in range(pos.n):
            if not pos.friend(f):
                continue
            wf = pos.what[f]
            for w in pos.winds(f):
                passed = []
                for t in pos.ray(f, w):
                    if not pos.empty(t):
                        break
                    delta = {(f, wf, dot), (t, 0, wf)}
                    delta |= {(p, 0, dot) for p in passed}
                    sigs.add((f, t, frozenset(delta)))
                    passed.append(t)
        return sigs
    return run


def test_slide_leaves_a_trail():
    g = game_of(SLIDE_TRAIL)
    dot = g.piece_id('Dot', 0)
    sweep(SLIDE_TRAIL, trail_oracle(dot), piece='Queen', density=0.25,
          min_captures=20)


def test_trail_fills_every_passed_site():
    g = game_of(SLIDE_TRAIL)
    ctx = start(g)
    q1 = g.piece_id('Queen', 1)
    dot = g.piece_id('Dot', 0)
    put(ctx, {0: q1})
    ctx.state.mover = 1
    got = engine_moves(ctx)
    # A1 -> A4 paints A1, A2, A3.
    lane = (0, 21, frozenset({(0, q1, dot), (7, 0, dot), (14, 0, dot),
                              (21, 0, q1)}))
    assert lane in got


# -- leap ------------------------------------------------------------------------

LEAP = '''
(game "Jumper"
    (players 2)
    (equipment {{
        (board {board})
        (piece "Disc" Each
            (move Leap {{ {{F F R F}} {{F F L F}} }} {flags}
                (to if:(or (is Empty (to)) (is Enemy (who at:(to))))
                    (apply (remove (to))))))
    }})
    (rules
        (play (forEach Piece))
        (end (if (no Moves Next) (result Mover Win)))
    )
)
'''

WALKS = (('F', 'F', 'R', 'F'), ('F', 'F', 'L', 'F'))


def turtle(pos, start_site, walk, facing):
    basis = pos.basis()
    at = start_site
    face = facing
    for tok in walk:
        if tok == 'F':
            at = pos.step(at, face)
            if at is None:
                return None
        else:
            winds = [w for w in basis if w != face]
            base = ANGLE[face]
            if tok == 'R':
                face = min(winds, key=lambda w: ((base - ANGLE[w]) % 360.0)
                           or 360.0)
            else:
                face = min(winds, key=lambda w: ((ANGLE[w] - base) % 360.0)
                           or 360.0)
    return at


def leap_oracle(pos, facings_of):
    sigs = set()
    for f in range(pos.n):
        if not pos.friend(f):
            continue
        wf = pos.what[f]
        targets = []
        for facing in facings_of(pos, f):
            for walk in WALKS:
                t = turtle(pos, f, walk, facing)
                if t is not None and t != f and t not in targets:
                    targets.append(t)
        for t in targets:
            if pos.empty(t):
                delta = {(f, wf, 0), (t, 0, wf)}
            elif pos.enemy(t):
                delta = {(f, wf, 0), (t, pos.what[t], wf)}
            else:
                continue
            sigs.add((f, t, frozenset(delta)))
    return sigs


def test_leap_knight_all_rotations():
    text = LEAP.format(board='(square 7)', flags='')
    sweep(text, lambda pos: leap_oracle(pos, lambda p, f: p.basis()),
          min_captures=10)


def test_leap_knight_all_rotations_hex():
    text = LEAP.format(board='(hex 3)', flags='')
    sweep(text, lambda pos: leap_oracle(pos, lambda p, f: p.basis()),
          density=0.3, min_captures=5)


def test_leap_without_rotations_uses_one_facing():
    text = LEAP.format(board='(square 7)', flags='rotations:false')

    def one_facing(p, f):
        return p.basis()[:1]
    sweep(text, lambda pos: leap_oracle(pos, one_facing), min_captures=4)


def test_leap_forward_filters_facings():
    text = LEAP.format(board='(square 7)', flags='forward:true')

    def ahead(p, f):
        fw = 'N' if p.mover != 2 else 'S'
        return [w for w in p.basis() if w == fw or span(w, fw) < 90.0]
    sweep(text, lambda pos: leap_oracle(pos, ahead), min_captures=4)


def test_knight_move_count_centre_and_corner():
    text = LEAP.format(board='(square 7)', flags='')
    g = game_of(text)
    ctx = start(g)
    d1 = g.piece_id('Disc', 1)
    put(ctx, {24: d1})            # D4, the centre
    ctx.state.mover = 1
    assert len(engine_moves(ctx)) == 8
    put(ctx, {0: d1})             # A1
    assert len(engine_moves(ctx)) == 2


# -- custodial -------------------------------------------------------------------

CUSTODIAL = '''
(game "Pinch"
    (players 2)
    (equipment {{ (board (square 7)) (piece "Disc" Each) }})
    (rules
        (play (move Add (to (sites Empty))
            (then (custodial (from (last To)) Orthogonal
                (between {cap} if:(is Enemy (who at:(between)))
                    (apply (remove (between))))
                (to if:(is Friend (who at:(to))))))))
        (end (if (no Moves Next) (result Mover Win)))
    )
)
'''


def custodial_oracle(cap):
    def run(pos):
        sigs = set()
        for e in range(pos.n):
            if not pos.empty(e):
                continue
            caps = set()
            for w in pos.winds(e):
                ray = pos.ray(e, w)
                flanked = []
                flanker = None
                for s in ray:
                    if pos.enemy(s):
                        flanked.append(s)
                    else:
                        flanker = s
                        break
                if not flanked or flanker is None:
                    continue
                if cap is not None and len(flanked) > cap:
                    continue
                if not pos.friend(flanker):
                    continue
                caps |= set(flanked)
            delta = {(e, 0, pos.mine())}
            delta |= {(b, pos.what[b], 0) for b in caps}
            sigs.add((e, e, frozenset(delta)))
        return sigs
    return run


def test_custodial_single_flank():
    text = CUSTODIAL.format(cap='(max 1)')
    sweep(text, custodial_oracle(1), density=0.4, base_delta=1,
          min_captures=20)


def test_custodial_unbounded_flank():
    text = CUSTODIAL.format(cap='')
    sweep(text, custodial_oracle(None), density=0.4, base_delta=1,
          min_captures=20)


def test_custodial_crafted_row():
    # F E E . placing at the dot pinches both enemies against the friend,
    # but only under the unbounded rule; (max 1) lets the pair survive.
    for cap, taken in (('', True), ('(max 1)', False)):
        g = game_of(CUSTODIAL.format(cap=cap))
        ctx = start(g)
        d1, d2 = g.piece_id('Disc', 1), g.piece_id('Disc', 2)
        put(ctx, {7: d1, 8: d2, 9: d2})
        ctx.state.mover = 1
        got = engine_moves(ctx)
        expect = {(10, 0, d1)}
        if taken:
            expect |= {(8, d2, 0), (9, d2, 0)}
        assert (10, 10, frozenset(expect)) in got


# -- enclose ---------------------------------------------------------------------

ENCLOSE = '''
(game "Encircle"
    (players 2)
    (equipment { (board (square 8) use:Vertex) (piece "Stone" Each) })
    (rules
        (play (move Add (to (sites Empty))
            (then (enclose (from (last To)) Orthogonal
                (between if:(is Enemy (who at:(between)))
                    (apply (remove (between))))))))
        (end (if (no Moves Next) (result Mover Win)))
    )
)
'''


def enclose_oracle(pos):
    owner = {pos.piece[1]: 1, pos.piece[2]: 2}

    def neighbors(s):
        return [t for w in pos.winds(s)
                if (t := pos.step(s, w)) is not None]

    sigs = set()
    for e in range(pos.n):
        if not pos.empty(e):
            continue
        board = list(pos.what)
        board[e] = pos.mine()

        def enemy(s):
            return owner.get(board[s], 0) not in (0, pos.mover)

        caps = set()
        seen = set()
        for nb in neighbors(e):
            if nb in seen or not enemy(nb):
                continue
            comp = {nb}
            queue = [nb]
            free = False
            while queue:
                x = queue.pop()
                for y in neighbors(x):
                    if y in comp:
                        continue
                    if enemy(y):
                        comp.add(y)
                        queue.append(y)
                    elif board[y] == 0:
                        free = True
            seen |= comp
            if not free:
                caps |= comp
        delta = {(e, 0, pos.mine())}
        delta |= {(b, pos.what[b], 0) for b in caps}
        sigs.add((e, e, frozenset(delta)))
    return sigs


def test_enclose_on_go_board():
    sweep(ENCLOSE, enclose_oracle, piece='Stone', positions=12, density=0.5,
          base_delta=1, min_captures=3)


def test_enclose_crafted_corner_group():
    g = game_of(ENCLOSE)
    s1, s2 = g.piece_id('Stone', 1), g.piece_id('Stone', 2)
    ctx = start(g)
    # Corner pair A1 A2 walled by B1 B2; A3 closes the last liberty.
    put(ctx, {0: s2, 9: s2, 1: s1, 10: s1})
    ctx.state.mover = 1
    got = engine_moves(ctx)
    closing = frozenset({(18, 0, s1), (0, s2, 0), (9, s2, 0)})
    assert (18, 18, closing) in got
    # Leave B2 open and the group keeps breathing through it.
    put(ctx, {0: s2, 9: s2, 1: s1})
    got = engine_moves(ctx)
    assert (18, 18, frozenset({(18, 0, s1)})) in got


# -- intervene -------------------------------------------------------------------

INTERVENE = '''
(game "Wedge"
    (players 2)
    (equipment {{ (board (square 7)) (piece "Disc" Each) }})
    (rules
        (play (move Add (to (sites Empty))
            (then (intervene (from (last To)) Orthogonal {cap}
                (to if:(is Enemy (who at:(to))) (apply (remove (to))))))))
        (end (if (no Moves Next) (result Mover Win)))
    )
)
'''


def intervene_oracle(cap):
    def run(pos):
        sigs = set()
        for e in range(pos.n):
            if not pos.empty(e):
                continue

            def side(wind):
                got = []
                for s in pos.ray(e, wind):
                    if not pos.enemy(s):
                        break
                    got.append(s)
                    if len(got) >= cap:
                        break
                return got

            caps = set()
            done = set()
            for w in pos.winds(e):
                axis = frozenset((w, flip(w)))
                if axis in done:
                    continue
                done.add(axis)
                a, b = side(w), side(flip(w))
                if a and b:
                    caps |= set(a) | set(b)
            delta = {(e, 0, pos.mine())}
            delta |= {(s, pos.what[s], 0) for s in caps}
            sigs.add((e, e, frozenset(delta)))
        return sigs
    return run


def test_intervene_single_each_side():
    text = INTERVENE.format(cap='')
    sweep(text, intervene_oracle(1), density=0.4, base_delta=1,
          min_captures=20)


def test_intervene_two_each_side():
    text = INTERVENE.format(cap='(between (max 2))')
    sweep(text, intervene_oracle(2), density=0.45, base_delta=1,
          min_captures=20)


def test_intervene_crafted_needs_both_sides():
    text = INTERVENE.format(cap='')
    g = game_of(text)
    d1, d2 = g.piece_id('Disc', 1), g.piece_id('Disc', 2)
    ctx = start(g)
    put(ctx, {8: d2, 10: d2})
    ctx.state.mover = 1
    got = engine_moves(ctx)
    both = frozenset({(9, 0, d1), (8, d2, 0), (10, d2, 0)})
    assert (9, 9, both) in got
    # With one side empty the wedge does not fire.
    put(ctx, {8: d2})
    got = engine_moves(ctx)
    assert (9, 9, frozenset({(9, 0, d1)})) in got


# -- surround --------------------------------------------------------------------

SURROUND = '''
(game "Smother"
    (players 2)
    (equipment { (board (hex 3)) (piece "Disc" Each) })
    (rules
        (play (move Add (to (sites Empty))
            (then (surround (from (last To)) Orthogonal
                (between if:(is Enemy (who at:(between)))
                    (apply (remove (between))))
                (to if:(is Friend (who at:(to))))))))
        (end (if (no Moves Next) (result Mover Win)))
    )
)
'''


def surround_oracle(pos):
    sigs = set()
    for e in range(pos.n):
        if not pos.empty(e):
            continue

        def friend_after(s):
            return s == e or pos.friend(s)

        caps = set()
        for w in pos.winds(e):
            b = pos.step(e, w)
            if b is None or not pos.enemy(b):
                continue
            ring = [t for w2 in pos.winds(b)
                    if (t := pos.step(b, w2)) is not None]
            if ring and all(friend_after(t) for t in ring):
                caps.add(b)
        delta = {(e, 0, pos.mine())} | {(b, pos.what[b], 0) for b in caps}
        sigs.add((e, e, frozenset(delta)))
    return sigs


def test_surround_on_hex():
    sweep(SURROUND, surround_oracle, positions=25, density=0.55,
          base_delta=1, min_captures=3)


# -- directionCapture -------------------------------------------------------------

CHARGE = '''
(game "Charge"
    (players 2)
    (equipment {{
        (board (square 7))
        (piece "Disc" Each
            (move Step Orthogonal (to if:(is Empty (to)))
                (then (directionCapture (from {anchor}) {flags}
                    (to if:(is Enemy (who at:(to))) (apply (remove (to))))))))
    }})
    (rules
        (play (forEach Piece))
        (end (if (no Moves Next) (result Mover Win)))
    )
)
'''


def charge_oracle(withdraw):
    def run(pos):
        sigs = set()
        for f in range(pos.n):
            if not pos.friend(f):
                continue
            wf = pos.what[f]
            for w in pos.winds(f):
                t = pos.step(f, w)
                if t is None or not pos.empty(t):
                    continue
                # The wind of the decision move, recovered the way the
                # engine does: the adjacent ray that reaches t soonest.
                wind = min(
                    (ww for ww in pos.winds(f, 'Adjacent')
                     if t in pos.ray(f, ww, 'Adjacent')),
                    key=lambda ww: pos.ray(f, ww, 'Adjacent').index(t))
                if withdraw:
                    anchor, wind = f, flip(wind)
                else:
                    anchor = t
                caps = []
                for s in pos.ray(anchor, wind, 'Adjacent'):
                    if pos.enemy(s):
                        caps.append(s)
                    else:
                        break
                delta = {(f, wf, 0), (t, 0, wf)}
                delta |= {(s, pos.what[s], 0) for s in caps}
                sigs.add((f, t, frozenset(delta)))
        return sigs
    return run


def test_direction_capture_approach():
    text = CHARGE.format(anchor='(last To)', flags='')
    sweep(text, charge_oracle(False), density=0.4, min_captures=20)


def test_direction_capture_withdrawal():
    text = CHARGE.format(anchor='(last From)', flags='opposite:true')
    sweep(text, charge_oracle(True), density=0.4, min_captures=20)


def test_direction_capture_crafted_line():
    text = CHARGE.format(anchor='(last To)', flags='')
    g = game_of(text)
    d1, d2 = g.piece_id('Disc', 1), g.piece_id('Disc', 2)
    ctx = start(g)
    # F . E E E F up a file: stepping in eats the whole run and stops at
    # the friendly piece.
    put(ctx, {7: d1, 21: d2, 28: d2, 35: d2, 42: d1})
    ctx.state.mover = 1
    got = engine_moves(ctx)
    surge = frozenset({(7, d1, 0), (14, 0, d1),
                       (21, d2, 0), (28, d2, 0), (35, d2, 0)})
    assert (7, 14, surge) in got
