'''
Trial runtime: build the starting context, enumerate legal moves with meta
rules applied, advance through moves, evaluate end rules, assign ranks, and
run random playouts.

Rank bookkeeping hands out integer positions 1..n from both ends; k players
finishing together share the mean of the next k positions from their end.
A draw hands every still-active player the mean of whatever positions remain.
'''

from __future__ import annotations

import random

from ..actions import ActionPass, ActionSwapPlayers, Move, apply_move
from ..context import Context, Trial
from ..state.containers import ContainerFlatState, GameState, PuzzleState
from .game import Game


# ---------------------------------------------------------------------------
# Context construction.

def initial_context(game: Game, seed=None) -> Context:
    rng = random.Random(seed)
    state = GameState(game.num_players)
    feats = dict(
        with_count='Count' in game.flags,
        with_state='SiteState' in game.flags,
        with_rotation='Rotation' in game.flags,
        with_value='Value' in game.flags,
    )
    ncomp = len(game.components) - 1
    containers = [ContainerFlatState(
        game.topo.num_sites, ncomp, game.num_players, game.zobrist,
        offset=0, **feats)]
    for player in sorted(game._hands):
        off, size = game._hands[player]
        containers.append(ContainerFlatState(
            size, ncomp, game.num_players, game.zobrist,
            offset=off, **feats))
    puzzle = None
    if game.puzzle_domain is not None:
        puzzle = PuzzleState(game.topo.num_sites, *game.puzzle_domain)

    trial = Trial()
    n = game.num_players
    trial.active = [False] + [True] * n
    trial.ranks = [0.0] * (n + 1)

    ctx = Context(game, state, containers, rng, trial, puzzle)
    for fn in game.start_fns:
        fn(ctx)
    ctx.reset_iterators()
    trial.hashes.append(ctx.position_hash())
    legal_moves(ctx)
    return ctx


# ---------------------------------------------------------------------------
# Legal moves.

def _next_active(trial, n, after):
    p = after
    for _ in range(n):
        p = p % n + 1
        if trial.active[p]:
            return p
    return after


def _post_move_hash(ctx, move):
    """Hash of the state the move leads to, mover already rotated, matching
    the entries advance() appends to the hash history."""
    probe = ctx.copy()
    probe.reset_iterators()
    probe.pending_again = False
    apply_move(probe, move)
    st = probe.state
    if not probe.pending_again:
        n = ctx.game.num_players
        nxt = st.next
        if not ctx.trial.active[nxt]:
            nxt = _next_active(ctx.trial, n, nxt)
        st.mover = nxt
    return probe.position_hash()


def legal_moves(ctx: Context) -> list:
    trial = ctx.trial
    if trial.over:
        return []
    if trial.legal_cache is not None:
        return trial.legal_cache
    game = ctx.game
    state = ctx.state
    ctx.reset_iterators()
    moves = list(dict.fromkeys(game.play_for(ctx)(ctx)))

    if ('Swap' in game.metas and game.num_players == 2
            and state.mover == 2 and state.num_turn == 1):
        moves.append(Move([ActionSwapPlayers(p1=1, p2=2, decision=True)]))

    if 'NoRepeat' in game.metas:
        seen = set(trial.hashes)
        moves = [m for m in moves if _post_move_hash(ctx, m) not in seen]

    moves.sort(key=lambda m: m.sort_key())
    for m in moves:
        m.mover = state.mover
    trial.legal_cache = moves
    return moves


# ---------------------------------------------------------------------------
# Rank assignment.

def _remaining_positions(trial, n):
    lo = trial.best_used + 1
    hi = n - trial.worst_used
    return lo, hi


def _assign(trial, player, rank):
    if not trial.active[player]:
        raise ValueError(f'player {player} ranked twice')
    trial.ranks[player] = rank
    trial.active[player] = False


def _finish(ctx):
    trial = ctx.trial
    n = ctx.game.num_players
    remaining = [p for p in range(1, n + 1) if trial.active[p]]
    if remaining:
        lo, hi = _remaining_positions(trial, n)
        r = (lo + hi) / 2
        for p in remaining:
            _assign(trial, p, r)
        trial.best_used += len(remaining)
    trial.over = True
    trial.legal_cache = []
    best = min(trial.ranks[1:])
    trial.winners = [p for p in range(1, n + 1) if trial.ranks[p] == best]
    trial.status = trial.winners[0] if len(trial.winners) == 1 else 0


def assign_ranks(ctx: Context, outcome) -> None:
    """Fold one end outcome into the trial's ranking state. Ends the game
    when a draw fires, byScore ranks everyone, or at most one player is
    left active."""
    trial = ctx.trial
    n = ctx.game.num_players
    kind = outcome[0]
    if kind == 'draw':
        _finish(ctx)
        return
    if kind == 'byscore':
        overrides = outcome[1]
        entries = []
        for p in range(1, n + 1):
            if trial.active[p]:
                entries.append((overrides.get(p, ctx.state.scores[p]), p))
        entries.sort(key=lambda e: (-e[0], e[1]))
        i = 0
        while i < len(entries):
            j = i
            while j < len(entries) and entries[j][0] == entries[i][0]:
                j += 1
            k = j - i
            r = trial.best_used + 1 + (k - 1) / 2
            for _, p in entries[i:j]:
                _assign(trial, p, r)
            trial.best_used += k
            i = j
        _finish(ctx)
        return
    if kind != 'results':
        raise ValueError(f'unknown outcome {outcome!r}')
    res = outcome[1]
    wins = sorted(p for p, k in res.items()
                  if k == 'Win' and trial.active[p])
    losses = sorted(p for p, k in res.items()
                    if k == 'Loss' and trial.active[p] and p not in wins)
    if wins:
        k = len(wins)
        r = trial.best_used + 1 + (k - 1) / 2
        for p in wins:
            _assign(trial, p, r)
        trial.best_used += k
    if losses:
        k = len(losses)
        r = n - trial.worst_used - (k - 1) / 2
        for p in losses:
            _assign(trial, p, r)
        trial.worst_used += k
    remaining = [p for p in range(1, n + 1) if trial.active[p]]
    if len(remaining) <= 1:
        _finish(ctx)


# ---------------------------------------------------------------------------
# End rules.

def check_end(ctx: Context):
    """First firing end clause's outcome, or None. Evaluated with the mover
    still set to the player whose move just applied."""
    for fn in ctx.game.end_fns:
        ctx.reset_iterators()
        out = fn(ctx)
        if out is not None:
            return out
    return None


def _end_stalemate(ctx):
    ctx.state.stalemated[ctx.state.mover] = True
    _finish(ctx)


# ---------------------------------------------------------------------------
# Advancing.

def _rotate(ctx):
    state = ctx.state
    trial = ctx.trial
    if ctx.pending_again:
        state.num_turn_same_player += 1
        ctx.pending_again = False
        return
    n = ctx.game.num_players
    state.prev = state.mover
    m = state.next
    if not trial.active[m]:
        m = _next_active(trial, n, m)
    state.mover = m
    state.next = _next_active(trial, n, m)
    state.num_turn += 1
    state.num_turn_same_player = 0
    state.visited.clear()


def _phase_transition(ctx, player):
    game = ctx.game
    if not game.phases:
        return
    cur = ctx.state.phases[player]
    ph = game.phases[cur]
    if ph.next_target is None:
        return
    ctx.reset_iterators()
    if ph.next_cond is None or ph.next_cond(ctx):
        ctx.state.phases[player] = ph.next_target


def _step(ctx, move):
    game = ctx.game
    state = ctx.state
    trial = ctx.trial
    trial.legal_cache = None
    ctx.reset_iterators()
    ctx.pending_again = False
    move.mover = state.mover

    apply_move(ctx, move)
    trial.moves.append(move)
    state.counter += 1

    decision = move.decision_action()
    if isinstance(decision, ActionPass):
        state.passed_in_row += 1
    else:
        state.passed_in_row = 0
    if move.from_site >= 0:
        state.visited.add(move.from_site)
    if move.to_site >= 0:
        state.visited.add(move.to_site)

    outcome = check_end(ctx)
    if outcome is not None:
        assign_ranks(ctx, outcome)
    if trial.over:
        trial.hashes.append(ctx.position_hash())
        return

    _phase_transition(ctx, state.mover)
    _rotate(ctx)
    trial.hashes.append(ctx.position_hash())

    if (trial.num_moves() >= game.max_moves
            or state.num_turn >= game.max_turns):
        _finish(ctx)
        return

    if not legal_moves(ctx):
        _end_stalemate(ctx)


def advance(ctx: Context, move: Move) -> Context:
    trial = ctx.trial
    if trial.over:
        raise ValueError('advance called on a finished trial')
    legal = legal_moves(ctx)
    try:
        idx = legal.index(move)
    except ValueError:
        raise ValueError(f'move {move.describe()} is not legal here')
    trial.choices.append(idx)
    _step(ctx, move)

    while not trial.over and 'Automove' in ctx.game.metas:
        auto = legal_moves(ctx)
        if len(auto) != 1:
            break
        _step(ctx, auto[0])
    return ctx


# ---------------------------------------------------------------------------
# Playouts.

def playout(ctx: Context, max_steps=None):
    trial = ctx.trial
    steps = 0
    while not trial.over:
        if max_steps is not None and steps >= max_steps:
            break
        legal = legal_moves(ctx)
        if not legal:
            _end_stalemate(ctx)
            break
        i = ctx.rng.randrange(len(legal))
        trial.random_steps.append(len(trial.choices))
        advance(ctx, legal[i])
        steps += 1
    return trial


# ---------------------------------------------------------------------------
# Trial records.

def trial_record(ctx: Context, game_name=None, options=None, seed=None):
    trial = ctx.trial
    return {
        'game': game_name or ctx.game.name,
        'options': list(options or []),
        'seed': seed,
        'choices': list(trial.choices),
        'random_steps': list(trial.random_steps),
        'status': trial.status,
        'ranks': list(trial.ranks[1:]),
        'final_hash': format(trial.hashes[-1], 'x') if trial.hashes else None,
    }


def replay_record(game: Game, record) -> Context:
    """Rebuild a context by replaying a trial record. Random choices redraw
    from the generator so the stream stays aligned with the original run."""
    ctx = initial_context(game, record.get('seed'))
    rand = set(record.get('random_steps', []))
    for j, i in enumerate(record['choices']):
        legal = legal_moves(ctx)
        if j in rand:
            k = ctx.rng.randrange(len(legal))
            if k != i:
                raise ValueError(
                    f'replay diverged at step {j}: drew {k}, recorded {i}')
            ctx.trial.random_steps.append(len(ctx.trial.choices))
        if not (0 <= i < len(legal)):
            raise ValueError(f'illegal move index {i} at step {j}')
        advance(ctx, legal[i])
    return ctx
