"""Trial runtime: rank arithmetic, limits, repetition, records."""

import json
import random

import pytest

from conftest import game_of, start
from ludex.actions import Action, ActionPass, Move
from ludex.engine.run import (
    advance, assign_ranks, legal_moves, playout, replay_record, trial_record,
)

BARE_6P = '''
(game "Arena"
    (players 6)
    (equipment { (board (square 3)) (piece "Disc" Each) })
    (rules (play (move Pass)) (end (if (is Full) (result Mover Win))))
)
'''


def arena(n):
    return game_of(BARE_6P.replace('(players 6)', f'(players {n})'))


# -- rank arithmetic ------------------------------------------------------------
#
# Positions 1..n are handed out from both ends as players finish; a draw
# splits whatever positions are still free among everyone still active.

def test_two_player_draw_splits_evenly():
    ctx = start(arena(2))
    assign_ranks(ctx, ('draw',))
    assert ctx.trial.ranks[1:] == [1.5, 1.5]
    assert ctx.trial.over
    assert ctx.trial.status == 0


def test_third_win_takes_next_best_rank():
    ctx = start(arena(6))
    assign_ranks(ctx, ('results', {1: 'Win'}))
    assign_ranks(ctx, ('results', {2: 'Win'}))
    assert not ctx.trial.over
    assign_ranks(ctx, ('results', {3: 'Win'}))
    assert ctx.trial.ranks[1] == 1.0
    assert ctx.trial.ranks[2] == 2.0
    assert ctx.trial.ranks[3] == 3.0


def test_loss_takes_next_worst_rank():
    ctx = start(arena(5))
    assign_ranks(ctx, ('results', {5: 'Loss'}))
    assign_ranks(ctx, ('results', {4: 'Loss'}))
    assert ctx.trial.ranks[5] == 5.0
    assert ctx.trial.ranks[4] == 4.0
    assign_ranks(ctx, ('results', {3: 'Loss'}))
    assert ctx.trial.ranks[3] == 3.0


def test_draw_remainder_shares_mean_of_free_ranks():
    # One win (rank 1) and two losses (ranks 6, 5) leave 2, 3, 4 free;
    # a draw then hands the three still-active players (2+3+4)/3 each.
    ctx = start(arena(6))
    assign_ranks(ctx, ('results', {1: 'Win'}))
    assign_ranks(ctx, ('results', {6: 'Loss'}))
    assign_ranks(ctx, ('results', {5: 'Loss'}))
    assert not ctx.trial.over
    assign_ranks(ctx, ('draw',))
    assert ctx.trial.over
    for p in (2, 3, 4):
        assert ctx.trial.ranks[p] == 3.0
    assert ctx.trial.ranks[1] == 1.0
    assert ctx.trial.ranks[6] == 6.0
    assert ctx.trial.ranks[5] == 5.0


def test_simultaneous_wins_share_next_best_ranks():
    ctx = start(arena(4))
    assign_ranks(ctx, ('results', {1: 'Win', 2: 'Win'}))
    assert ctx.trial.ranks[1] == 1.5
    assert ctx.trial.ranks[2] == 1.5
    assert not ctx.trial.over
    # The shared positions count as used: the next win gets 3, and the
    # last player left standing inherits 4 when the game closes out.
    assign_ranks(ctx, ('results', {3: 'Win'}))
    assert ctx.trial.ranks[3] == 3.0
    assert ctx.trial.over
    assert ctx.trial.ranks[4] == 4.0


def test_simultaneous_losses_share_next_worst_ranks():
    ctx = start(arena(6))
    assign_ranks(ctx, ('results', {5: 'Loss', 6: 'Loss'}))
    assert ctx.trial.ranks[5] == 5.5
    assert ctx.trial.ranks[6] == 5.5
    assign_ranks(ctx, ('results', {4: 'Loss'}))
    assert ctx.trial.ranks[4] == 4.0


def test_reranking_a_finished_player_is_ignored():
    # End rules may keep firing for a player who already holds a rank;
    # the repeat outcome must not disturb the standings.
    ctx = start(arena(4))
    assign_ranks(ctx, ('results', {1: 'Win'}))
    assign_ranks(ctx, ('results', {1: 'Loss'}))
    assert ctx.trial.ranks[1] == 1.0
    assert ctx.trial.best_used == 1
    assert ctx.trial.worst_used == 0


def test_byscore_ranks_by_score_with_ties_shared():
    ctx = start(arena(4))
    ctx.state.scores[1:5] = [3, 7, 3, 1]
    assign_ranks(ctx, ('byscore', {}))
    assert ctx.trial.ranks[2] == 1.0
    assert ctx.trial.ranks[1] == 2.5
    assert ctx.trial.ranks[3] == 2.5
    assert ctx.trial.ranks[4] == 4.0
    assert ctx.trial.status == 2


# -- limits ----------------------------------------------------------------------

PASS_FOREVER = '''
(game "Idle"
    (players 2)
    (equipment { (board (square 3)) (piece "Disc" Each) })
    (rules (play (move Pass)) (end (if (is Full) (result Mover Win))))
)
'''


def test_turn_limit_draws_at_2500_turns():
    g = game_of(PASS_FOREVER)
    assert g.max_turns == 2500
    ctx = start(g)
    playout(ctx)
    assert ctx.trial.over
    assert ctx.state.num_turn == 2500
    assert ctx.trial.num_moves() < 10000
    assert ctx.trial.ranks[1:] == [1.5, 1.5]


def test_move_limit_draws_at_10000_moves():
    # moveAgain keeps the turn counter parked, so the move cap fires first.
    g = game_of(PASS_FOREVER.replace(
        '(move Pass)', '(move Pass (then (moveAgain)))'))
    ctx = start(g)
    playout(ctx)
    assert ctx.trial.over
    assert ctx.trial.num_moves() == 10000
    assert ctx.state.num_turn < 2500
    assert ctx.trial.ranks[1:] == [1.5, 1.5]


# -- hashing ---------------------------------------------------------------------

def scratch_hash(ctx):
    h = ctx.game.zobrist.mover_key(ctx.state.mover)
    for c in ctx.containers:
        h ^= c.hash_from_scratch()
    for v in ctx.state.pending:
        h ^= ctx.game.zobrist.key('pending', 0, v)
    return h


LINE3 = '''
(game "Line"
    (players 2)
    (equipment { (board (square 3)) (piece "Disc" Each) })
    (rules
        (play (move Add (to (sites Empty))))
        (end (if (is Line 3) (result Mover Win)))
    )
)
'''

MANCALA_MINI = '''
(game "Pits"
    (players 2)
    (equipment {
        (mancalaBoard 2 6 (track "Track" "1,E,N,W" loop:true))
        (piece "Seed" Shared)
        (map { (pair P1 FirstSite) (pair P2 LastSite) })
    })
    (rules
        (start (set Count 4 to:(sites Track)))
        (play (move Select
            (from (if (= 1 (mover)) (sites Row 0) (sites Row 2))
                  if:(> (count at:(from)) 0))
            (then (sow
                if:(= 4 (count at:(to)))
                apply:(fromTo (from (to)) (to (mapEntry Mover)) count:4)))))
        (end (if (no Moves Next) (byScore {
            (score P1 (count at:(mapEntry P1)))
            (score P2 (count at:(mapEntry P2)))
        })))
    )
)
'''


def _checked_actions(monkeypatch):
    """Patch every action to recheck the running hash after it applies."""
    def check(cls):
        orig = cls.apply

        def apply(self, ctx, _orig=orig):
            _orig(self, ctx)
            for c in ctx.containers:
                assert c.hash == c.hash_from_scratch()
        return apply

    seen = set()
    stack = [Action]
    while stack:
        cls = stack.pop()
        for sub in cls.__subclasses__():
            if sub not in seen:
                seen.add(sub)
                stack.append(sub)
        if 'apply' in cls.__dict__ and cls is not Action:
            monkeypatch.setattr(cls, 'apply', check(cls))


@pytest.mark.parametrize('text,count', [(LINE3, 60), (MANCALA_MINI, 40)])
def test_incremental_hash_survives_every_action(monkeypatch, text, count):
    _checked_actions(monkeypatch)
    g = game_of(text)
    for seed in range(count):
        ctx = start(g, seed=seed)
        playout(ctx)
        assert ctx.position_hash() == scratch_hash(ctx)


def test_position_hash_matches_scratch_after_each_move():
    g = game_of(MANCALA_MINI)
    ctx = start(g, seed=5)
    while not ctx.trial.over:
        legal = legal_moves(ctx)
        advance(ctx, legal[ctx.rng.randrange(len(legal))])
        assert ctx.position_hash() == scratch_hash(ctx)


SHUFFLE = '''
(game "Shuffle"
    (players 2)
    (equipment { (board (square 3)) (piece "Disc" Each) })
    (rules
        (meta (noRepeat))
        (start {
            (place "Disc1" {"A1"})
            (place "Disc2" {"C3"})
        })
        (play (forEach Piece (move Step Orthogonal (to if:(is Empty (to))))))
        (end (if (is Full) (result Mover Win)))
    )
)
'''


def test_norepeat_never_revisits_a_position():
    # Two pieces drifting on a 3x3 board can only end by running out of
    # fresh positions, so every playout stresses the repetition filter.
    g = game_of(SHUFFLE)
    assert 'NoRepeat' in g.metas
    for seed in range(1000):
        ctx = start(g, seed=seed)
        playout(ctx)
        hashes = ctx.trial.hashes
        assert len(hashes) == len(set(hashes)), f'seed {seed} repeated'


def _move_to(ctx, f, t):
    (mv,) = [m for m in legal_moves(ctx)
             if m.from_site == f and m.to_site == t]
    advance(ctx, mv)


def test_norepeat_filters_the_move_closing_a_cycle():
    g = game_of(SHUFFLE)
    ctx = start(g, seed=0)
    _move_to(ctx, 0, 1)   # P1 out
    _move_to(ctx, 8, 7)   # P2 out
    _move_to(ctx, 1, 0)   # P1 back
    # P2 stepping 7 -> 8 would restore the opening position; it must be gone.
    closing = [m for m in legal_moves(ctx)
               if m.from_site == 7 and m.to_site == 8]
    assert not closing
    others = [m for m in legal_moves(ctx) if m.from_site == 7]
    assert others


# -- meta rules -------------------------------------------------------------------

SWAP_GAME = '''
(game "Swappable"
    (players 2)
    (equipment { (board (square 3)) (piece "Disc" Each) })
    (rules
        (meta (swap))
        (play (move Add (to (sites Empty))))
        (end (if (is Line 3) (result Mover Win)))
    )
)
'''


def test_swap_offered_only_on_second_players_first_turn():
    g = game_of(SWAP_GAME)
    ctx = start(g, seed=0)

    def swaps(moves):
        return [m for m in moves
                if any(type(a).__name__ == 'ActionSwapPlayers'
                       for a in m.actions)]

    assert not swaps(legal_moves(ctx))
    advance(ctx, legal_moves(ctx)[4])
    offered = swaps(legal_moves(ctx))
    assert len(offered) == 1
    advance(ctx, offered[0])
    # The opening stone now belongs to player 2 and it is player 1's move.
    assert ctx.who(4) == 2
    assert ctx.state.mover == 1
    assert not swaps(legal_moves(ctx))


def test_automove_fires_single_forced_moves():
    g = game_of(PASS_FOREVER.replace('(play (move Pass))',
                                     '(play (move Pass))\n        (meta (automove))'))
    assert 'Automove' in g.metas
    ctx = start(g)
    advance(ctx, legal_moves(ctx)[0])
    # Every forced pass after the first was auto-played up to the turn cap.
    assert ctx.trial.over
    assert ctx.trial.ranks[1:] == [1.5, 1.5]


# -- stalemate --------------------------------------------------------------------

CRAMPED = '''
(game "Cramped"
    (players 2)
    (equipment { (board (rectangle 1 3)) (piece "Disc" Each) })
    (rules
        (start { (place "Disc1" 0) (place "Disc2" 2) })
        (play (forEach Piece (move Step E (to if:(is Empty (to))))))
        (end (if (is Full) (result Mover Win)))
    )
)
'''


def test_stalemated_player_closes_the_game():
    g = game_of(CRAMPED)
    ctx = start(g, seed=0)
    advance(ctx, legal_moves(ctx)[0])   # P1: 0 -> 1, board now 1 and 2
    # P2 cannot step east; the game folds up as a shared draw.
    assert ctx.trial.over
    assert ctx.state.stalemated[2]
    assert ctx.trial.ranks[1:] == [1.5, 1.5]


# -- records ----------------------------------------------------------------------

def test_trial_record_replays_to_identical_history():
    g = game_of(MANCALA_MINI)
    ctx = start(g, seed=11)
    playout(ctx)
    rec = trial_record(ctx, game_name='Pits', seed=11)
    blob = json.dumps(rec)

    back = replay_record(g, json.loads(blob))
    assert back.trial.hashes == ctx.trial.hashes
    assert back.trial.ranks == ctx.trial.ranks
    assert back.trial.status == ctx.trial.status
    assert format(back.trial.hashes[-1], 'x') == rec['final_hash']


def test_replay_rejects_out_of_range_choice():
    g = game_of(LINE3)
    ctx = start(g, seed=3)
    playout(ctx)
    rec = trial_record(ctx)
    rec['choices'][0] = 99
    rec['random_steps'] = []
    with pytest.raises(ValueError, match='illegal move index'):
        replay_record(g, rec)


def test_playouts_are_reproducible_per_seed():
    g = game_of(LINE3)
    a = playout(start(g, seed=42))
    b = playout(start(g, seed=42))
    assert a.choices == b.choices
    assert a.hashes == b.hashes
    assert a.ranks == b.ranks
    c = playout(start(g, seed=43))
    assert (a.choices != c.choices or a.hashes != c.hashes)


def test_advance_rejects_foreign_moves():
    g = game_of(LINE3)
    ctx = start(g)
    with pytest.raises(ValueError, match='not legal'):
        advance(ctx, Move([ActionPass(decision=True)]))
