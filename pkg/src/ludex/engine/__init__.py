from .game import Component, Game, compile_game
from .run import (
    advance, assign_ranks, check_end, initial_context, legal_moves, playout,
    replay_record, trial_record,
)
from . import puzzle

__all__ = [
    'Component', 'Game', 'compile_game',
    'initial_context', 'legal_moves', 'advance', 'check_end',
    'assign_ranks', 'playout', 'trial_record', 'replay_record',
    'puzzle',
]
