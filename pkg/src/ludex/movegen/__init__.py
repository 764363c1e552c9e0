'''Move generation: rule ludemes compile to fn(ctx, limit) -> [Move].'''

from ..actions import Move, apply_move
from . import decisions, effects, operators
from .core import compile_moves, compile_then, effect_mode

HEADS = {'move': decisions.compile_move}
HEADS.update(operators.HEADS)
HEADS.update(effects.HEADS)

__all__ = ['HEADS', 'Move', 'apply_move', 'compile_moves', 'compile_then',
           'effect_mode']
