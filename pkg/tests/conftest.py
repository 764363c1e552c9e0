"""Shared helpers: compile a game from inline text and start a trial."""

from ludex.engine.game import compile_game
from ludex.engine.run import initial_context
from ludex.expand import load_text


def game_of(text, selection=None):
    return compile_game(load_text(text, selection))


def start(game, seed=0):
    return initial_context(game, seed=seed)
