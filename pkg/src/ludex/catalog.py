"""Locating game files and describing the bundled collection."""

from __future__ import annotations

import os
from importlib import resources

from .lud import parse_text


def packaged_games_dir():
    return resources.files('ludex') / 'games'


def resolve_game_path(name: str) -> str:
    """A real path wins; otherwise fall back to the bundled games by
    basename, so `games/amazons.lud` and plain `amazons` both work."""
    if os.path.exists(name):
        return name
    base = os.path.basename(name)
    if not base.endswith('.lud'):
        base += '.lud'
    candidate = packaged_games_dir() / base
    if candidate.is_file():
        return str(candidate)
    raise FileNotFoundError(f'no game file {name!r} (and no bundled {base!r})')


def list_games() -> list:
    out = []
    for entry in sorted(packaged_games_dir().iterdir(), key=lambda e: e.name):
        if entry.name.endswith('.lud'):
            out.append(entry.name[:-4])
    return out


def game_metadata(path: str) -> dict:
    with open(path, 'r', encoding='utf-8') as fh:
        res = parse_text(fh.read())
    title = None
    pos = res.root.positional()
    if pos and isinstance(pos[0], str):
        title = pos[0]
    options = []
    for cat in res.options:
        # an unstarred category defaults to its first item
        starred = any(it.is_default for it in cat.items)
        options.append({
            'category': cat.category_name,
            'items': [
                {'name': it.name, 'description': it.description,
                 'default': it.is_default or (not starred and i == 0)}
                for i, it in enumerate(cat.items)],
        })
    return {
        'name': os.path.splitext(os.path.basename(path))[0],
        'title': title or os.path.basename(path),
        'options': options,
        'rulesets': [r.name for r in res.rulesets],
    }
