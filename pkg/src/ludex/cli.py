"""Command line front end: compile, legal, playout, serve."""

from __future__ import annotations

import json
import statistics
import sys
import time

import click

from .catalog import resolve_game_path
from .engine import (advance, compile_game, initial_context, legal_moves,
                     playout)
from .expand import load_file
from .views import legal_view, state_view, topology_view


def _selections(options: str | None, ruleset: str | None) -> list:
    out = []
    if ruleset:
        out.append(ruleset)
    if options:
        out.extend(s.strip() for s in options.split(',') if s.strip())
    return out


def _load(game: str, options: str | None, ruleset: str | None):
    path = resolve_game_path(game)
    root = load_file(path, _selections(options, ruleset))
    return compile_game(root)


def _fail(err: Exception) -> None:
    click.echo(f'error: {err}', err=True)
    sys.exit(1)


@click.group()
def main() -> None:
    """Compile .lud game descriptions and play them."""


opt_options = click.option('--options', default=None,
                           help='Comma-separated "Category/Item" selections.')
opt_ruleset = click.option('--ruleset', default=None,
                           help='Named ruleset, e.g. "Ruleset/Misere".')
opt_json = click.option('--json', 'as_json', is_flag=True,
                        help='Emit JSON instead of text.')


@main.command('compile')
@click.argument('game')
@opt_options
@opt_ruleset
@opt_json
def cmd_compile(game, options, ruleset, as_json):
    """Compile a game and print a summary."""
    try:
        g = _load(game, options, ruleset)
    except Exception as e:
        _fail(e)
    summary = {
        'name': g.name,
        'players': g.num_players,
        'sites': g.topo.num_sites,
        'siteType': g.topo.site_type,
        'flags': sorted(g.flags),
        'metas': sorted(g.metas),
        'results': sorted(g.end_kinds),
        'components': [c.name for c in g.components[1:]],
    }
    if as_json:
        click.echo(json.dumps(summary, indent=2))
        return
    unit = 'cells' if g.topo.site_type == 'Cell' else 'vertices'
    click.echo(f'{g.name}: {g.num_players} players, {g.topo.num_sites} {unit}')
    if summary['flags']:
        click.echo('flags: ' + ', '.join(summary['flags']))
    if summary['metas']:
        click.echo('meta: ' + ', '.join(summary['metas']))
    if summary['results']:
        click.echo('results: ' + ', '.join(summary['results']))


@main.command('legal')
@click.argument('game')
@opt_options
@opt_ruleset
@click.option('--seed', default=0, show_default=True, type=int)
@click.option('--moves', default=None,
              help='Comma-separated move ids to replay first.')
@opt_json
def cmd_legal(game, options, ruleset, seed, moves, as_json):
    """List the legal moves, optionally after replaying a move sequence."""
    try:
        g = _load(game, options, ruleset)
    except Exception as e:
        _fail(e)
    ctx = initial_context(g, seed=seed)
    if moves:
        for step, text in enumerate(moves.split(',')):
            ms = legal_moves(ctx)
            try:
                i = int(text.strip())
            except ValueError:
                _fail(ValueError(f'move id {text.strip()!r} is not a number'))
            if not 0 <= i < len(ms):
                _fail(ValueError(
                    f'illegal move index {i} at replay step {step} '
                    f'({len(ms)} legal moves)'))
            advance(ctx, ms[i])
    ms = legal_moves(ctx)
    if as_json:
        click.echo(json.dumps({'state': state_view(ctx),
                               'moves': legal_view(ms)}, indent=2))
        return
    for entry in legal_view(ms):
        click.echo(f'{entry["id"]:3d}  {entry["description"]}')
    click.echo(f'{len(ms)} legal moves; mover {ctx.state.mover}')


@main.command('playout')
@click.argument('game')
@opt_options
@opt_ruleset
@click.option('--seed', default=0, show_default=True, type=int)
@click.option('-n', 'count', default=1, show_default=True, type=int)
@opt_json
def cmd_playout(game, options, ruleset, seed, count, as_json):
    """Run random playouts and report outcome statistics."""
    if count < 1:
        _fail(ValueError('playout count must be at least 1'))
    try:
        g = _load(game, options, ruleset)
    except Exception as e:
        _fail(e)
    wins: dict = {}
    lengths = []
    rank_sums = [0.0] * g.num_players
    t0 = time.perf_counter()
    for k in range(count):
        ctx = initial_context(g, seed=seed + k)
        playout(ctx)
        t = ctx.trial
        key = 'draw' if t.status == 0 else f'P{t.status}'
        wins[key] = wins.get(key, 0) + 1
        lengths.append(t.num_moves())
        for p in range(g.num_players):
            rank_sums[p] += t.ranks[p + 1]
    dt = time.perf_counter() - t0
    report = {
        'game': g.name,
        'count': count,
        'seed': seed,
        'outcomes': {k: wins[k] for k in sorted(wins)},
        'meanLength': round(statistics.mean(lengths), 3),
        'meanRanks': [round(s / count, 4) for s in rank_sums],
        'rate': f'{count / dt:.0f}/s',
    }
    if as_json:
        report.pop('rate')   # wall-clock noise has no place in comparable output
        click.echo(json.dumps(report, indent=2))
        return
    click.echo(f'{g.name}: {count} playouts, seed {seed}')
    for k in sorted(wins):
        click.echo(f'  {k}: {wins[k]}')
    click.echo(f'mean length {report["meanLength"]}, '
               f'mean ranks {report["meanRanks"]}')
    # stderr so repeated runs stay byte-identical on stdout
    click.echo(f'rate {report["rate"]}', err=True)


@main.command('serve')
@click.option('--port', default=8000, show_default=True, type=int)
@click.option('--host', default='127.0.0.1', show_default=True)
def cmd_serve(port, host):
    """Serve the JSON play protocol over HTTP."""
    from .serve import run_server
    run_server(host=host, port=port)


@main.command('topology')
@click.argument('game')
@opt_options
@opt_ruleset
def cmd_topology(game, options, ruleset):
    """Dump the board topology as JSON."""
    try:
        g = _load(game, options, ruleset)
    except Exception as e:
        _fail(e)
    click.echo(json.dumps(topology_view(g), indent=2))


if __name__ == '__main__':
    main()
