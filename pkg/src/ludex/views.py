"""JSON-friendly projections of compiled games and live positions.

One schema serves the command line and the HTTP protocol, so a state
rendered by `legal --json` is exactly what a client of /state sees.
"""

from __future__ import annotations


def _round2(x: float) -> float:
    return round(float(x), 4)


def topology_view(game) -> dict:
    topo = game.topo
    g = topo.graph
    sites = []
    for s in topo.sites:
        entry = {
            'index': s.index,
            'type': topo.site_type,
            'position': [_round2(s.centroid[0]), _round2(s.centroid[1])],
            'label': s.label,
            'row': s.row,
            'col': s.col,
            'phase': s.phase,
        }
        if topo.site_type == 'Cell':
            face = g.faces[s.index]
            entry['polygon'] = [
                [_round2(g.vertices[v][0]), _round2(g.vertices[v][1])]
                for v in face]
        sites.append(entry)
    hands = [
        {'player': p, 'offset': off, 'size': size}
        for p, (off, size) in sorted(game._hands.items())]
    return {
        'siteType': topo.site_type,
        'numSites': topo.num_sites,
        'totalSites': game.total_sites,
        'sites': sites,
        'adjacency': {rel: [sorted(n) for n in topo.neighbors[rel]]
                      for rel in ('Orthogonal', 'Diagonal', 'All')},
        'sets': {k: sorted(v) for k, v in topo.sets.items()},
        'tracks': [
            {'name': t.name, 'owner': t.owner, 'directed': t.directed,
             'looped': t.looped, 'sites': list(t.elems)}
            for t in game.tracks],
        'hands': hands,
        'components': [
            {'index': c.index, 'name': c.name, 'root': c.root,
             'owner': c.owner}
            for c in game.components[1:]],
    }


def state_view(ctx, game_name: str | None = None) -> dict:
    game = ctx.game
    trial = ctx.trial
    sites = []
    for s in range(game.total_sites):
        sites.append({
            'what': ctx.what(s),
            'who': ctx.who(s),
            'count': ctx.count(s),
            'state': ctx.state_at(s),
            'rotation': ctx.rotation_at(s),
            'value': ctx.value_at(s),
        })
    view = {
        'game': game_name or game.name,
        'players': game.num_players,
        'mover': ctx.state.mover,
        'moveNumber': trial.num_moves(),
        'sites': sites,
        'scores': list(ctx.state.scores[1:]),
        'over': trial.over,
        'status': trial.status,
        'ranking': list(trial.ranks[1:]),
        'active': list(trial.active[1:]),
    }
    if ctx.puzzle is not None:
        view['puzzle'] = {
            'resolved': [ctx.puzzle.is_resolved(v)
                         for v in range(ctx.puzzle.num_vars)],
            'values': [ctx.puzzle.what(v)
                       for v in range(ctx.puzzle.num_vars)],
        }
    return view


def move_view(move_id: int, move) -> dict:
    return {
        'id': move_id,
        'from': move.from_site,
        'to': move.to_site,
        'description': move.describe(),
    }


def legal_view(moves) -> list:
    return [move_view(i, m) for i, m in enumerate(moves)]
