'''
Tracks: ordered site sequences for race games. A track is given either as an
explicit site list or as a walk string like "3,W,N1,E,End": start at a site,
then each compass item extends the track in that direction (a trailing count
limits the number of steps, otherwise the walk is maximal), and End appends
the bearing-off marker.
'''

from __future__ import annotations

import re

from .directions import WINDS
from .graph import GraphError
from .topology import Topology

END = -2   # the off-the-end marker inside a track element list
OFF = -1   # walking past the last element lands here

_ITEM = re.compile(r'^([A-Z]+)(\d+)?$')


class TrackError(GraphError):
    pass


class Track:
    def __init__(self, name: str, elems, owner: int = 0,
                 directed: bool = False, looped: bool = False):
        self.name = name
        self.elems = tuple(elems)
        self.owner = owner
        self.directed = directed
        self.looped = looped
        self._pos = {}
        for i, e in enumerate(self.elems):
            if e >= 0 and e not in self._pos:
                self._pos[e] = i

    def __repr__(self):
        return f'Track({self.name!r}, owner={self.owner}, {list(self.elems)})'

    def position_of(self, site: int):
        return self._pos.get(site)

    def walk(self, from_site: int, steps: int) -> int:
        """Land `steps` elements further along. A site not on the track
        enters from the start (steps=1 lands on the first element). Walking
        past the last element gives OFF unless the track loops."""
        pos = self._pos.get(from_site)
        start = -1 if pos is None else pos
        idx = start + steps
        if self.looped and self.elems:
            idx %= len(self.elems)
        if idx < 0 or idx >= len(self.elems):
            return OFF
        return self.elems[idx]


def _walk_string(spec: str, topo: Topology) -> list:
    elems: list = []
    cur = None
    for raw in spec.split(','):
        item = raw.strip()
        if not item:
            continue
        if item == 'End':
            elems.append(END)
            continue
        try:
            site = int(item)
        except ValueError:
            site = None
        if site is not None:
            if not (0 <= site < topo.num_sites):
                raise TrackError(f'track walk visits missing site {site}')
            elems.append(site)
            cur = site
            continue
        m = _ITEM.match(item)
        if not m or m.group(1) not in WINDS:
            raise TrackError(f'bad track item {item!r} in {spec!r}')
        if cur is None:
            raise TrackError(f'track walk {spec!r} turns before any start site')
        wind = m.group(1)
        bound = int(m.group(2)) if m.group(2) else topo.num_sites
        taken = 0
        while taken < bound:
            nxt = topo.step(cur, wind, 'Adjacent')
            if nxt is None:
                break
            elems.append(nxt)
            cur = nxt
            taken += 1
    return elems


def build_track(node, topo: Topology) -> Track:
    """(track "Name" <walk-string or {sites}> [P1|..|Shared] [directed:..] [loop:..])"""
    from ..lud import Array, LudNode
    pos = node.positional()
    if not pos or not isinstance(pos[0], str):
        raise TrackError('track: missing name')
    name = pos[0]
    owner = 0
    elems = None
    for a in pos[1:]:
        if isinstance(a, str):
            elems = _walk_string(a, topo)
        elif isinstance(a, Array):
            elems = []
            for x in a.items:
                if x == 'End':
                    elems.append(END)
                elif isinstance(x, int):
                    if not (0 <= x < topo.num_sites) and x != END:
                        raise TrackError(f'track {name!r} lists missing site {x}')
                    elems.append(x)
                else:
                    raise TrackError(f'track {name!r}: bad site entry {x!r}')
        elif isinstance(a, LudNode) and not a.args:
            t = a.label
            if t.startswith('P') and t[1:].isdigit():
                owner = int(t[1:])
            elif t in ('Shared', 'Neutral'):
                owner = 0
            else:
                raise TrackError(f'track {name!r}: unknown qualifier {t!r}')
        else:
            raise TrackError(f'track {name!r}: unexpected argument {a!r}')
    if elems is None:
        raise TrackError(f'track {name!r} has no sites')

    def flag(key):
        v = node.named(key)
        if v is None:
            return False
        return getattr(v, 'label', v) in ('True', 'true', True)

    return Track(name, elems, owner, directed=flag('directed'), looped=flag('loop'))


def build_tracks(board_node, topo: Topology) -> list:
    """Collect every (track ...) argument of a board node."""
    from ..lud import Array, LudNode
    out = []
    if not isinstance(board_node, LudNode):
        return out
    args = []
    for a in board_node.args:
        v = a.value if hasattr(a, 'value') else a
        if isinstance(v, Array):
            args.extend(v.items)
        else:
            args.append(v)
    for a in args:
        if isinstance(a, LudNode) and a.label == 'track':
            out.append(build_track(a, topo))
    return out
