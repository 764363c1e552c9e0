'''
Compass machinery. Sixteen winds, clockwise from north; every site direction
on a board gets snapped to the nearest wind, and relative directions (for a
facing piece) are resolved against whichever winds the site actually supports.
'''

from __future__ import annotations

import math

WINDS = ('N', 'NNE', 'NE', 'ENE', 'E', 'ESE', 'SE', 'SSE',
         'S', 'SSW', 'SW', 'WSW', 'W', 'WNW', 'NW', 'NNW')

WIND_INDEX = {w: i for i, w in enumerate(WINDS)}

# Degrees, measured the usual math way: E = 0, counterclockwise positive.
WIND_ANGLE = {w: (90.0 - 22.5 * i) % 360.0 for i, w in enumerate(WINDS)}

AXIAL = ('N', 'E', 'S', 'W')
ANGLED = tuple(w for w in WINDS if w not in AXIAL)
HORIZONTAL = ('E', 'W')
VERTICAL = ('N', 'S')

RELATIVE_NAMES = frozenset({
    'Forward', 'Backward', 'Rightward', 'Leftward',
    'Forwards', 'Backwards', 'Rightwards', 'Leftwards',
    'FL', 'FLL', 'FLLL', 'FR', 'FRR', 'FRRR',
    'BL', 'BLL', 'BLLL', 'BR', 'BRR', 'BRRR',
})


def opposite(wind: str) -> str:
    return WINDS[(WIND_INDEX[wind] + 8) % 16]


def wind_for_angle(degrees: float) -> str:
    """Nearest wind to a geometric angle; ties go to the earlier wind
    clockwise from north."""
    best = None
    best_d = None
    for i, w in enumerate(WINDS):
        d = abs((WIND_ANGLE[w] - degrees + 180.0) % 360.0 - 180.0)
        if best_d is None or d < best_d - 1e-9:
            best, best_d = w, d
    return best


def angle_between(a: str, b: str) -> float:
    """Unsigned angular distance between two winds, in degrees (0..180)."""
    d = abs((WIND_ANGLE[a] - WIND_ANGLE[b] + 180.0) % 360.0 - 180.0)
    return d


def _signed_cw(facing: str, w: str) -> float:
    """Clockwise angle from facing to w in (-180, 180]; positive = right side."""
    d = (WIND_ANGLE[facing] - WIND_ANGLE[w]) % 360.0
    if d > 180.0:
        d -= 360.0
    return d


def _ring_walk(facing: str, supported, clockwise: bool, steps: int):
    """Walk the supported winds around the compass from the facing wind."""
    order = sorted(supported, key=lambda w: (WIND_ANGLE[facing] - WIND_ANGLE[w]) % 360.0)
    if not order:
        return None
    # order[0] is facing itself when supported, else first wind clockwise.
    start_offset = 0 if (order and order[0] == facing) else -1
    if not clockwise:
        order = [facing] + list(reversed(order[1:])) if order[0] == facing \
            else list(reversed(order))
        start_offset = 0 if order[0] == facing else -1
    idx = start_offset + steps
    if idx < 0 or idx >= len(order):
        idx %= len(order)
    return order[idx]


def resolve_relative(name: str, facing: str, supported) -> list:
    """Map one relative direction name to absolute winds, given the piece's
    facing and the winds the site supports. Returns [] when nothing fits."""
    supported = [w for w in WINDS if w in set(supported)]
    if name == 'Forward':
        return [facing]
    if name == 'Backward':
        return [opposite(facing)]
    if name in ('Rightward', 'Leftward'):
        target = 90.0 if name == 'Rightward' else -90.0
        best, best_key = None, None
        for w in supported:
            s = _signed_cw(facing, w)
            # distance from the pure side direction; ties go forward
            key = (abs(s - target), -abs(s))
            if best_key is None or key < best_key:
                best, best_key = w, key
        return [best] if best is not None and abs(_signed_cw(facing, best) - target) < 90.0 else []
    if name in ('Forwards', 'Backwards'):
        anchor = facing if name == 'Forwards' else opposite(facing)
        return [w for w in supported if angle_between(anchor, w) < 90.0 - 1e-9]
    if name in ('Rightwards', 'Leftwards'):
        sign = 1.0 if name == 'Rightwards' else -1.0
        out = []
        for w in supported:
            s = _signed_cw(facing, w)
            if 1e-9 < sign * s < 180.0 - 1e-9:
                out.append(w)
        return out
    if name in RELATIVE_NAMES:
        # FR/FL/BR/BL families: step through the supported ring.
        back = name[0] == 'B'
        clockwise = 'R' in name[1:]
        steps = len(name) - 1
        anchor = opposite(facing) if back else facing
        # Behind the piece, handedness flips: BR walks counterclockwise from
        # the backward wind so it lands on the right-hand side.
        cw = clockwise ^ back
        w = _ring_walk(anchor, supported, cw, steps)
        return [w] if w is not None else []
    raise KeyError(f'unknown relative direction {name!r}')
