'''
Playable topology derived from a board graph.

Sites are either the graph's faces (cells) or its vertices. Everything the
move generator needs is precomputed here: neighbor lists per relation, one
step table per relation keyed by compass wind, and maximal constant-direction
radials. Region sets (corners, outer, rows, ...) are also frozen at build
time.
'''

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import ops
from .graph import (GeomGraph, GraphError, centroid, graph_literal, hex_board,
                    qkey, rectangle, square, tri_board)
from .directions import (WINDS, WIND_ANGLE, AXIAL, ANGLED, HORIZONTAL,
                         VERTICAL, RELATIVE_NAMES, opposite, wind_for_angle,
                         resolve_relative)

RELATIONS = ('Adjacent', 'Orthogonal', 'Diagonal', 'OffDiagonal', 'All')

# Direction categories resolve to (relation, winds-at-site).
_CATEGORY_RELATION = {
    'Adjacent': 'Adjacent', 'Orthogonal': 'Orthogonal',
    'Diagonal': 'Diagonal', 'OffDiagonal': 'OffDiagonal', 'All': 'All',
    'Axial': 'Orthogonal', 'Angled': 'Adjacent',
    'Horizontal': 'Orthogonal', 'Vertical': 'Orthogonal',
}
_CATEGORY_FILTER = {
    'Axial': frozenset(AXIAL), 'Angled': frozenset(ANGLED),
    'Horizontal': frozenset(HORIZONTAL), 'Vertical': frozenset(VERTICAL),
}


@dataclass
class Site:
    index: int
    centroid: tuple
    label: str
    row: int
    col: int
    phase: int


class Topology:
    """Immutable once built; all tables are plain lists indexed by site."""

    def __init__(self, graph: GeomGraph, site_type: str):
        if site_type not in ('Cell', 'Vertex'):
            raise GraphError(f'unsupported site type {site_type!r}')
        self.graph = graph
        self.site_type = site_type
        self.sites: list = []
        self.neighbors = {r: [] for r in RELATIONS}
        self.steps = {r: [] for r in RELATIONS}     # per site: {wind: site}
        self.radials = {r: [] for r in RELATIONS}   # per site: {wind: tuple}
        self.sets: dict = {}
        self.rows_of: list = []
        self.cols_of: list = []
        self.num_rows = 0
        self.num_cols = 0
        self.num_phases = 0
        self.edge_classes: dict = {}
        self._basis: dict = {}
        self._build()

    # -- construction ------------------------------------------------------

    def _site_points(self):
        g = self.graph
        if self.site_type == 'Cell':
            return [centroid(g.vertices, f) for f in g.faces]
        return list(g.vertices)

    def _build(self):
        pts = self._site_points()
        n = len(pts)
        if n == 0:
            raise GraphError('board has no playable sites')
        orth, diag, offd = self._relations(n)
        adj = [sorted(set(orth[i]) | set(offd[i]) | set(diag[i])) for i in range(n)]
        rel_members = {
            'Orthogonal': orth, 'Diagonal': diag, 'OffDiagonal': offd,
            'Adjacent': adj, 'All': adj,
        }
        for r in RELATIONS:
            self.neighbors[r] = [sorted(ms) for ms in rel_members[r]]
            self.steps[r] = [self._step_table(i, rel_members[r][i], pts) for i in range(n)]
        for r in RELATIONS:
            self.radials[r] = [self._radial_table(i, r) for i in range(n)]
        self._bands(pts)
        self._phases(orth, adj)
        self._make_sites(pts)
        self._region_sets(pts, orth)
        self._classify_edges()

    def _relations(self, n):
        g = self.graph
        if self.site_type == 'Cell':
            by_vertex: dict = {}
            by_edge: dict = {}
            rings = []
            for i, f in enumerate(g.faces):
                ring = set()
                for k in range(len(f)):
                    a, b = f[k], f[(k + 1) % len(f)]
                    ring.add((min(a, b), max(a, b)))
                rings.append(ring)
                for v in f:
                    by_vertex.setdefault(v, []).append(i)
                for e in ring:
                    by_edge.setdefault(e, []).append(i)
            orth = [set() for _ in range(n)]
            for cells in by_edge.values():
                for i in cells:
                    for j in cells:
                        if i != j:
                            orth[i].add(j)
            share_v = [set() for _ in range(n)]
            for cells in by_vertex.values():
                for i in cells:
                    for j in cells:
                        if i != j:
                            share_v[i].add(j)
            offd = [share_v[i] - orth[i] for i in range(n)]
            pts = [centroid(g.vertices, f) for f in g.faces]
            diag = [set() for _ in range(n)]
            for i in range(n):
                for j in offd[i]:
                    shared = set(g.faces[i]) & set(g.faces[j])
                    if any(_on_segment(pts[i], pts[j], g.vertices[v]) for v in shared):
                        diag[i].add(j)
            return orth, diag, offd
        # Vertex mode: orthogonal along edges, diagonals across each face.
        orth = [set() for _ in range(n)]
        for a, b in g.edges:
            orth[a].add(b)
            orth[b].add(a)
        diag = [set() for _ in range(n)]
        for f in g.faces:
            m = len(f)
            for i in range(m):
                for j in range(i + 1, m):
                    if (j - i) % m in (1, m - 1):
                        continue
                    diag[f[i]].add(f[j])
                    diag[f[j]].add(f[i])
        offd = [set(d) for d in diag]
        return orth, diag, offd

    def _step_table(self, i, members, pts):
        """wind -> neighbor; when two neighbors claim a wind the better
        aligned (then nearer) one keeps it."""
        x0, y0 = pts[i]
        table: dict = {}
        score: dict = {}
        for j in sorted(members):
            x1, y1 = pts[j]
            ang = math.degrees(math.atan2(y1 - y0, x1 - x0)) % 360.0
            w = wind_for_angle(ang)
            err = abs((WIND_ANGLE[w] - ang + 180.0) % 360.0 - 180.0)
            d = math.hypot(x1 - x0, y1 - y0)
            key = (round(err, 6), round(d, 6), j)
            if w not in table or key < score[w]:
                table[w] = j
                score[w] = key
        return table

    def _radial_table(self, i, relation):
        out = {}
        steps = self.steps[relation]
        for w in steps[i]:
            ray = []
            cur = i
            seen = {i}
            while True:
                nxt = steps[cur].get(w)
                if nxt is None or nxt in seen:
                    break
                ray.append(nxt)
                seen.add(nxt)
                cur = nxt
            out[w] = tuple(ray)
        return out

    def _bands(self, pts):
        ys = sorted({qkey(*p)[1] for p in pts})
        xs = sorted({qkey(*p)[0] for p in pts})
        yi = {v: k for k, v in enumerate(ys)}
        xi = {v: k for k, v in enumerate(xs)}
        self.rows_of = [yi[qkey(*p)[1]] for p in pts]
        self.cols_of = [xi[qkey(*p)[0]] for p in pts]
        self.num_rows = len(ys)
        self.num_cols = len(xs)

    def _phases(self, orth, adj):
        n = len(self.rows_of)
        if self.site_type == 'Cell' and all(len(f) == 3 for f in self.graph.faces):
            # Triangle tilings: phase by orientation (apex up or down).
            phases = []
            for f in self.graph.faces:
                ys = sorted(self.graph.vertices[v][1] for v in f)
                phases.append(0 if ys[1] - ys[0] < ys[2] - ys[1] else 1)
            self.site_phases = phases
            self.num_phases = 2 if phases else 0
            return
        if self.site_type == 'Cell' and all(len(f) == 4 for f in self.graph.faces):
            self.site_phases = [(self.rows_of[i] + self.cols_of[i]) % 2 for i in range(n)]
            self.num_phases = min(2, n)
            return
        if self.site_type == 'Vertex':
            self.site_phases = [(self.rows_of[i] + self.cols_of[i]) % 2 for i in range(n)]
            self.num_phases = min(2, n)
            return
        if self.site_type == 'Cell' and all(len(f) == 6 for f in self.graph.faces):
            # Hex tilings 3-colour exactly on the axial lattice.
            phases = []
            for i in range(n):
                x, y = self._cell_centroid(i)
                r = round(y * 2.0 / math.sqrt(3.0))
                q = round(x - r / 2.0)
                phases.append((q - r) % 3)
            self.site_phases = phases
            self.num_phases = len(set(phases))
            return
        # Greedy colouring over the adjacency graph, deterministic order.
        phases = [-1] * n
        for i in range(n):
            used = {phases[j] for j in adj[i] if phases[j] >= 0}
            c = 0
            while c in used:
                c += 1
            phases[i] = c
        self.site_phases = phases
        self.num_phases = (max(phases) + 1) if phases else 0

    def _cell_centroid(self, i):
        return centroid(self.graph.vertices, self.graph.faces[i])

    def _make_sites(self, pts):
        for i, p in enumerate(pts):
            col = self.cols_of[i]
            row = self.rows_of[i]
            self.sites.append(Site(i, p, _col_letter(col) + str(row + 1),
                                   row, col, self.site_phases[i]))
        self.labels = {s.label: s.index for s in self.sites}

    def _boundary_vertices(self):
        """Vertices on edges that belong to at most one face."""
        g = self.graph
        count: dict = {}
        for f in g.faces:
            for k in range(len(f)):
                a, b = f[k], f[(k + 1) % len(f)]
                e = (min(a, b), max(a, b))
                count[e] = count.get(e, 0) + 1
        outer_edges = [e for e in g.edges if count.get(e, 0) <= 1]
        verts = set()
        for a, b in outer_edges:
            verts.add(a)
            verts.add(b)
        return verts, outer_edges

    def _region_sets(self, pts, orth):
        n = len(pts)
        everything = list(range(n))
        b_verts, b_edges = self._boundary_vertices()
        if self.site_type == 'Cell':
            outer = sorted(i for i, f in enumerate(self.graph.faces)
                           if any(v in b_verts for v in f))
        else:
            outer = sorted(b_verts)
        inner = [i for i in everything if i not in set(outer)]
        convex, concave = _ring_corners(pts, outer)
        cx = sum(p[0] for p in pts) / n
        cy = sum(p[1] for p in pts) / n
        dists = [math.hypot(p[0] - cx, p[1] - cy) for p in pts]
        dmin = min(dists)
        centre = [i for i in everything if dists[i] - dmin < 1e-6]
        self.sets = {
            'Board': everything,
            'All': everything,
            'Inner': inner,
            'Outer': outer,
            'Perimeter': outer,
            'Corners': sorted(set(convex) | set(concave)),
            'ConcaveCorners': concave,
            'ConvexCorners': convex,
            'Top': [i for i in everything if self.rows_of[i] == self.num_rows - 1],
            'Bottom': [i for i in everything if self.rows_of[i] == 0],
            'Left': [i for i in everything if self.cols_of[i] == 0],
            'Right': [i for i in everything if self.cols_of[i] == self.num_cols - 1],
            'Centre': centre,
        }
        self.row_sets = [[i for i in everything if self.rows_of[i] == r]
                         for r in range(self.num_rows)]
        self.col_sets = [[i for i in everything if self.cols_of[i] == c]
                         for c in range(self.num_cols)]
        self.phase_sets = [[i for i in everything if self.site_phases[i] == p]
                           for p in range(self.num_phases)]

    def _classify_edges(self):
        g = self.graph
        classes = {'Horizontal': [], 'Vertical': [], 'Slash': [], 'Slosh': [],
                   'Axial': [], 'Angled': []}
        for k, (a, b) in enumerate(g.edges):
            (x0, y0), (x1, y1) = g.vertices[a], g.vertices[b]
            ang = math.degrees(math.atan2(y1 - y0, x1 - x0)) % 180.0
            if ang < 1e-6 or ang > 180.0 - 1e-6:
                classes['Horizontal'].append(k)
                classes['Axial'].append(k)
            elif abs(ang - 90.0) < 1e-6:
                classes['Vertical'].append(k)
                classes['Axial'].append(k)
            else:
                classes['Angled'].append(k)
                if ang < 90.0:
                    classes['Slash'].append(k)
                else:
                    classes['Slosh'].append(k)
        self.edge_classes = classes

    # -- queries -----------------------------------------------------------

    @property
    def num_sites(self) -> int:
        return len(self.sites)

    def step(self, site: int, wind: str, relation: str = 'Adjacent'):
        return self.steps[relation][site].get(wind)

    def radial(self, site: int, wind: str, relation: str = 'Adjacent') -> tuple:
        return self.radials[relation][site].get(wind, ())

    def supported_winds(self, site: int, relation: str = 'Adjacent') -> list:
        t = self.steps[relation][site]
        return [w for w in WINDS if w in t]

    def wind_basis(self, relation: str = 'Adjacent') -> list:
        """Winds the tiling supports anywhere, in canonical order. Edge
        sites lack some of them, but turning logic works in this full set."""
        cached = self._basis.get(relation)
        if cached is None:
            seen = set()
            for t in self.steps[relation]:
                seen.update(t)
            cached = [w for w in WINDS if w in seen]
            self._basis[relation] = cached
        return cached

    def site_by_label(self, label: str) -> int:
        try:
            return self.labels[label]
        except KeyError:
            raise GraphError(f'no site labelled {label!r}') from None

    def resolve_directions(self, names, site: int, facing=None,
                           base_relation: str = 'Adjacent'):
        """Expand direction names to concrete (relation, wind) pairs at a
        site. Categories choose their own relation; plain winds and relative
        names use base_relation. Order is deterministic."""
        out = []
        seen = set()
        for name in names:
            if name in _CATEGORY_RELATION:
                rel = _CATEGORY_RELATION[name]
                winds = self.supported_winds(site, rel)
                flt = _CATEGORY_FILTER.get(name)
                if flt is not None:
                    winds = [w for w in winds if w in flt]
                pairs = [(rel, w) for w in winds]
            elif name in RELATIVE_NAMES:
                if facing is None:
                    facing = 'N'
                winds = resolve_relative(
                    name, facing, self.supported_winds(site, base_relation))
                pairs = [(base_relation, w) for w in winds]
            elif name in WIND_ANGLE:
                pairs = [(base_relation, name)] \
                    if name in self.steps[base_relation][site] else []
            else:
                raise GraphError(f'unknown direction {name!r}')
            for p in pairs:
                if p not in seen:
                    seen.add(p)
                    out.append(p)
        return out


def _col_letter(c: int) -> str:
    out = ''
    c += 1
    while c > 0:
        c, r = divmod(c - 1, 26)
        out = chr(ord('A') + r) + out
    return out


def _on_segment(p, q, v, tol=1e-6) -> bool:
    """Is v on the segment p-q (inclusive)?"""
    (px, py), (qx, qy), (vx, vy) = p, q, v
    cross = (qx - px) * (vy - py) - (qy - py) * (vx - px)
    if abs(cross) > tol * max(1.0, math.hypot(qx - px, qy - py)):
        return False
    dot = (vx - px) * (qx - px) + (vy - py) * (qy - py)
    return -tol <= dot <= (qx - px) ** 2 + (qy - py) ** 2 + tol


def _ring_corners(pts, outer):
    """Corner sites: walk the outer sites in angular order around the board
    centre and classify each turn of the centroid polygon. Collinear runs
    (straight board sides) produce no corners."""
    if len(outer) <= 2:
        return list(outer), []
    cx = sum(pts[i][0] for i in outer) / len(outer)
    cy = sum(pts[i][1] for i in outer) / len(outer)
    ring = sorted(outer, key=lambda i: (
        math.atan2(pts[i][1] - cy, pts[i][0] - cx),
        math.hypot(pts[i][0] - cx, pts[i][1] - cy)))
    m = len(ring)
    area = 0.0
    for k in range(m):
        (x1, y1), (x2, y2) = pts[ring[k]], pts[ring[(k + 1) % m]]
        area += x1 * y2 - x2 * y1
    orient = 1.0 if area >= 0 else -1.0
    convex, concave = [], []
    for k in range(m):
        p = pts[ring[k - 1]]
        c = pts[ring[k]]
        q = pts[ring[(k + 1) % m]]
        cross = (c[0] - p[0]) * (q[1] - c[1]) - (c[1] - p[1]) * (q[0] - c[0])
        if abs(cross) < 1e-9:
            continue
        (convex if cross * orient > 0 else concave).append(ring[k])
    return sorted(convex), sorted(concave)


# -- board ludeme evaluation -----------------------------------------------

class BoardError(GraphError):
    pass


def _num(arg, what):
    from fractions import Fraction
    if isinstance(arg, (int, Fraction)):
        return float(arg)
    raise BoardError(f'{what}: expected a number, got {arg!r}')


def _int(arg, what):
    if isinstance(arg, int):
        return arg
    raise BoardError(f'{what}: expected an integer, got {arg!r}')


def _index_list(arg, what):
    from .graph import GeomGraph  # noqa: F401  (kept for symmetry)
    from ..lud import Array
    if isinstance(arg, Array):
        return [_int(a, what) for a in arg.items]
    return [_int(arg, what)]


def build_graph(node) -> GeomGraph:
    """Evaluate a board-graph expression tree to a GeomGraph."""
    from ..lud import Array, LudNode
    if not isinstance(node, LudNode):
        raise BoardError(f'expected a graph expression, got {node!r}')
    label = node.label
    pos = node.positional()
    if label == 'square':
        return square(_int(pos[0], 'square'))
    if label == 'rectangle':
        rows = _int(pos[0], 'rectangle')
        cols = _int(pos[1], 'rectangle') if len(pos) > 1 else rows
        return rectangle(rows, cols)
    if label == 'hex':
        shape = 'Hexagon'
        sizes = []
        for a in pos:
            if isinstance(a, LudNode) and not a.args:
                shape = a.label
            else:
                sizes.append(_int(a, 'hex'))
        if not sizes:
            raise BoardError('hex: missing size')
        return hex_board(sizes[0], shape)
    if label == 'tri':
        sizes = [a for a in pos if isinstance(a, int)]
        if not sizes:
            raise BoardError('tri: missing size')
        return tri_board(sizes[0])
    if label == 'graph':
        vs = node.named('vertices')
        es = node.named('edges')
        if vs is None and pos and isinstance(pos[0], Array):
            vs = pos[0]
        if vs is None:
            raise BoardError('graph: missing vertices')
        vrows = []
        for item in vs.items:
            if not isinstance(item, Array) or len(item.items) != 2:
                raise BoardError('graph: vertex entries are {x y} pairs')
            vrows.append((_num(item.items[0], 'graph'), _num(item.items[1], 'graph')))
        epairs = []
        if es is not None:
            for item in es.items:
                if not isinstance(item, Array) or len(item.items) != 2:
                    raise BoardError('graph: edge entries are {a b} pairs')
                epairs.append((_int(item.items[0], 'graph'), _int(item.items[1], 'graph')))
        return graph_literal(vrows, epairs)
    if label in ('merge', 'union'):
        parts = []
        for a in pos:
            if isinstance(a, Array):
                parts.extend(build_graph(x) for x in a.items)
            else:
                parts.append(build_graph(a))
        if not parts:
            raise BoardError(f'{label}: nothing to combine')
        return ops.merge(parts)
    if label == 'shift':
        dx = _num(pos[0], 'shift')
        dy = _num(pos[1], 'shift')
        return ops.translate(build_graph(pos[2]), dx, dy)
    if label == 'scale':
        if len(pos) == 2:
            return ops.scale(build_graph(pos[1]), _num(pos[0], 'scale'))
        return ops.scale(build_graph(pos[2]), _num(pos[0], 'scale'),
                         _num(pos[1], 'scale'))
    if label == 'rotate':
        return ops.rotate(build_graph(pos[1]), _num(pos[0], 'rotate'))
    if label == 'remove':
        g = build_graph(pos[0])
        cells = node.named('cells')
        verts = node.named('vertices')
        edges = node.named('edges')
        return ops.remove_elements(
            g,
            cells=_index_list(cells, 'remove') if cells is not None else (),
            vertices=_index_list(verts, 'remove') if verts is not None else (),
            edges=_index_list(edges, 'remove') if edges is not None else ())
    if label == 'keep':
        g = build_graph(pos[0])
        cells = node.named('cells')
        if cells is None:
            raise BoardError('keep: missing cells')
        return ops.keep_cells(g, _index_list(cells, 'keep'))
    if label == 'hole':
        g = build_graph(pos[0])
        cells = node.named('cells')
        if cells is None and len(pos) > 1:
            cells = pos[1]
        if cells is None:
            raise BoardError('hole: missing cells')
        return ops.punch_holes(g, _index_list(cells, 'hole'))
    if label == 'trim':
        return ops.trim(build_graph(pos[0]))
    if label == 'renumber':
        return ops.renumber(build_graph(pos[0]))
    if label == 'dual':
        return ops.dual(build_graph(pos[0]))
    raise BoardError(f'unsupported board constructor {label!r}')


def build_topology(board_node) -> Topology:
    """(board <graph> [use:<SiteType>] ...) or a bare graph expression."""
    from ..lud import LudNode
    node = board_node
    use = 'Cell'
    if isinstance(node, LudNode) and node.label == 'board':
        u = node.named('use')
        if u is not None:
            if not isinstance(u, LudNode):
                raise BoardError('board: bad use: value')
            use = u.label
        node = node.positional()[0]
    g = build_graph(node)
    return Topology(g, use)
