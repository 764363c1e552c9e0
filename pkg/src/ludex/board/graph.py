'''
Planar board graphs and their generators.

A GeomGraph is a plain planar graph: vertex positions, undirected edges, and
faces (vertex cycles). Generators build the common tilings; the graph literal
accepts explicit vertices/edges and derives faces by tracing the planar
embedding.

Index conventions, which downstream numbering depends on:
- generator vertices are ordered bottom-left rightwards then upwards,
- edges are sorted by (low endpoint, high endpoint),
- faces are sorted by their minimal vertex index.
Operators that combine graphs append new vertices after existing ones rather
than re-sorting (see ops.py); only the renumber operator re-sorts positions.
'''

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

QUANT = 1e-6


def qkey(x: float, y: float) -> tuple:
    return (round(x / QUANT), round(y / QUANT))


class GraphError(Exception):
    pass


@dataclass
class GeomGraph:
    vertices: list            # [(x, y)] floats
    edges: list               # [(a, b)] with a < b
    faces: list               # [tuple(vertex indices)] ccw, min index first

    def validate(self) -> None:
        n = len(self.vertices)
        for a, b in self.edges:
            if not (0 <= a < n and 0 <= b < n):
                raise GraphError(f'edge ({a},{b}) references undefined vertex')
            if a == b:
                raise GraphError(f'zero-length edge at vertex {a}')
        if len(set(self.edges)) != len(self.edges):
            raise GraphError('duplicate edge')
        for f in self.faces:
            for v in f:
                if not (0 <= v < n):
                    raise GraphError(f'face references undefined vertex {v}')


def _face_signed_area(verts: list, face: tuple) -> float:
    area = 0.0
    for i, v in enumerate(face):
        x1, y1 = verts[v]
        x2, y2 = verts[face[(i + 1) % len(face)]]
        area += x1 * y2 - x2 * y1
    return area / 2.0


def _normalize_face(verts: list, face: tuple) -> tuple:
    """Rotate so the minimal vertex leads; flip to counter-clockwise."""
    if _face_signed_area(verts, face) < 0:
        face = tuple(reversed(face))
    k = face.index(min(face))
    return face[k:] + face[:k]


def _finish(verts: list, edges: set, faces: list) -> GeomGraph:
    norm_faces = [_normalize_face(verts, f) for f in faces]
    norm_faces.sort(key=lambda f: (min(f), f))
    g = GeomGraph(list(verts), sorted(edges), norm_faces)
    g.validate()
    return g


def trace_faces(verts: list, edges: list) -> list:
    """Interior faces of a planar embedding.

    Walks every directed edge once, turning as sharply clockwise as possible
    at each vertex; interior faces come out counter-clockwise with positive
    area, the single outer face is clockwise and gets dropped, and bridge
    walks (repeated vertices or ~zero area) are dropped too.
    """
    nbrs: dict = {}
    for a, b in edges:
        nbrs.setdefault(a, []).append(b)
        nbrs.setdefault(b, []).append(a)

    def angle(u, v):
        ux, uy = verts[u]
        vx, vy = verts[v]
        return math.atan2(vy - uy, vx - ux)

    for v, lst in nbrs.items():
        lst.sort(key=lambda w: angle(v, w))

    next_he = {}
    for a, b in edges:
        for u, v in ((a, b), (b, a)):
            ring = nbrs[v]
            k = ring.index(u)
            next_he[(u, v)] = (v, ring[k - 1])   # predecessor ccw = turn clockwise

    faces = []
    seen = set()
    for start in next_he:
        if start in seen:
            continue
        cycle = []
        he = start
        while he not in seen:
            seen.add(he)
            cycle.append(he[0])
            he = next_he[he]
        if he != start:
            continue
        if len(set(cycle)) != len(cycle):
            continue
        if _face_signed_area(verts, tuple(cycle)) <= QUANT:
            continue
        faces.append(tuple(cycle))
    return faces


def _build_from_cells(cell_corners: list) -> GeomGraph:
    """Construct a graph from per-cell corner positions (floats).

    Coincident corners collapse to one vertex; vertices come out sorted
    bottom-left rightwards and upwards.
    """
    keys = {}
    for corners in cell_corners:
        for p in corners:
            keys.setdefault(qkey(*p), p)
    order = sorted(keys, key=lambda k: (k[1], k[0]))
    index = {k: i for i, k in enumerate(order)}
    verts = [keys[k] for k in order]
    edges = set()
    faces = []
    for corners in cell_corners:
        cycle = tuple(index[qkey(*p)] for p in corners)
        faces.append(cycle)
        for i in range(len(cycle)):
            a, b = cycle[i], cycle[(i + 1) % len(cycle)]
            edges.add((min(a, b), max(a, b)))
    return _finish(verts, edges, faces)


# ---------------------------------------------------------------------------
# Generators.

def rectangle(rows: int, columns: int) -> GeomGraph:
    if rows <= 0 or columns <= 0:
        raise GraphError(f'rectangle {rows}x{columns}: dimensions must be positive')
    cells = []
    for r in range(rows):
        for c in range(columns):
            cells.append([(c, r), (c + 1, r), (c + 1, r + 1), (c, r + 1)])
    return _build_from_cells(cells)


def square(n: int) -> GeomGraph:
    return rectangle(n, n)


_SQRT3 = math.sqrt(3.0)
_HEX_R = 1.0 / _SQRT3          # circumradius for unit cell-to-cell spacing


def _hex_cell(cx: float, cy: float) -> list:
    # Pointy-top hexagon: vertices at 30 + 60k degrees.
    out = []
    for k in range(6):
        a = math.radians(30 + 60 * k)
        out.append((cx + _HEX_R * math.cos(a), cy + _HEX_R * math.sin(a)))
    return out


def hex_board(size: int, shape: str = 'Hexagon') -> GeomGraph:
    """Hexagonal tiling cut to a shape: Hexagon (hexhex) or Diamond (rhombus)."""
    if size <= 0:
        raise GraphError(f'hex size {size} must be positive')
    centers = []
    if shape == 'Hexagon':
        for r in range(-(size - 1), size):
            q_lo = max(-(size - 1), -r - (size - 1))
            q_hi = min(size - 1, -r + (size - 1))
            for q in range(q_lo, q_hi + 1):
                centers.append((q + r / 2.0, r * _SQRT3 / 2.0))
    elif shape == 'Diamond':
        for r in range(size):
            for q in range(size):
                centers.append((q + r / 2.0, r * _SQRT3 / 2.0))
    else:
        raise GraphError(f'unsupported hex shape {shape!r}')
    return _build_from_cells([_hex_cell(cx, cy) for cx, cy in centers])


def tri_board(size: int) -> GeomGraph:
    """Triangle-shaped patch of the triangular tiling, size cells per side."""
    if size <= 0:
        raise GraphError(f'tri size {size} must be positive')

    def pt(i: int, j: int) -> tuple:
        return (i + j / 2.0, j * _SQRT3 / 2.0)

    cells = []
    for j in range(size):               # row j, bottom row is longest
        for i in range(size - j):       # upward triangles
            cells.append([pt(i, j), pt(i + 1, j), pt(i, j + 1)])
        for i in range(size - j - 1):   # downward triangles
            cells.append([pt(i + 1, j), pt(i + 1, j + 1), pt(i, j + 1)])
    return _build_from_cells(cells)


def graph_literal(vertex_rows: list, edge_pairs: list,
                  cells: list | None = None) -> GeomGraph:
    """(graph vertices:{...} edges:{...}): explicit graph, faces traced."""
    verts = []
    for row in vertex_rows:
        if len(row) != 2:
            raise GraphError(f'vertex needs two coordinates, got {row!r}')
        verts.append((float(row[0]), float(row[1])))
    edges = set()
    for pair in edge_pairs:
        a, b = int(pair[0]), int(pair[1])
        if not (0 <= a < len(verts) and 0 <= b < len(verts)):
            raise GraphError(f'edge ({a},{b}) references undefined vertex')
        if a == b:
            raise GraphError(f'zero-length edge at vertex {a}')
        edges.add((min(a, b), max(a, b)))
    if cells is not None:
        faces = [tuple(int(v) for v in cell) for cell in cells]
    else:
        faces = trace_faces(verts, sorted(edges))
    norm = [_normalize_face(verts, f) for f in faces]
    norm.sort(key=lambda f: (min(f), f))
    g = GeomGraph(verts, sorted(edges), norm)
    g.validate()
    return g


def centroid(verts: list, face: tuple) -> tuple:
    xs = [verts[v][0] for v in face]
    ys = [verts[v][1] for v in face]
    return (sum(xs) / len(face), sum(ys) / len(face))
