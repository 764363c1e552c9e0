'''
Graph operators: pure geometric transforms over GeomGraph values.

Vertex-order rules matter here. merge/union append the later graph's
non-coincident vertices after the earlier graph's, in their own order; nothing
re-sorts by position except renumber. Face lists are always re-sorted by
minimal vertex index, which is what gives combined boards their published cell
numbering.
'''

from __future__ import annotations

import math

from .graph import GeomGraph, GraphError, centroid, qkey, trace_faces, _normalize_face

__all__ = [
    'translate', 'scale', 'rotate', 'merge', 'remove_elements', 'keep_cells',
    'punch_holes', 'trim', 'renumber', 'dual',
]


def _rebuild(verts: list, edges, faces) -> GeomGraph:
    es = sorted({(min(a, b), max(a, b)) for a, b in edges})
    fs = []
    seen = set()
    for f in faces:
        key = tuple(sorted(set(f)))
        if key in seen:
            continue
        seen.add(key)
        fs.append(_normalize_face(verts, f))
    fs.sort(key=lambda f: (min(f), f))
    g = GeomGraph(list(verts), es, fs)
    g.validate()
    return g


def translate(g: GeomGraph, dx: float, dy: float) -> GeomGraph:
    verts = [(x + dx, y + dy) for x, y in g.vertices]
    return _rebuild(verts, g.edges, g.faces)


def scale(g: GeomGraph, fx: float, fy: float | None = None) -> GeomGraph:
    fy = fx if fy is None else fy
    if fx == 0 or fy == 0:
        raise GraphError('scale factor must be nonzero')
    verts = [(x * fx, y * fy) for x, y in g.vertices]
    return _rebuild(verts, g.edges, g.faces)


def rotate(g: GeomGraph, degrees: float) -> GeomGraph:
    a = math.radians(degrees)
    c, s = math.cos(a), math.sin(a)
    verts = [(x * c - y * s, x * s + y * c) for x, y in g.vertices]
    return _rebuild(verts, g.edges, g.faces)


def merge(graphs: list, identify_coincident: bool = True) -> GeomGraph:
    """Combine graphs; vertices within tolerance collapse to the earliest one."""
    if not graphs:
        raise GraphError('merge of no graphs')
    verts: list = []
    index: dict = {}
    edges: list = []
    faces: list = []
    for g in graphs:
        remap = {}
        for i, p in enumerate(g.vertices):
            k = qkey(*p)
            if identify_coincident and k in index:
                remap[i] = index[k]
            else:
                remap[i] = len(verts)
                index[k] = len(verts)
                verts.append(p)
        edges.extend((remap[a], remap[b]) for a, b in g.edges)
        faces.extend(tuple(remap[v] for v in f) for f in g.faces)
    return _rebuild(verts, edges, faces)


def _prune_orphans(verts, edges, faces):
    """Drop edges used by no face only if they came unglued from every face,
    then drop vertices used by nothing. Used after element removal."""
    used_vert = set()
    for f in faces:
        used_vert.update(f)
    for a, b in edges:
        used_vert.add(a)
        used_vert.add(b)
    if len(used_vert) == len(verts):
        return list(verts), list(edges), list(faces)
    keep = sorted(used_vert)
    remap = {v: i for i, v in enumerate(keep)}
    verts2 = [verts[v] for v in keep]
    edges2 = [(remap[a], remap[b]) for a, b in edges]
    faces2 = [tuple(remap[v] for v in f) for f in faces]
    return verts2, edges2, faces2


def remove_elements(g: GeomGraph, cells=(), vertices=(), edges=()) -> GeomGraph:
    """Delete elements by index; deleting a vertex cascades to everything it
    touches, deleting an edge cascades to its faces."""
    for c in cells:
        if not (0 <= c < len(g.faces)):
            raise GraphError(f'remove: no cell {c}')
    for v in vertices:
        if not (0 <= v < len(g.vertices)):
            raise GraphError(f'remove: no vertex {v}')
    for e in edges:
        if not (0 <= e < len(g.edges)):
            raise GraphError(f'remove: no edge {e}')
    dead_v = set(vertices)
    dead_e = {g.edges[e] for e in edges}
    dead_e.update((a, b) for a, b in g.edges if a in dead_v or b in dead_v)
    dead_c = set(cells)
    for i, f in enumerate(g.faces):
        if any(v in dead_v for v in f):
            dead_c.add(i)
            continue
        ring = {(min(f[k], f[(k + 1) % len(f)]), max(f[k], f[(k + 1) % len(f)]))
                for k in range(len(f))}
        if ring & dead_e:
            dead_c.add(i)
    faces = [f for i, f in enumerate(g.faces) if i not in dead_c]
    # Edges that belonged only to removed faces go too, unless explicitly kept
    # by surviving faces.
    live_ring = set()
    for f in faces:
        for k in range(len(f)):
            a, b = f[k], f[(k + 1) % len(f)]
            live_ring.add((min(a, b), max(a, b)))
    removed_rings = set()
    for i in dead_c:
        f = g.faces[i]
        for k in range(len(f)):
            a, b = f[k], f[(k + 1) % len(f)]
            removed_rings.add((min(a, b), max(a, b)))
    edges_left = [e for e in g.edges
                  if e not in dead_e
                  and (e in live_ring or e not in removed_rings)]
    verts2, edges2, faces2 = _prune_orphans(g.vertices, edges_left, faces)
    if not verts2:
        raise GraphError('remove left an empty graph')
    return _rebuild(verts2, edges2, faces2)


def keep_cells(g: GeomGraph, cells) -> GeomGraph:
    drop = [i for i in range(len(g.faces)) if i not in set(cells)]
    return remove_elements(g, cells=drop)


def punch_holes(g: GeomGraph, cells) -> GeomGraph:
    """Make sites unplayable but keep the surrounding structure intact."""
    for c in cells:
        if not (0 <= c < len(g.faces)):
            raise GraphError(f'hole: no cell {c}')
    faces = [f for i, f in enumerate(g.faces) if i not in set(cells)]
    if not faces:
        raise GraphError('hole left an empty graph')
    return _rebuild(g.vertices, g.edges, faces)


def trim(g: GeomGraph) -> GeomGraph:
    """Strip dangling exterior structure: degree<=1 vertices and their edges."""
    edges = set(g.edges)
    while True:
        degree: dict = {}
        for a, b in edges:
            degree[a] = degree.get(a, 0) + 1
            degree[b] = degree.get(b, 0) + 1
        dangling = {v for v, d in degree.items() if d <= 1}
        if not dangling:
            break
        edges = {(a, b) for a, b in edges if a not in dangling and b not in dangling}
    verts2, edges2, faces2 = _prune_orphans(g.vertices, sorted(edges), g.faces)
    if not verts2:
        raise GraphError('trim left an empty graph')
    return _rebuild(verts2, edges2, faces2)


def renumber(g: GeomGraph) -> GeomGraph:
    """Re-sort vertices bottom-left rightwards and upwards."""
    order = sorted(range(len(g.vertices)),
                   key=lambda v: (qkey(*g.vertices[v])[1], qkey(*g.vertices[v])[0]))
    remap = {v: i for i, v in enumerate(order)}
    verts = [g.vertices[v] for v in order]
    edges = [(remap[a], remap[b]) for a, b in g.edges]
    faces = [tuple(remap[v] for v in f) for f in g.faces]
    return _rebuild(verts, edges, faces)


def dual(g: GeomGraph) -> GeomGraph:
    """Weak dual: a vertex at each face centroid, edges between faces that
    share a board edge. No vertex for the outer face."""
    if not g.faces:
        raise GraphError('dual of a graph with no faces')
    verts = [centroid(g.vertices, f) for f in g.faces]
    by_edge: dict = {}
    for i, f in enumerate(g.faces):
        for k in range(len(f)):
            a, b = f[k], f[(k + 1) % len(f)]
            by_edge.setdefault((min(a, b), max(a, b)), []).append(i)
    edges = set()
    for shared in by_edge.values():
        for i in range(len(shared)):
            for j in range(i + 1, len(shared)):
                edges.add((min(shared[i], shared[j]), max(shared[i], shared[j])))
    faces = trace_faces(verts, sorted(edges))
    return _rebuild(verts, edges, faces)
