import math
import random

import pytest

from ludex.board import ops
from ludex.board.graph import (GeomGraph, GraphError, centroid, hex_board,
                               rectangle, square, tri_board, graph_literal)
from ludex.board.directions import WINDS, opposite, wind_for_angle, resolve_relative
from ludex.board.topology import Topology, build_topology, build_graph
from ludex.board.tracks import END, OFF, build_tracks
from ludex.lud import parse_fragment


def topo_of(text, use='Cell'):
    node = parse_fragment(text)[0]
    return Topology(build_graph(node), use)


def cell_at(topo, x, y):
    for s in topo.sites:
        if math.hypot(s.centroid[0] - x, s.centroid[1] - y) < 1e-6:
            return s.index
    raise AssertionError(f'no site at ({x}, {y})')


# -- plain grids -------------------------------------------------------------

def test_square3_counts():
    g = square(3)
    assert len(g.vertices) == 16
    assert len(g.edges) == 24
    assert len(g.faces) == 9


@pytest.mark.parametrize('n', [3, 5, 8])
def test_square_euler(n):
    g = square(n)
    assert len(g.faces) == n * n
    assert len(g.vertices) == (n + 1) ** 2
    assert len(g.edges) == 2 * n * (n + 1)
    assert len(g.vertices) - len(g.edges) + len(g.faces) == 1


def test_square3_relations():
    t = topo_of('(square 3)')
    mid = cell_at(t, 1.5, 1.5)
    corner = cell_at(t, 0.5, 0.5)
    assert sorted(t.neighbors['Orthogonal'][mid]) == sorted(
        cell_at(t, x, y) for x, y in [(0.5, 1.5), (2.5, 1.5), (1.5, 0.5), (1.5, 2.5)])
    assert sorted(t.neighbors['Diagonal'][mid]) == sorted(
        cell_at(t, x, y) for x, y in [(0.5, 0.5), (2.5, 0.5), (0.5, 2.5), (2.5, 2.5)])
    assert t.neighbors['Diagonal'][mid] == t.neighbors['OffDiagonal'][mid]
    assert len(t.neighbors['Adjacent'][mid]) == 8
    assert len(t.neighbors['Adjacent'][corner]) == 3


def test_square3_sets():
    t = topo_of('(square 3)')
    mid = cell_at(t, 1.5, 1.5)
    assert t.sets['Inner'] == [mid]
    assert sorted(t.sets['Outer']) == [i for i in range(9) if i != mid]
    assert t.sets['Corners'] == sorted(
        cell_at(t, x, y) for x, y in [(0.5, 0.5), (2.5, 0.5), (0.5, 2.5), (2.5, 2.5)])
    assert t.sets['ConcaveCorners'] == []
    assert t.sets['Centre'] == [mid]
    assert t.sets['Top'] == [6, 7, 8]
    assert t.sets['Bottom'] == [0, 1, 2]
    assert t.sets['Left'] == [0, 3, 6]
    assert t.sets['Right'] == [2, 5, 8]


def test_square_labels_and_phases():
    t = topo_of('(square 10)')
    assert t.site_by_label('A1') == 0
    assert t.site_by_label('A4') == 30
    assert t.site_by_label('D1') == 3
    assert t.site_by_label('J7') == 69
    assert t.sites[0].phase == 0
    assert t.sites[1].phase == 1
    assert t.sites[10].phase == 1


def test_square_steps_and_radials():
    t = topo_of('(square 3)')
    a1, b2, c3 = t.site_by_label('A1'), t.site_by_label('B2'), t.site_by_label('C3')
    assert t.step(a1, 'N') == t.site_by_label('A2')
    assert t.step(a1, 'NE', 'Diagonal') == b2
    assert t.step(a1, 'S') is None
    assert t.radial(a1, 'NE', 'Diagonal') == (b2, c3)
    assert t.radial(a1, 'E', 'Orthogonal') == (1, 2)
    assert t.radial(b2, 'W', 'Adjacent') == (t.site_by_label('A2'),)


def test_step_symmetry_square_and_hex():
    for t in (topo_of('(square 5)'), topo_of('(hex 3)')):
        for rel in ('Orthogonal', 'Diagonal'):
            for s in range(t.num_sites):
                for w, n in t.steps[rel][s].items():
                    assert t.step(n, opposite(w), rel) == s


def test_radials_are_maximal():
    t = topo_of('(square 5)')
    for rel in ('Orthogonal', 'Diagonal', 'Adjacent'):
        for s in range(t.num_sites):
            for w, ray in t.radials[rel][s].items():
                last = ray[-1] if ray else s
                nxt = t.step(last, w, rel)
                assert nxt is None or nxt in (s,) + ray


# -- hex and tri -------------------------------------------------------------

def test_hexhex3_counts():
    g = hex_board(3)
    assert len(g.faces) == 19
    assert len(g.vertices) == 54
    assert len(g.edges) == 72
    assert len(g.vertices) - len(g.edges) + len(g.faces) == 1


def test_hex_diamond():
    g = hex_board(3, 'Diamond')
    assert len(g.faces) == 9


def test_hex_winds_and_relations():
    t = topo_of('(hex 3)')
    center = cell_at(t, 0.0, 0.0)
    assert len(t.neighbors['Orthogonal'][center]) == 6
    assert t.neighbors['Diagonal'][center] == []
    assert t.neighbors['OffDiagonal'][center] == []
    assert t.supported_winds(center, 'Orthogonal') == \
        ['NNE', 'E', 'SSE', 'SSW', 'W', 'NNW']
    assert len(t.sets['Corners']) == 6
    assert t.num_phases == 3


def test_tri4_counts():
    g = tri_board(4)
    assert len(g.faces) == 16
    assert len(g.vertices) == 15
    assert len(g.edges) == 30
    ups = sum(1 for f in g.faces
              if sorted(g.vertices[v][1] for v in f)[1] < 1e-6 +
              sorted(g.vertices[v][1] for v in f)[0] + 0.5)
    assert ups == 10


def test_tri_relations_against_bruteforce():
    t = topo_of('(tri 4)')
    g = t.graph
    for i in range(t.num_sites):
        share_edge = set()
        share_vert = set()
        for j in range(t.num_sites):
            if i == j:
                continue
            common = set(g.faces[i]) & set(g.faces[j])
            if len(common) >= 2:
                share_edge.add(j)
            if common:
                share_vert.add(j)
        assert set(t.neighbors['Orthogonal'][i]) == share_edge
        assert set(t.neighbors['Adjacent'][i]) == share_vert
        assert len(share_edge) <= 3


def test_tri_diagonal_is_fan_opposite():
    h = math.sqrt(3) / 2
    t = topo_of('(tri 4)')
    a = cell_at(t, 1.0, 4 * h / 3)        # points-up, second row
    b = cell_at(t, 2.0, 2 * h / 3)        # points-down, first row
    assert b in t.neighbors['Diagonal'][a]
    assert a in t.neighbors['Diagonal'][b]
    assert b not in t.neighbors['Orthogonal'][a]
    assert t.site_phases[a] != t.site_phases[b] or True  # phases by orientation
    up0 = cell_at(t, 0.5, h / 3)
    up1 = cell_at(t, 1.5, h / 3)
    assert up1 not in t.neighbors['Diagonal'][up0]


# -- graph literals and vertex mode ------------------------------------------

GRAPH_LUD = ('(graph vertices:{ {0 0} {0 1} {1 1} {1 0} {0.5 1.5} } '
             'edges:{ {0 1} {1 2} {2 3} {3 0} {1 4} {4 2} })')


def test_graph_literal_counts():
    node = parse_fragment(GRAPH_LUD)[0]
    g = build_graph(node)
    assert len(g.vertices) == 5
    assert len(g.edges) == 6
    assert len(g.faces) == 2


def test_graph_literal_vertex_relations():
    t = topo_of(GRAPH_LUD, use='Vertex')
    assert sorted(t.neighbors['Orthogonal'][1]) == [0, 2, 4]
    assert t.neighbors['Diagonal'][1] == [3]
    assert t.neighbors['Diagonal'][0] == [2]
    assert t.neighbors['Diagonal'][4] == []


def test_board_node_use_vertex():
    node = parse_fragment('(board (square 9) use:Vertex)')[0]
    t = build_topology(node)
    assert t.site_type == 'Vertex'
    assert t.num_sites == 100
    assert len(t.neighbors['Orthogonal'][0]) == 2
    mid = t.site_by_label('E5')
    assert len(t.neighbors['Orthogonal'][mid]) == 4
    assert len(t.neighbors['Diagonal'][mid]) == 4


# -- operators ----------------------------------------------------------------

def test_dual_square3():
    g = ops.dual(square(3))
    assert len(g.vertices) == 9
    assert len(g.edges) == 12
    assert len(g.faces) == 4


def test_trim_removes_dangling():
    g = graph_literal([(0, 0), (1, 0), (1, 1), (0, 1), (2, 2)],
                      [(0, 1), (1, 2), (2, 3), (3, 0), (2, 4)])
    t = ops.trim(g)
    assert len(t.vertices) == 4
    assert len(t.edges) == 4
    assert len(t.faces) == 1


def test_remove_and_hole_and_keep():
    g = square(3)
    removed = ops.remove_elements(g, cells=[4])
    assert len(removed.faces) == 8
    assert len(removed.vertices) == 16
    holed = ops.punch_holes(g, [4])
    assert len(holed.faces) == 8
    assert len(holed.edges) == len(g.edges)
    kept = ops.keep_cells(g, [0, 1, 2])
    assert len(kept.faces) == 3
    assert len(kept.vertices) == 8


def test_hole_breaks_adjacency_across_gap():
    t = topo_of('(hole (square 3) cells:{4})')
    assert t.num_sites == 8
    left = cell_at(t, 0.5, 1.5)
    right = cell_at(t, 2.5, 1.5)
    assert right not in t.neighbors['Orthogonal'][left]
    assert right not in t.neighbors['Adjacent'][left]


def test_rotate_and_scale_preserve_structure():
    g = square(4)
    r = ops.rotate(g, 37.0)
    assert len(r.vertices) == len(g.vertices)
    assert len(r.edges) == len(g.edges)
    assert len(r.faces) == len(g.faces)
    s = ops.scale(g, 2.5)
    d0 = math.dist(g.vertices[0], g.vertices[1])
    d1 = math.dist(s.vertices[0], s.vertices[1])
    assert abs(d1 - 2.5 * d0) < 1e-9


def test_renumber_sorts_bottom_left_up():
    g = ops.translate(square(2), 5, 5)
    r = ops.renumber(ops.merge([g, square(2)]))
    ys = [round(y, 6) for _, y in r.vertices]
    xs = [round(x, 6) for x, _ in r.vertices]
    assert all((ys[i], xs[i]) <= (ys[i + 1], xs[i + 1])
               for i in range(len(r.vertices) - 1))


def test_random_merges_vertex_identity():
    rng = random.Random(17)
    for _ in range(50):
        a = rectangle(rng.randint(1, 4), rng.randint(1, 4))
        dx, dy = rng.randint(-3, 3), rng.randint(-3, 3)
        b = ops.translate(rectangle(rng.randint(1, 4), rng.randint(1, 4)), dx, dy)
        m = ops.merge([a, b])
        from ludex.board.graph import qkey
        keys = {qkey(*p) for p in a.vertices} | {qkey(*p) for p in b.vertices}
        assert len(m.vertices) == len(keys)
        m.validate()
        assert len(m.faces) <= len(a.faces) + len(b.faces)


# -- the merged race board -----------------------------------------------------

UR_BOARD = '(merge (rectangle 3 4) (shift 0 1 (rectangle 1 12)))'


def test_merged_race_board_numbering():
    t = topo_of(UR_BOARD)
    assert t.num_sites == 20
    for i, x in enumerate([0.5, 1.5, 2.5, 3.5]):
        assert cell_at(t, x, 0.5) == i
    for k, x in enumerate([0.5, 1.5, 2.5, 3.5, 4.5]):
        assert cell_at(t, x, 1.5) == 4 + k
    for k, x in enumerate([0.5, 1.5, 2.5, 3.5]):
        assert cell_at(t, x, 2.5) == 9 + k
    for k, x in enumerate([5.5, 6.5, 7.5, 8.5, 9.5, 10.5, 11.5]):
        assert cell_at(t, x, 1.5) == 13 + k


def test_race_track_walk():
    node = parse_fragment(
        f'(board {UR_BOARD} '
        '{ (track "Track1" "3,W,N1,E,End" P1 directed:True) '
        '  (track "Track2" "19,W,S1,E,End" P2 directed:True) })')[0]
    t = build_topology(node)
    tracks = build_tracks(node, t)
    assert [tr.name for tr in tracks] == ['Track1', 'Track2']
    t1 = tracks[0]
    assert t1.owner == 1
    assert t1.directed
    assert not t1.looped
    assert list(t1.elems) == [3, 2, 1, 0, 4, 5, 6, 7, 8,
                              13, 14, 15, 16, 17, 18, 19, END]
    assert t1.walk(3, 1) == 2
    assert t1.walk(8, 1) == 13
    assert t1.walk(19, 1) == END
    assert t1.walk(19, 2) == OFF
    assert t1.walk(99, 1) == 3   # off-track pieces enter at the start


def test_track_site_list_and_loop():
    node = parse_fragment(
        '(board (square 3) { (track "Loop" {0 1 2 5 8 7 6 3} loop:True) })')[0]
    t = build_topology(node)
    (tr,) = build_tracks(node, t)
    assert tr.looped
    assert tr.walk(3, 1) == 0
    assert tr.walk(8, 3) == 3
    assert tr.walk(6, 2) == 0


# -- direction machinery -------------------------------------------------------

def test_wind_snapping():
    assert wind_for_angle(0) == 'E'
    assert wind_for_angle(60) == 'NNE'
    assert wind_for_angle(120) == 'NNW'
    assert wind_for_angle(240) == 'SSW'
    assert wind_for_angle(300) == 'SSE'
    assert wind_for_angle(90) == 'N'
    assert opposite('NNE') == 'SSW'


def test_relative_resolution_full_ring():
    ring = list(WINDS[::2])  # N NE E SE S SW W NW
    assert resolve_relative('Forward', 'N', ring) == ['N']
    assert resolve_relative('Backward', 'N', ring) == ['S']
    assert resolve_relative('Rightward', 'N', ring) == ['E']
    assert resolve_relative('Leftward', 'N', ring) == ['W']
    assert resolve_relative('FR', 'N', ring) == ['NE']
    assert resolve_relative('FL', 'N', ring) == ['NW']
    assert resolve_relative('FRR', 'N', ring) == ['E']
    assert resolve_relative('BR', 'N', ring) == ['SE']
    assert resolve_relative('BL', 'N', ring) == ['SW']
    assert set(resolve_relative('Forwards', 'N', ring)) == {'NW', 'N', 'NE'}
    assert set(resolve_relative('Rightwards', 'N', ring)) == {'NE', 'E', 'SE'}
    assert resolve_relative('Forward', 'E', ring) == ['E']
    assert resolve_relative('Rightward', 'E', ring) == ['S']


def test_resolve_directions_on_board():
    t = topo_of('(square 3)')
    mid = t.site_by_label('B2')
    pairs = t.resolve_directions(['Orthogonal'], mid)
    assert pairs == [('Orthogonal', w) for w in ['N', 'E', 'S', 'W']]
    pairs = t.resolve_directions(['N', 'S'], mid)
    assert pairs == [('Adjacent', 'N'), ('Adjacent', 'S')]
    pairs = t.resolve_directions(['Forward'], mid, facing='E')
    assert pairs == [('Adjacent', 'E')]
    corner = t.site_by_label('A1')
    assert t.resolve_directions(['S'], corner) == []
    with pytest.raises(GraphError):
        t.resolve_directions(['Sideways'], mid)
