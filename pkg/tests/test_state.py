import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ludex.state import (BitSet, ChunkSet, ContainerFlatState, GameState,
                         PuzzleState, ZobristTable, chunk_bits_for, splitmix64)


# -- chunk sizing and layout ---------------------------------------------------

@pytest.mark.parametrize('values,bits', [
    (1, 1), (2, 1), (3, 2), (4, 2), (5, 4), (8, 4), (16, 4),
    (17, 8), (256, 8), (257, 16), (65536, 16), (65537, 32),
])
def test_chunk_bits_for(values, bits):
    assert chunk_bits_for(values) == bits


def test_chunk_bits_rejects_zero():
    with pytest.raises(ValueError):
        chunk_bits_for(0)


def test_packed_layout_low_byte():
    cs = ChunkSet(2, 8)
    cs.set(0, 1)
    cs.set(1, 3)
    assert cs.words[0] & 0xFF == 0b1101


def test_packed_layout_oracle():
    rng = random.Random(5)
    for bits in (1, 2, 4, 8, 16, 32):
        n = 77
        cs = ChunkSet(bits, n)
        expect = [0] * n
        for _ in range(300):
            i = rng.randrange(n)
            v = rng.randrange(1 << bits)
            cs.set(i, v)
            expect[i] = v
        per_word = 64 // bits
        words = [0] * ((n + per_word - 1) // per_word)
        for i, v in enumerate(expect):
            words[i // per_word] |= v << ((i % per_word) * bits)
        assert cs.words == words


def test_no_straddle_at_word_boundary():
    cs = ChunkSet(4, 40)
    cs.set(15, 0xF)   # last chunk of word 0
    cs.set(16, 0xF)   # first chunk of word 1
    assert cs.words[0] >> 60 == 0xF
    assert cs.words[1] & 0xF == 0xF
    assert all(w < (1 << 64) for w in cs.words)


def test_fresh_chunks_read_zero():
    cs = ChunkSet(8, 20)
    assert all(cs.get(i) == 0 for i in range(20))


def test_chunk_bounds():
    cs = ChunkSet(2, 4)
    with pytest.raises(IndexError):
        cs.get(4)
    with pytest.raises(ValueError):
        cs.set(0, 4)


@settings(max_examples=40)
@given(bits=st.sampled_from([1, 2, 4, 8, 16, 32]),
       seq=st.lists(st.tuples(st.integers(0, 63), st.integers(0, 2 ** 32 - 1)),
                    max_size=60))
def test_round_trip_random(bits, seq):
    cs = ChunkSet(bits, 64)
    shadow = [0] * 64
    for i, raw in seq:
        v = raw & ((1 << bits) - 1)
        cs.set(i, v)
        shadow[i] = v
    assert [cs.get(i) for i in range(64)] == shadow


def test_bitset():
    b = BitSet(70)
    b.set(0)
    b.set(69)
    assert list(b) == [0, 69]
    assert b.count() == 2
    b.set(0, False)
    assert not b.get(0)
    b.fill()
    assert b.count() == 70
    c = b.copy()
    c.clear()
    assert b.count() == 70 and c.count() == 0


# -- zobrist -------------------------------------------------------------------

def test_splitmix_known_value():
    # First output of the reference sequence for seed 0.
    assert splitmix64(0) == 0xE220A8397B1DCDAF


def test_zobrist_determinism_and_spread():
    t1, t2 = ZobristTable(42), ZobristTable(42)
    t3 = ZobristTable(43)
    seen = set()
    for kind in ('what', 'who', 'state', 'count'):
        for site in range(30):
            for value in range(1, 4):
                k = t1.key(kind, site, value)
                assert k == t2.key(kind, site, value)
                assert k != t3.key(kind, site, value)
                seen.add(k)
    assert len(seen) == 4 * 30 * 3
    assert t1.mover_key(1) != t1.mover_key(2)


# -- container state -----------------------------------------------------------

def make_container(**kw):
    return ContainerFlatState(20, 5, 2, ZobristTable(7), **kw)


def test_place_remove_hash_involution():
    c = make_container()
    h0 = c.hash
    c.set_what(4, 3)
    c.set_who(4, 1)
    assert c.hash != h0
    c.set_what(4, 0)
    c.set_who(4, 0)
    assert c.hash == h0


def test_incremental_hash_matches_scratch():
    rng = random.Random(11)
    c = make_container(with_count=True, with_state=True)
    for _ in range(500):
        s = rng.randrange(20)
        if rng.random() < 0.3:
            c.clear_site(s)
        else:
            c.set_what(s, rng.randrange(6))
            c.set_who(s, rng.randrange(3) if c.get_what(s) else 0)
            if c.get_what(s):
                c.set_count(s, rng.randrange(1, 9))
                c.set_state(s, rng.randrange(4))
            else:
                c.set_count(s, 0)
                c.set_state(s, 0)
        assert c.hash == c.hash_from_scratch()
    assert c.coherent()


def test_empty_tracks_what():
    c = make_container()
    assert c.is_empty(0)
    c.set_what(0, 2)
    assert not c.is_empty(0)
    c.set_what(0, 0)
    assert c.is_empty(0)


def test_offset_containers_do_not_collide():
    z = ZobristTable(7)
    a = ContainerFlatState(10, 5, 2, z, offset=0)
    b = ContainerFlatState(10, 5, 2, z, offset=10)
    a.set_what(3, 1)
    b.set_what(3, 1)
    assert a.hash != b.hash


def test_container_copy_is_independent():
    c = make_container(with_count=True)
    c.set_what(2, 1)
    c.set_count(2, 4)
    d = c.copy()
    d.set_what(2, 0)
    assert c.get_what(2) == 1
    assert d.get_what(2) == 0
    assert c.hash == c.hash_from_scratch()
    assert d.hash == d.hash_from_scratch()


def test_rotation_value_not_hashed():
    c = make_container(with_rotation=True, with_value=True)
    h = c.hash
    c.set_rotation(1, 3)
    c.set_value(1, 5)
    assert c.hash == h


# -- puzzle state --------------------------------------------------------------

def test_puzzle_reset_and_bits():
    p = PuzzleState(4, 1, 9)
    assert all(p.bit(0, v) for v in range(1, 10))
    p.set(0, 5)
    assert p.is_resolved(0)
    assert p.what(0) == 5
    p.reset(0)
    assert not p.is_resolved(0)
    assert p.what(0) == 0


def test_puzzle_toggle_involution():
    p = PuzzleState(2, 0, 1)
    before = p.domains[1]
    p.toggle(1, 0)
    p.toggle(1, 0)
    assert p.domains[1] == before


def test_puzzle_resolution_is_popcount_one():
    p = PuzzleState(1, 0, 3)
    p.domains[0] = 0b0101
    assert not p.is_resolved(0)
    p.domains[0] = 0b0100
    assert p.is_resolved(0)
    assert p.what(0) == 2
    p.domains[0] = 0
    assert not p.is_resolved(0)


def test_puzzle_domain_bounds():
    p = PuzzleState(1, 0, 1)
    with pytest.raises(ValueError):
        p.set(0, 2)


# -- scalar block ----------------------------------------------------------------

def test_gamestate_copy():
    g = GameState(2)
    g.scores[1] = 5
    g.visited.add(3)
    h = g.copy()
    h.scores[1] = 9
    h.visited.add(4)
    assert g.scores[1] == 5
    assert g.visited == {3}
