"""Lexer/parser behavior and the print/parse round trip."""

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from ludex.lud import (
    ANGLE, HOLE, LABEL, LBRACE, LPAREN, NAMED, NUMBER, RBRACE, RPAREN, STRING,
    Array, LexError, LudNode, Named, OptRef, Param, ParseError,
    parse_fragment, parse_text, to_text, tokenize,
)

AMAZONS = '''
(game "Amazons"
    (players 2)
    (equipment {
        (board (square 10))
        (piece "Queen" Each (move Slide (then (moveAgain))))
        (piece "Dot" Neutral)
        }
    )
    (rules
        (start {
            (place "Queen1" {"A4" "D1" "G1" "J4"})
            (place "Queen2" {"A7" "D10" "G10" "J7"})
        })
        (play
            (if (is Even (count Moves))
                (forEach Piece)
                (move Shoot (piece "Dot0"))
            )
        )
        (end (if (no Moves Next) (result Mover Win)))
    )
)
'''


def test_tokenize_players():
    kinds = [t.kind for t in tokenize('(players 2)')]
    assert kinds == [LPAREN, LABEL, NUMBER, RPAREN]


def test_tokenize_braced_strings():
    kinds = [t.kind for t in tokenize('(place "Queen1" {"A4" "D1"})')]
    assert kinds == [LPAREN, LABEL, STRING, LBRACE, STRING, STRING, RBRACE, RPAREN]


def test_tokenize_named_arg():
    toks = tokenize('(hand Each size:3)')
    named = [t for t in toks if t.kind == NAMED]
    assert len(named) == 1 and named[0].text == 'size:'
    assert toks[toks.index(named[0]) + 1].kind == NUMBER


def test_tokenize_comments_vanish():
    toks = tokenize('(a 1) // trailing words (b 2)\n(c)')
    texts = [t.text for t in toks]
    assert 'b' not in texts and 'c' in texts


def test_tokenize_positions_monotone():
    toks = tokenize(AMAZONS)
    positions = [(t.line, t.col) for t in toks]
    assert positions == sorted(positions)


def test_unterminated_string_reports_position():
    with pytest.raises(LexError) as err:
        tokenize('(place "Queen1')
    assert err.value.line == 1


def test_parse_amazons_shape():
    result = parse_text(AMAZONS)
    root = result.root
    assert root.label == 'game'
    assert root.args[0] == 'Amazons'
    labels = [a.label for a in root.args[1:]]
    assert labels == ['players', 'equipment', 'rules']


def test_parse_requires_game_node():
    with pytest.raises(ParseError, match='no .game'):
        parse_text('(define "X" (pass))')


def test_parse_duplicate_define_rejected():
    with pytest.raises(ParseError, match='duplicate define'):
        parse_text('(define "X" (pass)) (define "X" (pass)) (game "g" (players 1))')


def test_parse_numbers():
    frag = parse_fragment('3 -2 0.5 10.25')
    assert frag == [3, -2, Fraction(1, 2), Fraction(41, 4)]


def test_parse_hole_and_params():
    frag = parse_fragment('("Hop" (is Enemy) ~ #2)')
    call = frag[0]
    assert call.is_define_call and call.label == '"Hop"'
    assert call.args[1] is HOLE
    assert call.args[2] == Param(2)


def test_parse_option_ref_forms():
    ref, ref2 = parse_fragment('<Board> <Result:type>')
    assert isinstance(ref, OptRef) and ref.tag == 'Board' and ref.arg is None
    assert ref2.tag == 'Result' and ref2.arg == 'type'


def test_parse_star_marks_item():
    frag = parse_fragment('(item "19x19" <19> "d")* (item "5x5" <5> "d")')
    assert frag[0].star and not frag[1].star


def test_named_value_can_be_node():
    (node,) = parse_fragment('(between if:(is Enemy (who at:(between))))')
    cond = node.named('if')
    assert isinstance(cond, LudNode) and cond.label == 'is'


def test_commas_are_separators():
    (arr,) = parse_fragment('{1, 2, 3}')
    assert arr == Array((1, 2, 3))


def test_round_trip_amazons():
    root = parse_text(AMAZONS).root
    again = parse_text(to_text(root)).root
    assert again == root


# Random-tree round trip. Keeps the grammar small but covers every arg kind.

labels = st.from_regex(r'[a-zA-Z][a-zA-Z0-9]{0,8}', fullmatch=True)
strings = st.from_regex(r'[a-zA-Z0-9 /,.]{0,12}', fullmatch=True)
numbers = st.one_of(
    st.integers(min_value=-10**6, max_value=10**6),
    st.builds(lambda a, b: Fraction(f'{a}.{b}'),
              st.integers(0, 999), st.integers(0, 999)),
)


def args_strategy(depth: int):
    base = st.one_of(
        numbers,
        strings,
        st.builds(LudNode, labels),            # bare constants
        st.just(HOLE),
        st.builds(OptRef, labels),
    )
    if depth <= 0:
        return base
    sub = args_strategy(depth - 1)
    return st.one_of(
        base,
        st.builds(lambda l, a: LudNode(l, tuple(a)), labels,
                  st.lists(sub, max_size=3)),
        st.builds(lambda a: Array(tuple(a)), st.lists(sub, max_size=3)),
        st.builds(Named, labels, sub),
    )


@given(st.builds(lambda l, a: LudNode(l, tuple(a)), labels,
                 st.lists(args_strategy(2), min_size=1, max_size=4)))
def test_round_trip_random_trees(node):
    (reparsed,) = parse_fragment(to_text(node))
    assert reparsed == node
