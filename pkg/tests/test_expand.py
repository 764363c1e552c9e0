"""Define and option expansion."""

import pytest

from ludex.expand import (
    ExpandError, expand, expand_defines, expand_options, load_text,
)
from ludex.lud import LudNode, parse_fragment, parse_text, to_text

HOP_GAME = '''
(define "Hop"
    (move Hop
        (between
            if:#1
            #2
        )
        (to if:#3)
    )
)
(game "g"
    (players 2)
    (equipment {
        (board (square 5))
        (piece "Ball"
            ("Hop"
                (is Enemy (who at:(between)))
                (apply (remove (between)))
                (is Empty (to))
            )
        )
        (piece "Disc"
            ("Hop"
                (is Enemy (who at:(between)))
                ~
                (is Empty (to))
            )
        )
    })
    (rules (play (forEach Piece)) (end (if (no Moves Next) (result Mover Win))))
)
'''


def _piece(tree, name):
    for node in tree.walk():
        if node.label == 'piece' and node.args and node.args[0] == name:
            return node
    raise AssertionError(f'no piece {name}')


def test_hop_define_expands_with_all_args():
    parsed = parse_text(HOP_GAME)
    tree = expand_defines(parsed.root, parsed.defines)
    ball = _piece(tree, 'Ball')
    move = ball.args[1]
    assert move.label == 'move'
    between = move.first('between')
    assert between.named('if').label == 'is'
    applies = [a for a in between.args if isinstance(a, LudNode) and a.label == 'apply']
    assert len(applies) == 1


def test_hop_define_hole_erases_argument():
    parsed = parse_text(HOP_GAME)
    tree = expand_defines(parsed.root, parsed.defines)
    disc = _piece(tree, 'Disc')
    between = disc.args[1].first('between')
    # The ~ argument erased #2: only the if: condition remains.
    assert len(between.args) == 1
    assert between.named('if') is not None


def test_expansion_leaves_no_calls_or_params():
    parsed = parse_text(HOP_GAME)
    tree = expand_defines(parsed.root, parsed.defines)
    text = to_text(tree)
    assert '"Hop"' not in text.replace('(piece', '')  # no call nodes survive
    assert '#' not in text


def test_define_free_tree_unchanged():
    parsed = parse_text('(game "g" (players 1))')
    assert expand_defines(parsed.root, []) == parsed.root


def test_expand_defines_idempotent():
    parsed = parse_text(HOP_GAME)
    once = expand_defines(parsed.root, parsed.defines)
    twice = expand_defines(once, parsed.defines)
    assert once == twice


def test_unknown_define_rejected():
    parsed = parse_text('(game "g" (players 1) (play ("Missing" 1)))')
    with pytest.raises(ExpandError, match="unknown define name 'Missing'"):
        expand_defines(parsed.root, parsed.defines)


def test_missing_argument_rejected():
    text = '(define "D" (a #1 #2)) (game "g" (play ("D" 1)))'
    parsed = parse_text(text)
    with pytest.raises(ExpandError, match='no argument supplied for #2'):
        expand_defines(parsed.root, parsed.defines)


def test_recursive_define_hits_depth_cap():
    text = '(define "R" ("R" #1)) (game "g" (play ("R" 1)))'
    parsed = parse_text(text)
    with pytest.raises(ExpandError, match='depth'):
        expand_defines(parsed.root, parsed.defines)


def test_nested_defines_expand():
    text = '''
    (define "Inner" (to if:#1))
    (define "Outer" (move Add ("Inner" #1)))
    (game "g" (play ("Outer" (is Empty (to)))))
    '''
    parsed = parse_text(text)
    tree = expand_defines(parsed.root, parsed.defines)
    add = tree.first('play').args[0]
    assert add.first('to').named('if').label == 'is'


def test_define_inside_game_tree_is_hoisted():
    text = '(game "g" (players 2) (define "X" (pass)) (play ("X")))'
    parsed = parse_text(text)
    assert [d.name for d in parsed.defines] == ['X']
    tree = expand_defines(parsed.root, parsed.defines)
    assert tree.first('play').args[0].label == 'pass'


OPTION_GAME = '''
(game "g"
    (players 2)
    (equipment { (board (hex Diamond <Board>)) })
    (rules
        (play (move Add (to (sites Empty))))
        (end (if (no Moves Next) (result Mover <Result:type>)))
    )
)
(option "Board Size" <Board> args:{ <size> } {
    (item "5x5"   <5>  "The game is played on a 5x5 board.")
    (item "10x10" <10> "The game is played on a 10x10 board.")
    (item "19x19" <19> "The game is played on a 19x19 board.")*
})
(option "End Rules" <Result> args:{ <type> } {
    (item "Standard" <Win>  "The player to reach the end wins.")*
    (item "Misere"   <Loss> "The player to reach the end loses.")
})
(rulesets {
    (ruleset "Ruleset/Standard" {
        "Board Size/19x19" "End Rules/Standard"
    })
    (ruleset "Ruleset/Misere" {
        "Board Size/10x10" "End Rules/Misere"
    })
})
'''


def _board_size(tree):
    return tree.first('equipment').args[0].items[0].first('hex').args[1]


def _result_kind(tree):
    for node in tree.walk():
        if node.label == 'result':
            return node.args[1].label
    raise AssertionError('no result node')


def test_option_defaults_apply():
    parsed = parse_text(OPTION_GAME)
    cat = parsed.options[0]
    assert [it.is_default for it in cat.items] == [False, False, True]
    tree = expand_options(parsed.root, parsed.options, parsed.rulesets, None)
    assert _board_size(tree) == 19
    assert _result_kind(tree) == 'Win'


def test_option_selection_overrides():
    parsed = parse_text(OPTION_GAME)
    tree = expand_options(parsed.root, parsed.options, parsed.rulesets,
                          ['End Rules/Misere'])
    assert _result_kind(tree) == 'Loss'
    assert _board_size(tree) == 19


def test_ruleset_expands_to_selections():
    parsed = parse_text(OPTION_GAME)
    tree = expand_options(parsed.root, parsed.options, parsed.rulesets,
                          'Ruleset/Misere')
    assert _board_size(tree) == 10
    assert _result_kind(tree) == 'Loss'


def test_empty_selection_equals_explicit_defaults():
    parsed = parse_text(OPTION_GAME)
    by_default = expand_options(parsed.root, parsed.options, parsed.rulesets, None)
    explicit = expand_options(parsed.root, parsed.options, parsed.rulesets,
                              ['Board Size/19x19', 'End Rules/Standard'])
    assert by_default == explicit


def test_no_angle_refs_survive():
    parsed = parse_text(OPTION_GAME)
    tree = expand_options(parsed.root, parsed.options, parsed.rulesets, None)
    assert '<' not in to_text(tree)


def test_unknown_category_and_item_rejected():
    parsed = parse_text(OPTION_GAME)
    with pytest.raises(ExpandError, match='unknown option category'):
        expand_options(parsed.root, parsed.options, parsed.rulesets, ['Nope/1'])
    with pytest.raises(ExpandError, match="unknown item"):
        expand_options(parsed.root, parsed.options, parsed.rulesets,
                       ['Board Size/7x7'])
    with pytest.raises(ExpandError, match='unknown ruleset'):
        expand_options(parsed.root, parsed.options, parsed.rulesets,
                       'Ruleset/Nope')


def test_first_item_is_default_when_none_starred():
    text = '''
    (game "g" (board (square <Board>)))
    (option "Board Size" <Board> args:{ <size> } {
        (item "3x3" <3> "small") (item "4x4" <4> "big")
    })
    '''
    parsed = parse_text(text)
    tree = expand_options(parsed.root, parsed.options, parsed.rulesets, None)
    assert tree.first('board').first('square').args[0] == 3


def test_full_pipeline_defines_then_options():
    text = '''
    (define "WinCondition" (result Mover <Result:type>))
    (game "g" (players 2) (end (if (no Moves Next) ("WinCondition"))))
    (option "End Rules" <Result> args:{ <type> } {
        (item "Standard" <Win> "win")* (item "Misere" <Loss> "lose")
    })
    '''
    tree = load_text(text, ['End Rules/Misere'])
    assert _result_kind(tree) == 'Loss'


def test_comparison_operators_are_not_option_refs():
    frag = parse_fragment('(< (count Moves) 10) (<= 1 2) (> 2 1) (>= 2 2)')
    assert [f.label for f in frag] == ['<', '<=', '>', '>=']


def test_multiplication_head():
    (node,) = parse_fragment('(* (score P1) 2)')
    assert node.label == '*' and node.args[1] == 2
