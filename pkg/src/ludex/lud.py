'''
Reader and writer for the .lud game description format.

A description is a tree of parenthesised nodes. Each node opens with a label
(`(players 2)`), or with a quoted name for a macro call (`("Hop" ...)`).
Arguments are nodes, bare constants (`Each`, `true`), strings, numbers,
`{ ... }` arrays, `name:value` named arguments, `<Tag>` option references,
`#n` macro parameters, or the hole marker `~`. Line comments run from `//` to
end of line.

The lexer and parser are deliberately permissive about vocabulary: any label
parses. Whether a label names something the engine supports is decided at
game-compile time, so descriptions using unsupported features load fine and
fail later with a precise diagnostic.
'''

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional, Union

# Token kinds.
LPAREN = 'lparen'
RPAREN = 'rparen'
LBRACE = 'lbrace'
RBRACE = 'rbrace'
STRING = 'string'
NUMBER = 'number'
LABEL = 'label'
NAMED = 'named'    # 'if:' -- trailing colon included in text
PARAM = 'param'    # '#1'
TILDE = 'tilde'    # '~'
ANGLE = 'angle'    # '<Tag>' or '<raw item text>'
STAR = 'star'      # '*' -- marks an option item as the default


class LudError(Exception):
    """Base for all .lud reading problems; carries a source position."""

    def __init__(self, msg: str, line: int = 0, col: int = 0):
        self.line = line
        self.col = col
        where = f' at {line}:{col}' if line else ''
        super().__init__(msg + where)


class LexError(LudError):
    pass


class ParseError(LudError):
    pass


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


_LABEL_EXTRA = set('_.!=>+-*/%^')  # operator ludemes: (+ ...), (!= ...), (>= ...)


def tokenize(text: str) -> list[Token]:
    """Split .lud source into tokens. Comments vanish here."""
    toks: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)

    def advance(k: int) -> None:
        nonlocal i, line, col
        for _ in range(k):
            if text[i] == '\n':
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        c = text[i]
        if c in ' \t\r\n,':        # commas are cosmetic separators
            advance(1)
            continue
        if c == '/' and text[i:i + 2] == '//':
            while i < n and text[i] != '\n':
                advance(1)
            continue
        start_line, start_col = line, col
        if c in '(){}~*':
            kind = {'(': LPAREN, ')': RPAREN, '{': LBRACE,
                    '}': RBRACE, '~': TILDE, '*': STAR}[c]
            toks.append(Token(kind, c, start_line, start_col))
            advance(1)
            continue
        if c == '"':
            j = i + 1
            while j < n and text[j] != '"':
                j += 1
            if j >= n:
                raise LexError('unterminated string literal', start_line, start_col)
            toks.append(Token(STRING, text[i:j + 1], start_line, start_col))
            advance(j + 1 - i)
            continue
        if c == '<':
            # '<' doubles as the less-than ludeme; a chunk never has blank
            # space right after the bracket, a comparison always does.
            after = text[i + 1] if i + 1 < n else ''
            if after in ' \t\r\n':
                toks.append(Token(LABEL, '<', start_line, start_col))
                advance(1)
                continue
            if after == '=' :
                toks.append(Token(LABEL, '<=', start_line, start_col))
                advance(2)
                continue
            # Raw chunk up to the matching '>', skipping quoted strings so an
            # option value may contain arbitrary description text.
            j = i + 1
            while j < n and text[j] != '>':
                if text[j] == '"':
                    j += 1
                    while j < n and text[j] != '"':
                        j += 1
                    if j >= n:
                        raise LexError('unterminated string in option chunk',
                                       start_line, start_col)
                j += 1
            if j >= n:
                raise LexError("unterminated '<' chunk", start_line, start_col)
            toks.append(Token(ANGLE, text[i:j + 1], start_line, start_col))
            advance(j + 1 - i)
            continue
        if c == '#':
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            if j == i + 1:
                raise LexError("'#' must be followed by a parameter index",
                               start_line, start_col)
            toks.append(Token(PARAM, text[i:j], start_line, start_col))
            advance(j - i)
            continue
        if c.isdigit() or (c == '-' and i + 1 < n and text[i + 1].isdigit()):
            j = i + 1
            seen_dot = False
            while j < n and (text[j].isdigit() or (text[j] == '.' and not seen_dot
                                                   and j + 1 < n and text[j + 1].isdigit())):
                if text[j] == '.':
                    seen_dot = True
                j += 1
            toks.append(Token(NUMBER, text[i:j], start_line, start_col))
            advance(j - i)
            continue
        if c.isalpha() or c in _LABEL_EXTRA:
            j = i
            while j < n and (text[j].isalnum() or text[j] in _LABEL_EXTRA):
                j += 1
            word = text[i:j]
            if j < n and text[j] == ':':
                toks.append(Token(NAMED, word + ':', start_line, start_col))
                advance(j + 1 - i)
            else:
                toks.append(Token(LABEL, word, start_line, start_col))
                advance(j - i)
            continue
        raise LexError(f'unexpected character {c!r}', start_line, start_col)
    return toks


# ---------------------------------------------------------------------------
# Tree model.

class _Hole:
    """The `~` marker: erases the matching parameter occurrence on expansion."""
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return '~'


HOLE = _Hole()


@dataclass(frozen=True)
class Named:
    name: str            # without the trailing colon
    value: 'Arg'


@dataclass(frozen=True)
class Array:
    items: tuple


@dataclass(frozen=True)
class OptRef:
    """`<Tag>` or `<Tag:arg>` at a use site; raw value text at a defining site."""
    text: str            # without the angle brackets

    @property
    def tag(self) -> str:
        return self.text.split(':', 1)[0].strip()

    @property
    def arg(self) -> Optional[str]:
        if ':' in self.text:
            return self.text.split(':', 1)[1].strip()
        return None


@dataclass(frozen=True)
class Param:
    index: int           # 1-based


@dataclass
class LudNode:
    label: str
    args: tuple = ()
    star: bool = False                                  # option-item default marker
    pos: tuple = field(default=(0, 0), compare=False)   # (line, col) for diagnostics

    @property
    def is_define_call(self) -> bool:
        return self.label.startswith('"')

    def positional(self) -> list:
        return [a for a in self.args if not isinstance(a, Named)]

    def named(self, name: str):
        for a in self.args:
            if isinstance(a, Named) and a.name == name:
                return a.value
        return None

    def has_named(self, name: str) -> bool:
        return any(isinstance(a, Named) and a.name == name for a in self.args)

    def first(self, label: str) -> Optional['LudNode']:
        """First positional child node with the given label."""
        for a in self.args:
            if isinstance(a, LudNode) and a.label == label:
                return a
        return None

    def walk(self) -> Iterator['LudNode']:
        """Yield this node and every node below it (arrays and named included)."""
        yield self
        stack = [self.args]
        while stack:
            args = stack.pop()
            for a in args:
                if isinstance(a, LudNode):
                    yield a
                    stack.append(a.args)
                elif isinstance(a, Array):
                    stack.append(a.items)
                elif isinstance(a, Named):
                    stack.append((a.value,))

    def __repr__(self):
        return f'LudNode({to_text(self)!r})'


Arg = Union[LudNode, str, int, Fraction, Named, Array, OptRef, Param, _Hole]


# ---------------------------------------------------------------------------
# Parsing.

@dataclass
class DefineDef:
    name: str                 # without quotes
    body: tuple               # argument sequence spliced at each call site
    max_param: int
    pos: tuple = (0, 0)


@dataclass
class OptionItem:
    name: str
    values: list              # raw text per category argument
    is_default: bool
    description: str


@dataclass
class OptionCategory:
    category_name: str
    tag: str
    arg_names: list           # [''] when the category takes one anonymous argument
    items: list


@dataclass
class RulesetDef:
    name: str                 # includes the 'Ruleset/' prefix
    selections: list          # 'Category/Item' strings


@dataclass
class ParseResult:
    root: LudNode
    defines: list
    options: list
    rulesets: list


class _TokenStream:
    def __init__(self, toks: list[Token]):
        self.toks = toks
        self.i = 0

    def peek(self) -> Optional[Token]:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self) -> Token:
        t = self.peek()
        if t is None:
            last = self.toks[-1] if self.toks else None
            raise ParseError('unexpected end of input',
                             last.line if last else 0, last.col if last else 0)
        self.i += 1
        return t


def _strip_quotes(s: str) -> str:
    return s[1:-1]


def _parse_number(text: str) -> Union[int, Fraction]:
    if '.' in text:
        return Fraction(text)   # exact: '0.5' -> 1/2, keeps geometry deterministic
    return int(text)


def _parse_arg(ts: _TokenStream) -> Arg:
    t = ts.next()
    if t.kind == LPAREN:
        return _parse_node_body(ts, t)
    if t.kind == LBRACE:
        items = []
        while True:
            nxt = ts.peek()
            if nxt is None:
                raise ParseError("missing '}'", t.line, t.col)
            if nxt.kind == RBRACE:
                ts.next()
                return Array(tuple(items))
            items.append(_parse_arg(ts))
    if t.kind == STRING:
        return _strip_quotes(t.text)
    if t.kind == NUMBER:
        return _parse_number(t.text)
    if t.kind == LABEL:
        return LudNode(t.text, (), pos=(t.line, t.col))
    if t.kind == NAMED:
        value = _parse_arg(ts)
        return Named(t.text[:-1], value)
    if t.kind == ANGLE:
        return OptRef(t.text[1:-1].strip())
    if t.kind == PARAM:
        return Param(int(t.text[1:]))
    if t.kind == TILDE:
        return HOLE
    raise ParseError(f'unexpected token {t.text!r}', t.line, t.col)


def _parse_node_body(ts: _TokenStream, open_tok: Token) -> LudNode:
    head = ts.next()
    if head.kind == LABEL:
        label = head.text
    elif head.kind == STRING:
        label = head.text           # define call: label keeps its quotes
    elif head.kind == STAR:
        label = '*'                 # multiplication ludeme
    else:
        raise ParseError(f'expected a label after "(", got {head.text!r}',
                         head.line, head.col)
    args = []
    while True:
        t = ts.peek()
        if t is None:
            raise ParseError("missing ')'", open_tok.line, open_tok.col)
        if t.kind == RPAREN:
            ts.next()
            break
        args.append(_parse_arg(ts))
    node = LudNode(label, tuple(args), pos=(open_tok.line, open_tok.col))
    nxt = ts.peek()
    if nxt is not None and nxt.kind == STAR:
        ts.next()
        node.star = True
    return node


def parse_form(ts: _TokenStream) -> Arg:
    return _parse_arg(ts)


def parse_fragment(text: str) -> list:
    """Parse source into a list of argument values (no game-node requirement)."""
    ts = _TokenStream(tokenize(text))
    out = []
    while ts.peek() is not None:
        out.append(_parse_arg(ts))
    return out


def _option_category(node: LudNode) -> OptionCategory:
    strings = [a for a in node.args if isinstance(a, str)]
    if not strings:
        raise ParseError('option block needs a category name', *node.pos)
    category_name = strings[0]
    tag = ''
    for a in node.args:
        if isinstance(a, OptRef):
            tag = a.text
            break
    if not tag:
        raise ParseError(f'option {category_name!r} needs a <Tag>', *node.pos)
    args_decl = node.named('args')
    if args_decl is not None:
        if not isinstance(args_decl, Array):
            raise ParseError('args: expects an array of <name> chunks', *node.pos)
        arg_names = [a.text for a in args_decl.items if isinstance(a, OptRef)]
    else:
        arg_names = ['']
    items = []
    for a in node.args:
        if isinstance(a, Array):
            for it in a.items:
                if not (isinstance(it, LudNode) and it.label == 'item'):
                    continue
                it_strings = [x for x in it.args if isinstance(x, str)]
                name = it_strings[0] if it_strings else ''
                desc = it_strings[-1] if len(it_strings) > 1 else ''
                values = [x.text for x in it.args if isinstance(x, OptRef)]
                if len(values) != len(arg_names):
                    raise ParseError(
                        f'option item {name!r} has {len(values)} values, '
                        f'category declares {len(arg_names)} argument(s)', *it.pos)
                items.append(OptionItem(name, values, it.star, desc))
    if not items:
        raise ParseError(f'option {category_name!r} has no items', *node.pos)
    if not any(it.is_default for it in items):
        items[0].is_default = True
    return OptionCategory(category_name, tag.split(':', 1)[0], arg_names, items)


def _ruleset_defs(node: LudNode) -> list:
    out = []
    for a in node.args:
        if not isinstance(a, Array):
            continue
        for r in a.items:
            if not (isinstance(r, LudNode) and r.label == 'ruleset'):
                continue
            strings = [x for x in r.args if isinstance(x, str)]
            if not strings:
                raise ParseError('ruleset needs a name', *r.pos)
            name = strings[0]
            selections = []
            for x in r.args:
                if isinstance(x, Array):
                    selections.extend(s for s in x.items if isinstance(s, str))
            out.append(RulesetDef(name, selections))
    return out


def _hoist_defines(arg: Arg, defines: list) -> Optional[Arg]:
    """Strip (define ...) nodes out of the tree, collecting them; returns the
    rewritten arg, or None when the arg itself was a define."""
    if isinstance(arg, LudNode):
        if arg.label == 'define':
            defines.append(_define_def(arg))
            return None
        new_args = []
        for a in arg.args:
            kept = _hoist_defines(a, defines)
            if kept is not None:
                new_args.append(kept)
        if new_args == list(arg.args):
            return arg
        return LudNode(arg.label, tuple(new_args), arg.star, arg.pos)
    if isinstance(arg, Array):
        new_items = []
        for a in arg.items:
            kept = _hoist_defines(a, defines)
            if kept is not None:
                new_items.append(kept)
        return Array(tuple(new_items))
    if isinstance(arg, Named):
        kept = _hoist_defines(arg.value, defines)
        if kept is None:
            return None
        return Named(arg.name, kept)
    return arg


def _max_param(args: tuple) -> int:
    best = 0
    stack = list(args)
    while stack:
        a = stack.pop()
        if isinstance(a, Param):
            best = max(best, a.index)
        elif isinstance(a, LudNode):
            stack.extend(a.args)
        elif isinstance(a, Array):
            stack.extend(a.items)
        elif isinstance(a, Named):
            stack.append(a.value)
    return best


def _define_def(node: LudNode) -> DefineDef:
    strings = [a for a in node.args if isinstance(a, str)]
    if not strings:
        raise ParseError('define needs a quoted name', *node.pos)
    name = strings[0]
    # Drop only the first occurrence of the name; everything after it is body.
    body = []
    seen_name = False
    for a in node.args:
        if not seen_name and isinstance(a, str) and a == name:
            seen_name = True
            continue
        body.append(a)
    if not body:
        raise ParseError(f'define {name!r} has an empty body', *node.pos)
    return DefineDef(name, tuple(body), _max_param(tuple(body)), node.pos)


def parse(tokens: list[Token]) -> ParseResult:
    """Parse a full description: the (game ...) root plus side tables."""
    ts = _TokenStream(tokens)
    forms = []
    while ts.peek() is not None:
        forms.append(_parse_arg(ts))

    defines: list = []
    options: list = []
    rulesets: list = []
    roots: list = []
    for f in forms:
        if isinstance(f, LudNode) and f.label == 'option':
            options.append(_option_category(f))
            continue
        if isinstance(f, LudNode) and f.label == 'rulesets':
            rulesets.extend(_ruleset_defs(f))
            continue
        kept = _hoist_defines(f, defines)
        if kept is None:
            continue
        roots.append(kept)

    seen = set()
    for d in defines:
        if d.name in seen:
            raise ParseError(f'duplicate define name {d.name!r}', *d.pos)
        seen.add(d.name)

    game_roots = [r for r in roots if isinstance(r, LudNode) and r.label == 'game']
    if not game_roots:
        raise ParseError('description has no (game ...) node')
    if len(game_roots) > 1:
        raise ParseError('description has more than one (game ...) node')
    return ParseResult(game_roots[0], defines, options, rulesets)


def parse_text(text: str) -> ParseResult:
    return parse(tokenize(text))


# ---------------------------------------------------------------------------
# Printing.

def _number_text(v: Union[int, Fraction]) -> str:
    if isinstance(v, int):
        return str(v)
    num, den = v.numerator, v.denominator
    k = 0
    scaled = num
    while den != 1:
        # Parsed decimals always have a power-of-ten denominator.
        if den % 10 == 0:
            den //= 10
        elif den % 5 == 0:
            den //= 5
            scaled *= 2
        elif den % 2 == 0:
            den //= 2
            scaled *= 5
        else:
            return repr(float(v))
        k += 1
    digits = str(abs(scaled)).rjust(k + 1, '0')
    sign = '-' if scaled < 0 else ''
    return f'{sign}{digits[:-k]}.{digits[-k:]}' if k else f'{sign}{digits}'


def _arg_text(a: Arg) -> str:
    if isinstance(a, LudNode):
        if not a.args and not a.is_define_call:
            return a.label
        return to_text(a)
    if isinstance(a, str):
        return f'"{a}"'
    if isinstance(a, (int, Fraction)):
        return _number_text(a)
    if isinstance(a, Named):
        return f'{a.name}:{_arg_text(a.value)}'
    if isinstance(a, Array):
        return '{' + ' '.join(_arg_text(x) for x in a.items) + '}'
    if isinstance(a, OptRef):
        return f'<{a.text}>'
    if isinstance(a, Param):
        return f'#{a.index}'
    if a is HOLE:
        return '~'
    raise TypeError(f'cannot print {a!r}')


def to_text(node: LudNode) -> str:
    """Render a tree back to .lud source (single line, canonical spacing)."""
    parts = [node.label] + [_arg_text(a) for a in node.args]
    text = '(' + ' '.join(parts) + ')'
    return text + '*' if node.star else text
