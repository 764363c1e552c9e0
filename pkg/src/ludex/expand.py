'''
Macro and option expansion: turns a parsed description into a fully concrete
tree with no macro calls, no `#n` parameters, and no `<Tag>` references.

Order matters and is fixed: macros (defines) expand first, then option
references are spliced, then macros run once more because a spliced option
value may itself contain macro calls. Both passes are idempotent on their own
output.
'''

from __future__ import annotations

from typing import Iterable, Optional, Union

from .lud import (
    HOLE, Array, DefineDef, LudError, LudNode, Named, OptRef, OptionCategory,
    Param, ParseResult, RulesetDef, parse_fragment, parse_text,
)

MAX_EXPANSION_DEPTH = 128


class ExpandError(LudError):
    pass


# ---------------------------------------------------------------------------
# Defines.

def _subst(arg, call_args: tuple, define_name: str) -> list:
    """Replace #n with the call's nth argument. Returns a splice list: a hole
    argument (or a hole passed for #n) erases the occurrence entirely."""
    if isinstance(arg, Param):
        if arg.index > len(call_args):
            raise ExpandError(
                f'define {define_name!r}: no argument supplied for #{arg.index}')
        value = call_args[arg.index - 1]
        return [] if value is HOLE else [value]
    if isinstance(arg, LudNode):
        new_args = []
        for a in arg.args:
            new_args.extend(_subst(a, call_args, define_name))
        return [LudNode(arg.label, tuple(new_args), arg.star, arg.pos)]
    if isinstance(arg, Array):
        items = []
        for a in arg.items:
            items.extend(_subst(a, call_args, define_name))
        return [Array(tuple(items))]
    if isinstance(arg, Named):
        inner = _subst(arg.value, call_args, define_name)
        if not inner:
            return []
        if len(inner) > 1:
            raise ExpandError(
                f'define {define_name!r}: #{0} splice of several values into '
                f'named argument {arg.name!r}')
        return [Named(arg.name, inner[0])]
    return [arg]


def _expand_arg(arg, table: dict, depth: int) -> list:
    if depth > MAX_EXPANSION_DEPTH:
        raise ExpandError('define expansion exceeded depth '
                          f'{MAX_EXPANSION_DEPTH} (recursive define?)')
    if isinstance(arg, LudNode):
        if arg.is_define_call:
            name = arg.label[1:-1]
            d = table.get(name)
            if d is None:
                raise ExpandError(f'unknown define name {name!r}', *arg.pos)
            call_args = []
            for a in arg.args:
                if a is HOLE:
                    call_args.append(HOLE)
                else:
                    expanded = _expand_arg(a, table, depth + 1)
                    if len(expanded) != 1:
                        raise ExpandError(
                            f'define call {name!r}: argument expands to '
                            f'{len(expanded)} values, expected 1', *arg.pos)
                    call_args.append(expanded[0])
            out = []
            for body_arg in d.body:
                for s in _subst(body_arg, tuple(call_args), name):
                    out.extend(_expand_arg(s, table, depth + 1))
            return out
        new_args = []
        for a in arg.args:
            new_args.extend(_expand_arg(a, table, depth + 1))
        if new_args == list(arg.args):
            return [arg]
        return [LudNode(arg.label, tuple(new_args), arg.star, arg.pos)]
    if isinstance(arg, Array):
        items = []
        for a in arg.items:
            items.extend(_expand_arg(a, table, depth + 1))
        return [Array(tuple(items))]
    if isinstance(arg, Named):
        inner = _expand_arg(arg.value, table, depth + 1)
        if not inner:
            return []
        if len(inner) > 1:
            raise ExpandError(f'named argument {arg.name!r}: define expansion '
                              'produced several values')
        return [Named(arg.name, inner[0])]
    if isinstance(arg, Param):
        raise ExpandError(f'#{arg.index} used outside any define body')
    return [arg]


def expand_defines(root: LudNode, defines: list) -> LudNode:
    table = {d.name: d for d in defines}
    out = _expand_arg(root, table, 0)
    if len(out) != 1 or not isinstance(out[0], LudNode):
        raise ExpandError('game node expanded away')
    return out[0]


# ---------------------------------------------------------------------------
# Options and rulesets.

def _normalize_selection(selection, rulesets: list) -> list:
    if selection is None:
        entries: list = []
    elif isinstance(selection, str):
        entries = [selection]
    else:
        entries = list(selection)
    out = []
    for e in entries:
        if e.startswith('Ruleset/'):
            match = [r for r in rulesets if r.name == e]
            if not match:
                known = ', '.join(r.name for r in rulesets) or 'none defined'
                raise ExpandError(f'unknown ruleset {e!r} (known: {known})')
            out.extend(match[0].selections)
        else:
            out.append(e)
    return out


def _choices(options: list, selection: list) -> dict:
    by_name = {c.category_name: c for c in options}
    chosen = {}
    for entry in selection:
        if '/' not in entry:
            raise ExpandError(f'selection {entry!r} is not Category/Item')
        cat_name, item_name = entry.split('/', 1)
        cat = by_name.get(cat_name)
        if cat is None:
            raise ExpandError(f'unknown option category {cat_name!r}')
        items = [it for it in cat.items if it.name == item_name]
        if not items:
            raise ExpandError(f'unknown item {item_name!r} in option '
                              f'category {cat_name!r}')
        if cat_name in chosen and chosen[cat_name].name != item_name:
            raise ExpandError(f'option category {cat_name!r} selected twice')
        chosen[cat_name] = items[0]
    for cat in options:
        if cat.category_name not in chosen:
            chosen[cat.category_name] = next(it for it in cat.items
                                             if it.is_default)
    return chosen


def _splice_ref(ref: OptRef, options: list, chosen: dict) -> list:
    cats = [c for c in options if c.tag == ref.tag]
    if not cats:
        raise ExpandError(f'<{ref.text}> does not match any option category')
    cat = cats[0]
    if ref.arg is None:
        if len(cat.arg_names) != 1:
            raise ExpandError(
                f'<{ref.tag}> is ambiguous: category {cat.category_name!r} '
                f'declares arguments {cat.arg_names}')
        idx = 0
    else:
        if ref.arg not in cat.arg_names:
            raise ExpandError(
                f'<{ref.text}>: no argument {ref.arg!r} in category '
                f'{cat.category_name!r} (declared: {cat.arg_names})')
        idx = cat.arg_names.index(ref.arg)
    raw = chosen[cat.category_name].values[idx]
    return parse_fragment(raw)


def _expand_refs(arg, options: list, chosen: dict, depth: int) -> list:
    if depth > MAX_EXPANSION_DEPTH:
        raise ExpandError('option expansion exceeded depth '
                          f'{MAX_EXPANSION_DEPTH} (circular option values?)')
    if isinstance(arg, OptRef):
        out = []
        for spliced in _splice_ref(arg, options, chosen):
            out.extend(_expand_refs(spliced, options, chosen, depth + 1))
        return out
    if isinstance(arg, LudNode):
        new_args = []
        for a in arg.args:
            new_args.extend(_expand_refs(a, options, chosen, depth + 1))
        if new_args == list(arg.args):
            return [arg]
        return [LudNode(arg.label, tuple(new_args), arg.star, arg.pos)]
    if isinstance(arg, Array):
        items = []
        for a in arg.items:
            items.extend(_expand_refs(a, options, chosen, depth + 1))
        return [Array(tuple(items))]
    if isinstance(arg, Named):
        inner = _expand_refs(arg.value, options, chosen, depth + 1)
        if not inner:
            return []
        if len(inner) > 1:
            raise ExpandError(f'option value for named argument {arg.name!r} '
                              'must be a single value')
        return [Named(arg.name, inner[0])]
    return [arg]


def expand_options(root: LudNode, options: list, rulesets: list,
                   selection=None) -> LudNode:
    entries = _normalize_selection(selection, rulesets)
    chosen = _choices(options, entries)
    out = _expand_refs(root, options, chosen, 0)
    if len(out) != 1 or not isinstance(out[0], LudNode):
        raise ExpandError('game node expanded away during option splice')
    return out[0]


# ---------------------------------------------------------------------------
# Full pipeline.

def expand(parsed: ParseResult, selection=None) -> LudNode:
    """defines -> options -> defines; returns the concrete game tree."""
    tree = expand_defines(parsed.root, parsed.defines)
    tree = expand_options(tree, parsed.options, parsed.rulesets, selection)
    tree = expand_defines(tree, parsed.defines)
    return tree


def load_text(text: str, selection=None) -> LudNode:
    return expand(parse_text(text), selection)


def load_file(path, selection=None) -> LudNode:
    with open(path, 'r', encoding='utf-8') as fh:
        return load_text(fh.read(), selection)
