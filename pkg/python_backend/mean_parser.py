#!/usr/bin/env python3
"""
Mean-Type Mapping Toolkit - Mean Expression Parser

Grammar:
    expr := IDENT | IDENT "(" number { "," number } ")"
    IDENT in {arithmetic, geometric, harmonic, power, min, max,
              proj1, proj2, weighted_arithmetic}

Whitespace is insignificant. A table mean is written ``table:<path>`` and is
recognised before the grammar runs.
"""

from dataclasses import dataclass
from typing import Optional, Tuple
import logging

import pyparsing as pp

from errors import MeanParseError, ParameterError, TableDataError
from mean_core import KIND_ARITY, MeanKind, MeanSpec, load_table_mean, make_mean

logger = logging.getLogger(__name__)

TABLE_PREFIX = "table:"
MEAN_NAMES = [kind.value for kind in KIND_ARITY]


@dataclass(frozen=True)
class Diagnostic:
    """A parse problem; offset counts UTF-8 bytes from the start of the source"""
    offset: int
    expected: str
    kind: str = "syntax"

    def __str__(self) -> str:
        return f"{self.kind} error at offset {self.offset}: expected {self.expected}"


@dataclass(frozen=True)
class MeanExpr:
    source: str
    spec: Optional[MeanSpec]
    diagnostics: Tuple[Diagnostic, ...] = ()

    @property
    def ok(self) -> bool:
        return self.spec is not None


@dataclass(frozen=True)
class _Located:
    offset: int
    value: object


def _located(s: str, loc: int, toks: pp.ParseResults) -> _Located:
    return _Located(loc, toks[0])


def _build_grammar() -> pp.ParserElement:
    ident = pp.one_of(MEAN_NAMES, as_keyword=True).set_name("mean name")
    number = pp.Regex(r"[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?").set_name("number")
    number.set_parse_action(lambda s, loc, toks: _Located(loc, float(toks[0])))
    lpar = pp.Suppress("(").set_name("'('")
    rpar = pp.Literal(")").set_name("')'")
    comma = pp.Suppress(",").set_name("','")
    rpar.set_parse_action(lambda s, loc, toks: _Located(loc, ")"))
    args = lpar - number + pp.ZeroOrMore(comma - number) - rpar
    grammar = ident.set_parse_action(_located) + pp.Optional(args)
    # Keep tabs as written so locations index the original text
    grammar.parse_with_tabs()
    return grammar


GRAMMAR = _build_grammar()


def _byte_offset(text: str, loc: int) -> int:
    return len(text[:loc].encode("utf-8", errors="surrogatepass"))


def parse_mean(text: str) -> MeanExpr:
    """Parse mean-expression text; never raises, problems come back as diagnostics"""
    stripped = text.strip()
    if stripped.startswith(TABLE_PREFIX):
        path = stripped[len(TABLE_PREFIX):]
        offset = _byte_offset(text, text.index(TABLE_PREFIX) + len(TABLE_PREFIX))
        if not path:
            return MeanExpr(text, None, (Diagnostic(offset, "table file path"),))
        try:
            return MeanExpr(text, load_table_mean(path))
        except TableDataError as e:
            return MeanExpr(text, None, (Diagnostic(offset, f"readable x,y,value table ({e})", "semantic"),))

    try:
        tokens = GRAMMAR.parse_string(text, parse_all=True)
    except pp.ParseBaseException as e:
        expected = e.msg[len("Expected "):] if e.msg.startswith("Expected ") else e.msg
        return MeanExpr(text, None, (Diagnostic(_byte_offset(text, e.loc), expected),))

    name, rest = tokens[0], list(tokens[1:])
    kind = MeanKind(name.value)
    params = [t for t in rest if t.value != ")"]
    closing = rest[-1].offset if rest else len(text.rstrip())
    arity = KIND_ARITY[kind]
    if len(params) != arity:
        if arity == 0:
            expected = f"no parameters for {kind.value}"
            offset = params[0].offset
        else:
            expected = f"{arity} parameter(s) for {kind.value}"
            offset = params[arity].offset if len(params) > arity else closing
        return MeanExpr(text, None, (Diagnostic(_byte_offset(text, offset), expected, "semantic"),))

    try:
        spec = make_mean(kind, [p.value for p in params])
    except ParameterError as e:
        offset = params[0].offset if params else name.offset
        return MeanExpr(text, None, (Diagnostic(_byte_offset(text, offset), str(e), "semantic"),))
    return MeanExpr(text, spec)


def parse_mean_or_raise(text: str) -> MeanSpec:
    expr = parse_mean(text)
    if not expr.ok:
        raise MeanParseError(text, list(expr.diagnostics))
    return expr.spec

