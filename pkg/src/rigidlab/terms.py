"""Terms over a ranked signature, in positional variable contexts.

A context is just a length n; the variables are the indices 1..n, written
``x1``..``xn`` in concrete syntax.  There are no named variables.  Terms are
immutable trees compared structurally, so they can serve directly as keys in
the visited sets of the search modules.

Concrete syntax: ``x1``, ``f(t1,...,tk)``, nullary symbols written ``c()``.
Whitespace is insignificant inside a term.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterator, Mapping, Optional, Sequence, Union

__all__ = [
    "App",
    "ParseError",
    "Permutation",
    "Symbol",
    "Term",
    "TermInContext",
    "Var",
    "VarMap",
    "compose_varmaps",
    "count_symbol",
    "is_linear_regular",
    "parse_term",
    "positions",
    "render_term",
    "replace_at",
    "subterm_at",
    "substitute_simple",
    "substitute_terms",
    "term_key",
    "term_size",
    "var_context",
    "var_occurrences",
]

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_VARNAME_RE = re.compile(r"x[1-9][0-9]*")


class ParseError(ValueError):
    """Malformed concrete syntax.  Carries a 1-based line and column."""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


def is_variable_name(name: str) -> bool:
    """True for identifiers reserved for variables (x1, x2, ...)."""
    return _VARNAME_RE.fullmatch(name) is not None


@dataclass(frozen=True)
class Symbol:
    """A signature entry: a name with a fixed arity."""

    name: str
    arity: int

    def __post_init__(self):
        if not _IDENT_RE.fullmatch(self.name):
            raise ValueError(f"bad symbol name {self.name!r}")
        if is_variable_name(self.name):
            raise ValueError(f"symbol name {self.name!r} is reserved for variables")
        if self.arity < 0:
            raise ValueError("arity must be non-negative")


@dataclass(frozen=True)
class Var:
    """A context variable, indexed from 1."""

    index: int

    def __post_init__(self):
        if self.index < 1:
            raise ValueError("variable indices start at 1")


@dataclass(frozen=True)
class App:
    """An application of a symbol to exactly arity-many argument terms."""

    sym: Symbol
    args: tuple

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        if len(self.args) != self.sym.arity:
            raise ValueError(
                f"{self.sym.name} has arity {self.sym.arity}, got {len(self.args)} arguments"
            )


Term = Union[Var, App]


def _max_var(term: Term) -> int:
    if isinstance(term, Var):
        return term.index
    best = 0
    for a in term.args:
        m = _max_var(a)
        if m > best:
            best = m
    return best


@dataclass(frozen=True)
class TermInContext:
    """A term together with the length of its variable context.

    Every variable index occurring in the term must lie in 1..context_len;
    the context may declare variables the term does not use.
    """

    term: Term
    context_len: int

    def __post_init__(self):
        if self.context_len < 0:
            raise ValueError("context length must be non-negative")
        if _max_var(self.term) > self.context_len:
            raise ValueError(
                f"term uses variables beyond its context of length {self.context_len}"
            )


def term_size(term: Term) -> int:
    """Number of nodes, variables included."""
    if isinstance(term, Var):
        return 1
    return 1 + sum(term_size(a) for a in term.args)


def count_symbol(term: Term, sym: Symbol) -> int:
    """Number of occurrences of sym in the term."""
    if isinstance(term, Var):
        return 0
    here = 1 if term.sym == sym else 0
    return here + sum(count_symbol(a, sym) for a in term.args)


def positions(term: Term) -> Iterator[tuple[tuple[int, ...], Term]]:
    """Yield (position, subterm) pairs in pre-order.

    A position is a path of 0-based child indices; () is the root.
    """
    yield (), term
    if isinstance(term, App):
        for i, child in enumerate(term.args):
            for pos, sub in positions(child):
                yield (i,) + pos, sub


def subterm_at(term: Term, pos: Sequence[int]) -> Term:
    """The subterm at a position; raises ValueError on an invalid path."""
    cur = term
    for i in pos:
        if not isinstance(cur, App) or not 0 <= i < len(cur.args):
            raise ValueError(f"invalid position {tuple(pos)}")
        cur = cur.args[i]
    return cur


def replace_at(term: Term, pos: Sequence[int], replacement: Term) -> Term:
    """The term with the subterm at pos swapped for replacement."""
    if not pos:
        return replacement
    i, rest = pos[0], pos[1:]
    if not isinstance(term, App) or not 0 <= i < len(term.args):
        raise ValueError(f"invalid position {tuple(pos)}")
    args = list(term.args)
    args[i] = replace_at(args[i], rest, replacement)
    return App(term.sym, tuple(args))


def _var_sequence(term: Term, out: list) -> None:
    if isinstance(term, Var):
        out.append(term.index)
        return
    for a in term.args:
        _var_sequence(a, out)


def var_occurrences(t: TermInContext) -> tuple[int, ...]:
    """Variable indices in left-to-right (in-order) traversal, with repeats."""
    out: list[int] = []
    _var_sequence(t.term, out)
    return tuple(out)


def is_linear_regular(t: TermInContext) -> bool:
    """True when every context variable occurs exactly once in the term."""
    occ = var_occurrences(t)
    return len(occ) == t.context_len and len(set(occ)) == t.context_len


@dataclass(frozen=True)
class VarMap:
    """A map of variable indices from a domain context into a codomain context.

    images[i-1] is the image of variable i; each image lies in 1..codomain_len.
    """

    images: tuple
    codomain_len: int

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(self.images))
        for v in self.images:
            if not 1 <= v <= self.codomain_len:
                raise ValueError(f"image {v} outside codomain of length {self.codomain_len}")

    @property
    def domain_len(self) -> int:
        return len(self.images)

    def apply(self, index: int) -> int:
        if not 1 <= index <= self.domain_len:
            raise ValueError(f"variable {index} outside domain of length {self.domain_len}")
        return self.images[index - 1]

    @staticmethod
    def identity(n: int) -> "VarMap":
        return VarMap(tuple(range(1, n + 1)), n)


def compose_varmaps(outer: VarMap, inner: VarMap) -> VarMap:
    """The map sending i to outer(inner(i))."""
    if inner.codomain_len != outer.domain_len:
        raise ValueError("varmap domains do not line up")
    return VarMap(tuple(outer.apply(v) for v in inner.images), outer.codomain_len)


@dataclass(frozen=True)
class Permutation:
    """A bijection on 1..n, stored as its image tuple."""

    images: tuple

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(self.images))
        n = len(self.images)
        if sorted(self.images) != list(range(1, n + 1)):
            raise ValueError(f"{self.images} is not a permutation of 1..{n}")

    @property
    def size(self) -> int:
        return len(self.images)

    def apply(self, index: int) -> int:
        return self.images[index - 1]

    def is_identity(self) -> bool:
        return all(v == i + 1 for i, v in enumerate(self.images))

    def inverse(self) -> "Permutation":
        inv = [0] * self.size
        for i, v in enumerate(self.images):
            inv[v - 1] = i + 1
        return Permutation(tuple(inv))

    def as_varmap(self) -> VarMap:
        return VarMap(self.images, self.size)

    @staticmethod
    def identity(n: int) -> "Permutation":
        return Permutation(tuple(range(1, n + 1)))

    @staticmethod
    def transposition(n: int, i: int, j: int) -> "Permutation":
        images = list(range(1, n + 1))
        images[i - 1], images[j - 1] = j, i
        return Permutation(tuple(images))

    @staticmethod
    def all_of(n: int) -> Iterator["Permutation"]:
        """All permutations of 1..n in lexicographic order of image tuples."""
        for images in itertools.permutations(range(1, n + 1)):
            yield Permutation(images)

    @staticmethod
    def non_identity(n: int) -> Iterator["Permutation"]:
        for p in Permutation.all_of(n):
            if not p.is_identity():
                yield p


def _rename(term: Term, phi: VarMap) -> Term:
    if isinstance(term, Var):
        return Var(phi.apply(term.index))
    return App(term.sym, tuple(_rename(a, phi) for a in term.args))


def substitute_simple(t: TermInContext, phi: Union[VarMap, Permutation]) -> TermInContext:
    """Rename variables along a variable map (or permutation).

    The result lives in phi's codomain context.  The tree shape is unchanged.
    """
    if isinstance(phi, Permutation):
        phi = phi.as_varmap()
    if phi.domain_len != t.context_len:
        raise ValueError(
            f"map domain {phi.domain_len} does not match context {t.context_len}"
        )
    return TermInContext(_rename(t.term, phi), phi.codomain_len)


def _graft(term: Term, args: Sequence[Term]) -> Term:
    if isinstance(term, Var):
        return args[term.index - 1]
    return App(term.sym, tuple(_graft(a, args) for a in term.args))


def substitute_terms(
    t: TermInContext,
    args: Sequence[TermInContext],
    context_len: Optional[int] = None,
) -> TermInContext:
    """Simultaneous substitution of terms for all context variables.

    args[i-1] replaces variable i; all replacement terms must share one
    codomain context.  For a closed t (context 0) the codomain length cannot
    be inferred from args, so pass context_len explicitly.
    """
    if len(args) != t.context_len:
        raise ValueError(f"expected {t.context_len} replacement terms, got {len(args)}")
    if args:
        k = args[0].context_len
        for a in args[1:]:
            if a.context_len != k:
                raise ValueError("replacement terms live in different contexts")
        if context_len is not None and context_len != k:
            raise ValueError("context_len disagrees with the replacement terms")
    else:
        k = context_len if context_len is not None else 0
    return TermInContext(_graft(t.term, [a.term for a in args]), k)


def var_context(n: int) -> list[TermInContext]:
    """The identity substitution [x1, ..., xn] in context n."""
    return [TermInContext(Var(i), n) for i in range(1, n + 1)]


def term_key(term: Term, order: Mapping[str, int]) -> tuple:
    """Pre-order tag sequence for the canonical term order.

    Variables sort before applications; applications sort by the given
    symbol order (normally signature declaration order).  Comparing keys of
    equal-size terms yields the canonical lexicographic order.
    """
    out: list[tuple[int, int]] = []

    def go(t: Term) -> None:
        if isinstance(t, Var):
            out.append((0, t.index))
        else:
            out.append((1, order[t.sym.name]))
            for a in t.args:
                go(a)

    go(term)
    return tuple(out)


# ---- concrete syntax ----

_TOKEN_RE = re.compile(r"\s*(?:([A-Za-z_][A-Za-z0-9_]*)|([(),])|(\S))")


def _tokenize(text: str, line: int) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            break
        col = m.start(m.lastindex) + 1
        if m.group(1) is not None:
            tokens.append(("ident", m.group(1), col))
        elif m.group(2) is not None:
            tokens.append(("punct", m.group(2), col))
        else:
            raise ParseError(f"unexpected character {m.group(3)!r}", line, col)
        pos = m.end()
    tokens.append(("end", "", len(text) + 1))
    return tokens


class _TermParser:
    def __init__(self, text: str, symbols: Mapping[str, Symbol], line: int):
        self.tokens = _tokenize(text, line)
        self.symbols = symbols
        self.line = line
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def next(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, message: str, col: int):
        raise ParseError(message, self.line, col)

    def term(self) -> Term:
        kind, value, col = self.next()
        if kind != "ident":
            self.fail(f"expected a term, got {value!r}" if value else "expected a term", col)
        if is_variable_name(value):
            k, v, c = self.peek()
            if k == "punct" and v == "(":
                self.fail("variables take no arguments", c)
            return Var(int(value[1:]))
        sym = self.symbols.get(value)
        if sym is None:
            self.fail(f"unknown symbol {value!r}", col)
        k, v, c = self.next()
        if not (k == "punct" and v == "("):
            self.fail(f"expected '(' after symbol {value!r} (nullary symbols are written {value}())", c)
        args: list[Term] = []
        k, v, c = self.peek()
        if k == "punct" and v == ")":
            self.next()
        else:
            while True:
                args.append(self.term())
                k, v, c = self.next()
                if k == "punct" and v == ")":
                    break
                if not (k == "punct" and v == ","):
                    self.fail("expected ',' or ')' in argument list", c)
        if len(args) != sym.arity:
            self.fail(f"{value} has arity {sym.arity}, got {len(args)} arguments", col)
        return App(sym, tuple(args))


def parse_term(text: str, symbols: Mapping[str, Symbol], *, line: int = 1) -> Term:
    """Parse one term from text; the whole string must be consumed."""
    p = _TermParser(text, symbols, line)
    t = p.term()
    kind, value, col = p.peek()
    if kind != "end":
        p.fail(f"unexpected trailing input {value!r}", col)
    return t


def render_term(term: Term) -> str:
    """Concrete syntax for a term; inverse to parse_term."""
    if isinstance(term, Var):
        return f"x{term.index}"
    return f"{term.sym.name}({','.join(render_term(a) for a in term.args)})"
