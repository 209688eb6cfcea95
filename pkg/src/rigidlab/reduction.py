"""Word problems over monoid presentations, compiled into equational theories.

An instance is an alphabet, a list of defining relations, and one goal pair
of words.  Compilation produces a theory with a unary symbol per generator, a
unary marker symbol ``alpha``, and a binary ``m``: every relation u = v turns
into the unary-chain axiom u(x1) = v(x1), and the goal pair (u, v) turns into
the single variable-transposing axiom

    m(u(alpha(x1)), x2) = m(v(alpha(x2)), x1).

Words embed as unary chains (first letter outermost, the empty word as a bare
variable), and a word equation holds in the monoid presentation exactly when
the compiled theory proves the corresponding chain equation.  When the goal
is derivable, the term m(u(alpha(x1)), x2) is provably equal to itself with
its two variables swapped; flabby_witness builds that derivation from a word
derivation of the goal.

The module also owns the ``.wp`` file format::

    alphabet a b
    rel ab = ba
    goal ab = ba     # eps denotes the empty word
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .interp import Interpretation
from .rewrite import (
    BOUNDS,
    DEFAULT_NODE_BUDGET,
    DEFAULT_SLACK,
    Derivation,
    EXHAUSTED,
    FOUND,
    LR,
    RL,
    RewriteStep,
    apply_step,
    match_side,
    prove_bounded,
)
from .terms import (
    App,
    ParseError,
    Permutation,
    Symbol,
    Term,
    TermInContext,
    Var,
    is_variable_name,
    subterm_at,
)
from .theory import Equation, Theory
from .rigidity import FlabbyReport, verify_report

__all__ = [
    "MARKER",
    "PAIRING",
    "WordDerivation",
    "WordOutcome",
    "WordProblemInstance",
    "WordStep",
    "chain_to_word",
    "compile_reduction",
    "flabby_witness",
    "goal_axiom_index",
    "instance",
    "parse_wp",
    "render_wp",
    "reverse_word_derivation",
    "seed_interpretation",
    "seed_theory",
    "word_apply",
    "word_bfs",
    "word_equation",
    "word_from_text",
    "word_replay",
    "word_semidecide",
    "word_successors",
    "word_to_term",
    "word_to_text",
]

MARKER = "alpha"
PAIRING = "m"

Word = tuple


@dataclass(frozen=True)
class WordProblemInstance:
    """Alphabet, defining relations, and one goal pair, all over the alphabet."""

    alphabet: tuple
    relations: tuple
    goal: tuple

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "relations", tuple(tuple(map(tuple, r)) for r in self.relations))
        object.__setattr__(self, "goal", tuple(map(tuple, self.goal)))
        seen = set()
        for g in self.alphabet:
            if g in (MARKER, PAIRING):
                raise ValueError(f"generator name {g!r} is reserved")
            if is_variable_name(g):
                raise ValueError(f"generator name {g!r} is reserved for variables")
            Symbol(g, 1)  # validates the identifier shape
            if g in seen:
                raise ValueError(f"duplicate generator {g!r}")
            seen.add(g)
        if len(self.goal) != 2:
            raise ValueError("the goal is one pair of words")
        for u, v in list(self.relations) + [self.goal]:
            for w in (u, v):
                for letter in w:
                    if letter not in seen:
                        raise ValueError(f"letter {letter!r} is not in the alphabet")


def instance(
    alphabet: Sequence[str],
    relations: Sequence[tuple],
    goal: tuple,
) -> WordProblemInstance:
    """Convenience constructor accepting words as strings of one-letter names."""

    def word(w: Union[str, Sequence[str]]) -> Word:
        if isinstance(w, str):
            return tuple(w)
        return tuple(w)

    return WordProblemInstance(
        tuple(alphabet),
        tuple((word(u), word(v)) for u, v in relations),
        (word(goal[0]), word(goal[1])),
    )


@dataclass(frozen=True)
class WordStep:
    """One relation applied at a letter offset, in either direction."""

    relation_index: int
    direction: str
    offset: int

    def __post_init__(self):
        if self.direction not in (LR, RL):
            raise ValueError(f"direction must be {LR!r} or {RL!r}")
        if self.relation_index < 0 or self.offset < 0:
            raise ValueError("relation index and offset must be non-negative")


@dataclass(frozen=True)
class WordDerivation:
    start: Word
    steps: tuple
    end: Word

    def __post_init__(self):
        object.__setattr__(self, "start", tuple(self.start))
        object.__setattr__(self, "steps", tuple(self.steps))
        object.__setattr__(self, "end", tuple(self.end))

    def to_doc(self) -> dict:
        return {
            "start": list(self.start),
            "end": list(self.end),
            "steps": [
                {"relation": s.relation_index, "direction": s.direction, "offset": s.offset}
                for s in self.steps
            ],
        }


def word_apply(inst: WordProblemInstance, w: Word, step: WordStep) -> Word:
    if not 0 <= step.relation_index < len(inst.relations):
        raise ValueError(f"relation index {step.relation_index} out of range")
    u, v = inst.relations[step.relation_index]
    src, dst = (u, v) if step.direction == LR else (v, u)
    if w[step.offset : step.offset + len(src)] != src or step.offset > len(w):
        raise ValueError(f"relation {step.relation_index} does not match at offset {step.offset}")
    return w[: step.offset] + dst + w[step.offset + len(src) :]


def word_replay(inst: WordProblemInstance, d: WordDerivation) -> bool:
    try:
        cur = d.start
        for step in d.steps:
            cur = word_apply(inst, cur, step)
    except ValueError:
        return False
    return cur == d.end


def reverse_word_derivation(d: WordDerivation) -> WordDerivation:
    flipped = tuple(
        WordStep(s.relation_index, RL if s.direction == LR else LR, s.offset)
        for s in reversed(d.steps)
    )
    return WordDerivation(d.end, flipped, d.start)


def word_successors(
    inst: WordProblemInstance, w: Word, length_cap: int
) -> tuple[list[tuple[Word, WordStep]], bool]:
    """Distinct one-step rewrites within the length cap, plus a cap-hit flag."""
    seen = set()
    out = []
    cap_hit = False
    for ri, (u, v) in enumerate(inst.relations):
        for direction in (LR, RL):
            src, dst = (u, v) if direction == LR else (v, u)
            for offset in range(len(w) - len(src) + 1):
                if w[offset : offset + len(src)] != src:
                    continue
                nw = w[:offset] + dst + w[offset + len(src) :]
                if len(nw) > length_cap:
                    cap_hit = True
                    continue
                if nw in seen:
                    continue
                seen.add(nw)
                out.append((nw, WordStep(ri, direction, offset)))
    return out, cap_hit


@dataclass
class WordOutcome:
    """found / exhausted / bounds, mirroring the term-level proof outcomes."""

    status: str
    derivation: Optional[WordDerivation]
    certified: bool
    reason: Optional[str]
    expanded: int
    bounds: dict

    @property
    def found(self) -> bool:
        return self.status == FOUND

    def to_doc(self) -> dict:
        return {
            "status": self.status,
            "certified": self.certified,
            "reason": self.reason,
            "expanded": self.expanded,
            "bounds": self.bounds,
            "derivation": self.derivation.to_doc() if self.derivation else None,
        }


def word_bfs(
    inst: WordProblemInstance,
    w1: Union[str, Word],
    w2: Union[str, Word],
    *,
    depth: int,
    length_cap: Optional[int] = None,
    slack: int = DEFAULT_SLACK,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> WordOutcome:
    """Direct string-rewriting search, breadth-first from w1.

    Independent of the term-level engine; exists so the two routes can be
    cross-checked.  Certified non-derivability requires the frontier to empty
    with the length cap never binding.
    """
    w1, w2 = tuple(w1), tuple(w2)
    cap = length_cap if length_cap is not None else max(len(w1), len(w2)) + slack
    cap = max(cap, len(w1), len(w2))
    bounds_doc = {"depth": depth, "length_cap": cap, "node_budget": node_budget}
    entries: dict[Word, tuple[int, Optional[Word], Optional[WordStep]]] = {w1: (0, None, None)}
    if w1 == w2:
        return WordOutcome(FOUND, WordDerivation(w1, (), w2), False, None, 0, bounds_doc)
    frontier = [w1]
    d = 0
    cap_hit = False
    budget_hit = False
    expanded = 0
    while frontier and d < depth and not budget_hit:
        new_frontier = []
        for w in frontier:
            if expanded >= node_budget:
                budget_hit = True
                break
            expanded += 1
            succs, hit = word_successors(inst, w, cap)
            cap_hit = cap_hit or hit
            for nw, step in succs:
                if nw in entries:
                    continue
                entries[nw] = (d + 1, w, step)
                new_frontier.append(nw)
                if nw == w2:
                    steps = []
                    cur = nw
                    while True:
                        _, parent, st = entries[cur]
                        if parent is None:
                            break
                        steps.append(st)
                        cur = parent
                    deriv = WordDerivation(w1, tuple(reversed(steps)), w2)
                    return WordOutcome(FOUND, deriv, False, None, expanded, bounds_doc)
        if budget_hit:
            break
        frontier = new_frontier
        d += 1
    if budget_hit:
        return WordOutcome(BOUNDS, None, False, "nodes", expanded, bounds_doc)
    if not frontier:
        return WordOutcome(EXHAUSTED, None, not cap_hit, None, expanded, bounds_doc)
    return WordOutcome(BOUNDS, None, False, "depth", expanded, bounds_doc)


# ---- compilation ----

def seed_theory() -> Theory:
    """The fixed source theory of the reduction: three binary symbols and one
    axiom identifying l applied to a pair with r applied to the swap."""
    l = Symbol("l", 2)
    r = Symbol("r", 2)
    m = Symbol(PAIRING, 2)
    axiom = Equation(
        TermInContext(App(l, (Var(1), Var(2))), 2),
        TermInContext(App(r, (Var(2), Var(1))), 2),
    )
    return Theory((l, r, m), (axiom,))


def word_to_term(inst: WordProblemInstance, w: Union[str, Word], below: Term) -> Term:
    """The unary chain for a word, wrapped around a given subterm.

    The first letter of the word is the outermost symbol; the empty word is
    the subterm itself.
    """
    t = below
    for letter in reversed(tuple(w)):
        t = App(Symbol(letter, 1), (t,))
    return t


def chain_to_word(term: Term) -> tuple[Word, Term]:
    """Split a term into its maximal outer unary chain and the rest."""
    letters = []
    while isinstance(term, App) and term.sym.arity == 1:
        letters.append(term.sym.name)
        term = term.args[0]
    return tuple(letters), term


def compile_reduction(inst: WordProblemInstance) -> Theory:
    """The compiled theory: generators and the marker as unary symbols, the
    pairing symbol, one chain axiom per relation, and the goal axiom."""
    signature = tuple(Symbol(g, 1) for g in inst.alphabet) + (
        Symbol(MARKER, 1),
        Symbol(PAIRING, 2),
    )
    axioms = []
    for u, v in inst.relations:
        axioms.append(
            Equation(
                TermInContext(word_to_term(inst, u, Var(1)), 1),
                TermInContext(word_to_term(inst, v, Var(1)), 1),
            )
        )
    u, v = inst.goal
    marker = Symbol(MARKER, 1)
    pairing = Symbol(PAIRING, 2)
    lhs = App(pairing, (word_to_term(inst, u, App(marker, (Var(1),))), Var(2)))
    rhs = App(pairing, (word_to_term(inst, v, App(marker, (Var(2),))), Var(1)))
    axioms.append(Equation(TermInContext(lhs, 2), TermInContext(rhs, 2)))
    return Theory(signature, tuple(axioms))


def goal_axiom_index(inst: WordProblemInstance) -> int:
    return len(inst.relations)


def seed_interpretation(inst: WordProblemInstance) -> Interpretation:
    """The interpretation of the seed theory in the compiled theory.

    l and r map to the pairing of a goal-word chain (over the marked first
    argument) with the second argument; the pairing symbol maps to itself.
    It is conservative exactly when the goal is not derivable.
    """
    source = seed_theory()
    target = compile_reduction(inst)
    marker = target.symbol(MARKER)
    pairing = target.symbol(PAIRING)
    u, v = inst.goal
    mapping = {
        "l": TermInContext(
            App(pairing, (word_to_term(inst, u, App(marker, (Var(1),))), Var(2))), 2
        ),
        "r": TermInContext(
            App(pairing, (word_to_term(inst, v, App(marker, (Var(1),))), Var(2))), 2
        ),
        PAIRING: TermInContext(App(pairing, (Var(1), Var(2))), 2),
    }
    return Interpretation.of(source, target, mapping, linear_regular=True)


# ---- the word problem through the compiled theory ----

def word_equation(inst: WordProblemInstance, w1: Union[str, Word], w2: Union[str, Word]) -> Equation:
    """The chain equation w1(x1) = w2(x1) in context 1."""
    return Equation(
        TermInContext(word_to_term(inst, w1, Var(1)), 1),
        TermInContext(word_to_term(inst, w2, Var(1)), 1),
    )


def word_semidecide(
    inst: WordProblemInstance,
    w1: Union[str, Word],
    w2: Union[str, Word],
    *,
    depth: int,
    length_cap: Optional[int] = None,
    slack: int = DEFAULT_SLACK,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> WordOutcome:
    """Decide a bounded word equation through the compiled theory.

    Words are encoded as unary chains and handed to the term-level search;
    the resulting derivation is decoded back into word steps (the chain
    depth of each rewrite position is the letter offset).
    """
    w1, w2 = tuple(w1), tuple(w2)
    cap = length_cap if length_cap is not None else max(len(w1), len(w2)) + slack
    cap = max(cap, len(w1), len(w2))
    th = compile_reduction(inst)
    outcome = prove_bounded(
        th,
        word_equation(inst, w1, w2),
        depth,
        size_cap=cap + 1,
        node_budget=node_budget,
    )
    bounds_doc = {"depth": depth, "length_cap": cap, "node_budget": node_budget}
    deriv = None
    if outcome.derivation is not None:
        steps = []
        for s in outcome.derivation.steps:
            if s.axiom_index >= len(inst.relations):
                raise RuntimeError("internal error: chain derivation used the goal axiom")
            steps.append(WordStep(s.axiom_index, s.direction, len(s.position)))
        deriv = WordDerivation(w1, tuple(steps), w2)
        if not word_replay(inst, deriv):
            raise RuntimeError("internal error: decoded word derivation failed replay")
    return WordOutcome(
        outcome.status, deriv, outcome.certified, outcome.reason, outcome.stats.expanded, bounds_doc
    )


# ---- the flabby witness of a derivable goal ----

def flabby_witness(inst: WordProblemInstance, word_derivation: WordDerivation) -> FlabbyReport:
    """Build the two-variable flabby term witness from a goal derivation.

    The term is the image of l: the pairing of the marked u-chain with x2.
    One goal-axiom step swaps the variables and rewrites the chain to v;
    the reversed word derivation then rewrites v back to u, lifted into the
    chain above the marker.  Total length: 1 + len(word_derivation.steps).
    """
    u, v = inst.goal
    if word_derivation.start != u or word_derivation.end != v:
        raise ValueError("word derivation does not prove the goal pair")
    if not word_replay(inst, word_derivation):
        raise ValueError("word derivation does not replay")
    th = compile_reduction(inst)
    i = seed_interpretation(inst)
    term = i.image_of("l")
    sigma = Permutation.transposition(2, 1, 2)

    cur = term
    steps = []

    def push(axiom_index: int, direction: str, position: tuple) -> None:
        nonlocal cur
        eq = th.axioms[axiom_index]
        src = eq.lhs if direction == LR else eq.rhs
        subst = match_side(src, subterm_at(cur.term, position), cur.context_len)
        if subst is None:
            raise RuntimeError("internal error: witness step does not match")
        step = RewriteStep(axiom_index, direction, position, subst)
        cur = apply_step(cur, th, step)
        steps.append(step)

    push(goal_axiom_index(inst), LR, ())
    for ws in reverse_word_derivation(word_derivation).steps:
        push(ws.relation_index, ws.direction, (0,) * (ws.offset + 1))

    derivation = Derivation(term, tuple(steps), cur)
    report = FlabbyReport(term, sigma, derivation)
    if not verify_report(report, th):
        raise RuntimeError("internal error: flabby witness failed verification")
    return report


# ---- .wp files ----

def word_from_text(text: str, alphabet: Sequence[str]) -> Word:
    """A word written as a string of one-letter generator names; eps is empty."""
    if text == "eps":
        return ()
    letters = tuple(text)
    for letter in letters:
        if letter not in alphabet:
            raise ValueError(f"letter {letter!r} is not in the alphabet")
    return letters


def word_to_text(w: Word) -> str:
    return "".join(w) if w else "eps"


def parse_wp(text: str) -> WordProblemInstance:
    alphabet: Optional[tuple] = None
    relations: list[tuple] = []
    goal: Optional[tuple] = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "alphabet":
            if alphabet is not None:
                raise ParseError("duplicate alphabet line", line_no, 1)
            names = tuple(rest.split())
            for g in names:
                if len(g) != 1:
                    raise ParseError(
                        f"generator {g!r}: word syntax needs one-letter names", line_no, 1
                    )
            alphabet = names
        elif head in ("rel", "goal"):
            if alphabet is None:
                raise ParseError("alphabet must come before relations and goal", line_no, 1)
            if rest.count("=") != 1:
                raise ParseError(f"expected: {head} <word> = <word>", line_no, 1)
            a, b = (part.strip() for part in rest.split("="))
            try:
                pair = (word_from_text(a, alphabet), word_from_text(b, alphabet))
            except ValueError as e:
                raise ParseError(str(e), line_no, 1) from None
            if head == "rel":
                relations.append(pair)
            else:
                if goal is not None:
                    raise ParseError("duplicate goal line", line_no, 1)
                goal = pair
        else:
            raise ParseError(f"unknown directive {head!r}", line_no, 1)
    if alphabet is None:
        raise ParseError("missing alphabet line")
    if goal is None:
        raise ParseError("missing goal line")
    try:
        return WordProblemInstance(alphabet, tuple(relations), goal)
    except ValueError as e:
        raise ParseError(str(e)) from None


def render_wp(inst: WordProblemInstance) -> str:
    lines = ["alphabet " + " ".join(inst.alphabet)]
    for u, v in inst.relations:
        lines.append(f"rel {word_to_text(u)} = {word_to_text(v)}")
    u, v = inst.goal
    lines.append(f"goal {word_to_text(u)} = {word_to_text(v)}")
    return "\n".join(lines) + "\n"
