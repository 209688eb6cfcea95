"""Acceptance suite: one test and one printed PASS/FAIL line per criterion.

Run with -s to see the lines as they go; each line restates the checked
bound so a log excerpt is self-contained.
"""

import itertools
import random
import time

import pytest

from oracles import random_term, random_walk, sorted_word_oracle
from rigidlab.interp import check_preserves_axioms, extend, probe_conservativity
from rigidlab.normalizer import WordOracle, check_hat_congruence, hat
from rigidlab.reduction import (
    compile_reduction,
    flabby_witness,
    instance,
    seed_interpretation,
    seed_theory,
    word_bfs,
    word_semidecide,
)
from rigidlab.rewrite import EXHAUSTED, FOUND, replay, symbol_census
from rigidlab.rigidity import enumerate_linear_regular, search_flabby, verify_report
from rigidlab.terms import (
    App,
    Permutation,
    TermInContext,
    Var,
    render_term,
    substitute_simple,
    substitute_terms,
    term_size,
    var_occurrences,
)

YES_AB = instance(["a", "b"], [("ab", "ba")], ("ab", "ba"))
YES_IDEM = instance(["a"], [("a", "aa")], ("a", "aa"))
NO_AB = instance(["a", "b"], [("ab", "ba")], ("a", "b"))
FREE = instance(["a", "b"], [], ("a", "b"))

SEED = seed_theory()


def report(criterion, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} {criterion}: {detail}"
    print(line)
    assert ok, line


def test_criterion_1_seed_theory_fragment_rigid():
    t0 = time.time()
    out = search_flabby(SEED, max_size=9, max_context=4, depth=8, slack=8)
    elapsed = time.time() - t0
    ok = (
        out.status == "exhausted"
        and out.report is None
        and not out.caps_hit
        and not out.budget_hit
        and elapsed < 60.0
    )
    report(
        "1",
        ok,
        f"seed theory rigid to size 9 / context 4 / depth 8: status={out.status}, "
        f"terms={out.terms_enumerated}, caps_hit={out.caps_hit}, {elapsed:.1f}s",
    )


def test_criterion_2_yes_instances_admit_flabby_witness():
    details = []
    ok = True
    for inst in (YES_AB, YES_IDEM):
        th = compile_reduction(inst)
        out = search_flabby(th, max_size=8, max_context=3, depth=6)
        wd = word_bfs(inst, *inst.goal, depth=6).derivation
        expected = flabby = None
        good = out.status == "found"
        if good:
            flabby = out.report
            expected = flabby_witness(inst, wd)
            good = (
                verify_report(flabby, th)
                and len(flabby.derivation.steps) <= 4
                and flabby.term == expected.term
            )
        ok = ok and good
        details.append(
            f"goal {inst.goal}: status={out.status}"
            + (
                f", steps={len(flabby.derivation.steps)}, term={render_term(flabby.term.term)}"
                if flabby
                else ""
            )
        )
    report("2", ok, "; ".join(details))


def test_criterion_3a_probe_confirms_on_yes_instance():
    i = seed_interpretation(YES_AB)
    rep = probe_conservativity(i, term_size_bound=3, depth=6)
    found = {
        (render_term(f.lhs.term), render_term(f.rhs.term)) for f in rep.confirmed
    }
    ok = ("l(x1,x2)", "r(x1,x2)") in found
    report(
        "3a",
        ok,
        f"yes-instance probe (size<=3, depth 6) confirmed {sorted(found)}; "
        f"pairs_checked={rep.pairs_checked}",
    )


def test_criterion_3b_probe_clean_on_no_instance():
    i = seed_interpretation(FREE)
    rep = probe_conservativity(i, term_size_bound=7, depth=6)
    ok = rep.confirmed == [] and rep.candidates == []
    report(
        "3b",
        ok,
        f"no-instance probe (size<=7, depth 6): confirmed={len(rep.confirmed)}, "
        f"candidates={len(rep.candidates)}, pairs_checked={rep.pairs_checked}",
    )


def test_criterion_4_word_routes_agree():
    letters = ("a", "b")
    words = [
        tuple(w)
        for n in range(5)
        for w in itertools.product(letters, repeat=n)
    ]
    pairs = agree = 0
    mismatch = None
    for w1 in words:
        for w2 in words:
            pairs += 1
            direct = word_bfs(YES_AB, w1, w2, depth=10)
            via_terms = word_semidecide(YES_AB, w1, w2, depth=10)
            oracle_yes = sorted_word_oracle(w1, w2)
            good = direct.status == via_terms.status
            if direct.status == FOUND:
                good = good and oracle_yes and len(direct.derivation.steps) == len(
                    via_terms.derivation.steps
                )
            else:
                good = (
                    good
                    and not oracle_yes
                    and direct.status == EXHAUSTED
                    and direct.certified
                    and via_terms.certified
                )
            if good:
                agree += 1
            elif mismatch is None:
                mismatch = (w1, w2, direct.status, via_terms.status, oracle_yes)
    ok = agree == pairs
    report(
        "4",
        ok,
        f"string vs term vs multiset-oracle agreement on {agree}/{pairs} word pairs "
        f"of length <= 4" + (f"; first mismatch {mismatch}" if mismatch else ""),
    )


def test_criterion_5_census_invariants():
    rng = random.Random(20260819)
    constant = total = 0
    first_bad = None
    for inst in (YES_AB, YES_IDEM, NO_AB):
        th = compile_reduction(inst)
        for _ in range(334):
            start = TermInContext(random_term(rng, th, 14, 3), 3)
            d = random_walk(rng, th, start, 6, term_size(start.term) + 10)
            assert replay(d, th)
            total += 1
            counts_m = symbol_census(d, th, "m")
            counts_alpha = symbol_census(d, th, "alpha")
            if len(set(counts_m)) <= 1 and len(set(counts_alpha)) <= 1:
                constant += 1
            elif first_bad is None:
                first_bad = (render_term(start.term), counts_m, counts_alpha)
    ok = total >= 1000 and constant == total
    report(
        "5",
        ok,
        f"pairing and marker counts constant along {constant}/{total} fuzzed "
        f"derivations (<=6 steps, terms <=14 nodes)"
        + (f"; first failure {first_bad}" if first_bad else ""),
    )


@pytest.fixture(scope="module")
def certifying_oracle():
    # Multiset classes over {a,b} with words this short are tiny; depth 40
    # exhausts every one, so every oracle call is certified.
    return WordOracle(YES_AB, depth=40)


def test_criterion_6a_hat_fixes_interpreted_seed_terms(certifying_oracle):
    i = seed_interpretation(YES_AB)
    fixed = total = 0
    first_bad = None
    for s in enumerate_linear_regular(SEED, 7, 4):
        for rho in Permutation.all_of(s.context_len):
            renamed = substitute_simple(s, rho)
            image = extend(i, renamed)
            out = hat(YES_AB, image, certifying_oracle)
            total += 1
            if out.term == image and out.clean:
                fixed += 1
            elif first_bad is None:
                first_bad = (
                    render_term(renamed.term),
                    render_term(image.term),
                    render_term(out.term.term),
                )
    ok = fixed == total
    report(
        "6a",
        ok,
        f"hat fixes the interpreted image of {fixed}/{total} seed terms of size <= 7"
        + (
            f"; first failure: s={first_bad[0]}, image={first_bad[1]}, hat={first_bad[2]}"
            if first_bad
            else ""
        ),
    )


def _all_shapes(th, max_size):
    """Structure-only enumeration; leaves are slots for fresh variables."""
    leaf = ("leaf",)
    unary = [s for s in th.signature if s.arity == 1]
    binary = [s for s in th.signature if s.arity == 2]
    by = {1: [leaf]}
    for n in range(2, max_size + 1):
        batch = []
        for s in unary:
            batch.extend((s, t) for t in by[n - 1])
        for s in binary:
            for i in range(1, n - 1):
                batch.extend(
                    (s, a, b) for a in by[i] for b in by[n - 1 - i]
                )
        by[n] = batch
    return [shape for n in range(1, max_size + 1) for shape in by[n]]


def _instantiate(shape, counter):
    if shape[0] == "leaf":
        counter[0] += 1
        return Var(counter[0])
    if len(shape) == 2:
        return App(shape[0], (_instantiate(shape[1], counter),))
    return App(
        shape[0], (_instantiate(shape[1], counter), _instantiate(shape[2], counter))
    )


@pytest.fixture(scope="module")
def hat_sweep(certifying_oracle):
    """hat over every distinct-variable term shape of size <= 10.

    hat never reads variable indices, so distinct left-to-right labels decide
    the behaviour of every relabeling; the sweep is exhaustive for sizes
    <= 10 in that sense.  A sampled relabeling check backs the assumption.
    """
    th = compile_reduction(YES_AB)
    results = []
    for shape in _all_shapes(th, 10):
        counter = [0]
        term = _instantiate(shape, counter)
        t = TermInContext(term, max(counter[0], 1))
        results.append((t, hat(YES_AB, t, certifying_oracle)))
    return results


def test_criterion_6b_var_occurrences_preserved(hat_sweep, certifying_oracle):
    good = 0
    first_bad = None
    for t, out in hat_sweep:
        if var_occurrences(out.term) == var_occurrences(t) and out.clean:
            good += 1
        elif first_bad is None:
            first_bad = (render_term(t.term), render_term(out.term.term))

    # Sampled relabelings, including repeated labels, exercise the
    # index-blindness the exhaustive sweep relies on.
    rng = random.Random(99)
    sampled = 0
    for t, out in rng.sample(hat_sweep, 2000):
        n = t.context_len
        images = tuple(rng.randint(1, n) for _ in range(n))
        squash = lambda term: substitute_terms(
            term, tuple(TermInContext(Var(j), n) for j in images)
        )
        relabeled = squash(t)
        out2 = hat(YES_AB, relabeled, certifying_oracle)
        if out2.term == squash(out.term) and var_occurrences(
            out2.term
        ) == var_occurrences(relabeled):
            sampled += 1
    ok = good == len(hat_sweep) and sampled == 2000
    report(
        "6b",
        ok,
        f"variable occurrences preserved on {good}/{len(hat_sweep)} term shapes "
        f"of size <= 10 (exhaustive) and {sampled}/2000 sampled relabelings"
        + (f"; first failure {first_bad}" if first_bad else ""),
    )


def test_criterion_6c_hat_idempotent(hat_sweep, certifying_oracle):
    good = 0
    first_bad = None
    for t, out in hat_sweep:
        again = hat(YES_AB, out.term, certifying_oracle)
        if again.term == out.term and again.clean:
            good += 1
        elif first_bad is None:
            first_bad = (render_term(out.term.term), render_term(again.term.term))
    ok = good == len(hat_sweep)
    report(
        "6c",
        ok,
        f"hat idempotent on {good}/{len(hat_sweep)} normalized terms of size <= 10"
        + (f"; first failure {first_bad}" if first_bad else ""),
    )


def test_criterion_6d_hat_congruence(certifying_oracle):
    th = compile_reduction(YES_AB)
    rng = random.Random(31337)
    found = total = 0
    first_bad = None
    for _ in range(500):
        start = TermInContext(random_term(rng, th, 12, 3), 3)
        d = random_walk(rng, th, start, 5, term_size(start.term) + 10)
        out = check_hat_congruence(YES_AB, d, oracle=certifying_oracle)
        total += 1
        if out.status == "found":
            found += 1
        elif first_bad is None:
            first_bad = (render_term(d.start.term), len(d.steps), out.status)
    ok = total >= 500 and found == total
    report(
        "6d",
        ok,
        f"normalized endpoints provably equal within depth 2*steps+4 for "
        f"{found}/{total} fuzzed derivations (<=5 steps)"
        + (f"; first failure {first_bad}" if first_bad else ""),
    )


def test_criterion_7_interpretation_laws():
    instances = (YES_AB, YES_IDEM, NO_AB, FREE)
    preserved = []
    for inst in instances:
        results = check_preserves_axioms(seed_interpretation(inst), depth=1)
        preserved.append(all(out.status == FOUND for _, out in results))

    i = seed_interpretation(YES_AB)
    rng = random.Random(4242)
    compose_ok = commute_ok = 0
    trials = 1000
    for _ in range(trials):
        t = TermInContext(random_term(rng, SEED, 9, 3), 3)
        args = tuple(
            TermInContext(random_term(rng, SEED, 5, 2), 2) for _ in range(3)
        )
        lhs = extend(i, substitute_terms(t, args))
        rhs = substitute_terms(extend(i, t), tuple(extend(i, a) for a in args))
        if lhs == rhs:
            compose_ok += 1

        perm = Permutation(tuple(rng.sample(range(1, 4), 3)))
        if extend(i, substitute_simple(t, perm)) == substitute_simple(
            extend(i, t), perm
        ):
            commute_ok += 1

    ok = all(preserved) and compose_ok == trials and commute_ok == trials
    report(
        "7",
        ok,
        f"axiom image provable at depth 1 for {sum(preserved)}/{len(instances)} "
        f"instances; extend-composition {compose_ok}/{trials}; "
        f"extend-commutes-with-permutation {commute_ok}/{trials}",
    )
