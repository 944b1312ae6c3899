"""Acceptance suite: one summary line per criterion, all checks exact.

Each test records a PASS or FAIL line through the ``acceptance_line`` fixture;
the lines are printed together at the end of the pytest run.
"""
import random

import pytest
import sympy as sp

from cactus_hecke.cactus import check_characterization, check_conjecture, enumerate_relations, pi_W
from cactus_hecke.hecke import HeckeElt
from cactus_hecke.jring import JElt, theorem_element
from cactus_hecke.ring import ONE, V, RatFunc, rf_member_localized
from helpers import brute, cactus, to_brute

TEST_GROUPS = ["A1", "A2", "A3", "A4", "B2", "B3", "D4", "H3"] + [f"I2({m})" for m in range(3, 9)]
SUITE_GROUPS = ["A3", "B3", "H3"] + [f"I2({m})" for m in range(3, 9)]

v = RatFunc.of(V)
TWO_V = 2 * v / (1 + v * v)


def line(n: int, title: str, ok: bool, detail: str) -> str:
    return f"criterion {n} ({title}): {'PASS' if ok else 'FAIL'}; {detail}"


def as_t_vector(h: HeckeElt) -> dict:
    return {x: RatFunc.of(c) if not isinstance(c, RatFunc) else c for x, c in h.coeffs.items()}


# -- 1 ---------------------------------------------------------------------


def test_criterion_1_dihedral_golden(acceptance_line):
    bad = []
    for m in range(3, 8):
        c = cactus(f"I2({m})")
        g = c.group
        e, w0 = g.identity, g.longest
        s = [g.element((0,)), g.element((1,))]
        for i in (0, 1):
            expect = JElt(g, {e: -1, s[i]: 1, s[1 - i]: -1, g.mul(s[i], s[1 - i]): TWO_V, w0: 1})
            if c.f_gamma({i}) != expect:
                bad.append(f"I2({m}) s{i + 1}")
        expect = JElt(g, {e: (-1) ** m, g.mul(w0, s[0]): -1, g.mul(w0, s[1]): -1, w0: 1})
        if c.f_gamma({0, 1}) != expect:
            bad.append(f"I2({m}) S")
    acceptance_line(line(1, "dihedral golden", not bad, f"m=3..7, 15 identities, mismatches: {bad or 'none'}"))
    assert not bad


# -- 2 ---------------------------------------------------------------------


def test_criterion_2_rank_one(acceptance_line):
    bad, count = [], 0
    for label in TEST_GROUPS:
        c = cactus(label)
        g = c.group
        for s in range(g.rank):
            count += 1
            expect = {g.identity: (1 - v * v) / (1 + v * v), g.element((s,)): TWO_V}
            if as_t_vector(c.wtilde({s})) != expect:
                bad.append(f"{label} s{s + 1}")
    acceptance_line(line(2, "rank-one law", not bad, f"{count} generators over {len(TEST_GROUPS)} groups, failures: {bad or 'none'}"))
    assert not bad


# -- 3 ---------------------------------------------------------------------


def _theorem_checks(label: str) -> list[str]:
    """Failed properties of psi^-1 of the literal signed formula, plus its J-ring checks."""
    c = cactus(label)
    g, j = c.group, c.jring
    t = theorem_element(j)
    failed = check_characterization(g, as_t_vector(c.kl.to_t(j.psi_invert(t))), range(g.rank)).failures()
    if j.mul(t, t) != j.j_identity():
        failed.append("square_in_J")
    w0 = g.longest
    if any(j.mul(j.mul(t, j.t(w)), t) != j.t(g.mul(g.mul(w0, w), w0)) for w in g):
        failed.append("conjugation_in_J")
    return failed


# groups where l(w0) + a(w0 d) + a(d) is odd for some distinguished d, so the
# signed formula differs from psi(T_w0) at v=1 and misses w0 after lifting
FORMULA_FAILS = {"A2", "A4", "H3", "I2(3)", "I2(5)", "I2(7)"}


def test_sign_parity_predicts_formula_failures():
    odd = set()
    for label in TEST_GROUPS:
        k = cactus(label).kl
        g = k.group
        n = g.length[g.longest]
        if any((n + k.a[g.mul(g.longest, d)] + k.a[d]) % 2 for d in k.distinguished):
            odd.add(label)
    assert odd == FORMULA_FAILS


@pytest.mark.xfail(strict=True, reason="the signed formula misses w0 at v=1 on A2, A4, H3 and I2(odd)")
def test_criterion_3_theorem_formula(acceptance_line):
    failures = {label: f for label in TEST_GROUPS if (f := _theorem_checks(label))}
    detail = ", ".join(f"{k}: {'+'.join(v_)}" for k, v_ in failures.items()) or "none"
    acceptance_line(line(3, "theorem element", not failures, f"{len(TEST_GROUPS)} groups, failures: {detail}"))
    assert not failures


@pytest.mark.parametrize("label", [pytest.param(lb, marks=pytest.mark.xfail(strict=True)) if lb in FORMULA_FAILS else lb for lb in TEST_GROUPS])
def test_criterion_3_per_group(label):
    assert _theorem_checks(label) == []


@pytest.mark.parametrize("label", sorted(FORMULA_FAILS))
def test_criterion_3_failure_is_only_the_specialization(label):
    assert _theorem_checks(label) == ["specializes_to_longest"]


def test_criterion_3_characterized_element(acceptance_line):
    """The same checks on f(gamma_S), the psi-image of the element defined by the three properties."""
    bad = []
    for label in TEST_GROUPS:
        c = cactus(label)
        g, j = c.group, c.jring
        S = range(g.rank)
        res = check_characterization(g, as_t_vector(c.wtilde(S)), S)
        t = c.f_gamma(S)
        w0 = g.longest
        if not res.ok or j.mul(t, t) != j.j_identity():
            bad.append(label)
        elif any(j.mul(j.mul(t, j.t(w)), t) != j.t(g.mul(g.mul(w0, w), w0)) for w in g):
            bad.append(label)
    acceptance_line(line(3, "companion: f(gamma_S) in place of the formula", not bad, f"failures: {bad or 'none'}"))
    assert not bad


# -- 4 ---------------------------------------------------------------------


def test_criterion_4_cactus_relations(acceptance_line):
    bad, count = [], 0
    for label in SUITE_GROUPS:
        c = cactus(label)
        for rel in enumerate_relations(c.group):
            count += 1
            if pi_W(c.group, rel.left) != pi_W(c.group, rel.right) or c.f_of(rel.left) != c.f_of(rel.right):
                bad.append(f"{label} {rel.describe(c.group)}")
    acceptance_line(line(4, "cactus relations", not bad, f"{count} relation instances over {len(SUITE_GROUPS)} groups, failures: {bad or 'none'}"))
    assert not bad


# -- 5 ---------------------------------------------------------------------


def test_criterion_5_conjecture(acceptance_line):
    backed_bad, other_bad, total = [], [], 0
    for label in SUITE_GROUPS:
        for r in check_conjecture(cactus(label)):
            total += 1
            if not r.passed:
                (backed_bad if r.theorem_backed else other_bad).append(f"{label} {r.I} part {r.part}")
    # part 1-integral is informational, reported but never required
    other_bad = [x for x in other_bad if not x.endswith("1-integral")]
    detail = f"{total} rows, backed failures: {backed_bad or 'none'}, other failures: {other_bad or 'none'}"
    acceptance_line(line(5, "conjecture checker", not backed_bad, detail))
    assert not backed_bad


# -- 6 ---------------------------------------------------------------------


def test_criterion_6_j_ring(acceptance_line):
    bad = []
    for label in TEST_GROUPS:
        c = cactus(label)
        k, j, g = c.kl, c.jring, c.group
        n = len(g)
        one = JElt(g, {d: 1 for d in k.distinguished})
        if any(j.mul(one, j.t(w)) != j.t(w) or j.mul(j.t(w), one) != j.t(w) for w in g):
            bad.append(f"{label} identity")
        rng = random.Random(label)
        for _ in range(1000):
            x, y, z = (j.t(rng.randrange(n)) for _ in range(3))
            if j.mul(j.mul(x, y), z) != j.mul(x, j.mul(y, z)):
                bad.append(f"{label} associativity")
                break
        cols = [JElt(g, j.psi_columns[w]) for w in g]
        pairs = [(x, y) for x in g for y in g] if n <= 48 else [(rng.randrange(n), rng.randrange(n)) for _ in range(1000)]
        for x, y in pairs:
            prod = HeckeElt(g, "C", {x: ONE}, k) * HeckeElt(g, "C", {y: ONE}, k)
            if j.psi(prod) != j.mul(cols[x], cols[y]):
                bad.append(f"{label} psi")
                break
        if any(len({k.a[x] for x in cell}) != 1 for cell in k.two_sided_cells):
            bad.append(f"{label} a on cells")
        gam = k.gamma
        if any(gam.get((y, z), {}).get(x, 0) != cf for (x, y), e in gam.items() for z, cf in e.items()):
            bad.append(f"{label} cyclic")
        if label[0] in "ABD" or label in ("I2(3)", "I2(4)", "I2(6)"):
            if any(cf <= 0 for e in gam.values() for cf in e.values()):
                bad.append(f"{label} positivity")
    acceptance_line(line(6, "J-ring sanity", not bad, f"{len(TEST_GROUPS)} groups, failures: {bad or 'none'}"))
    assert not bad


# -- 7 ---------------------------------------------------------------------


def test_criterion_7_sigma(acceptance_line):
    bad = []
    for label in TEST_GROUPS:
        c = cactus(label)
        k, j, g = c.kl, c.jring, c.group
        w0 = g.longest
        f = c.f_gamma(range(g.rank))
        sigma = {}
        for w in g:
            sign = (-1) ** k.a[g.mul(w0, w)]
            mono = j.mul(f, j.t(w)).monomial()
            if mono is None or mono[1] != sign:
                bad.append(f"{label} left {g.name(w)}")
                break
            sigma[w] = mono[0]
            if j.mul(j.t(w), f) != j.t(g.mul(g.mul(w0, sigma[w]), w0), sign):
                bad.append(f"{label} right {g.name(w)}")
                break
        else:
            if any(sigma[sigma[w]] != w for w in g):
                bad.append(f"{label} involution")
    acceptance_line(line(7, "sigma law", not bad, f"{len(TEST_GROUPS)} groups, left, right and involution, failures: {bad or 'none'}"))
    assert not bad


# -- 8 ---------------------------------------------------------------------


def test_criterion_8_denominators(acceptance_line):
    bad, members, subsets = [], 0, 0
    for label in TEST_GROUPS:
        c = cactus(label)
        for I in c.group.subsets():
            if not all(rf_member_localized(x, {1}) for x in as_t_vector(c.wtilde(I)).values()):
                bad.append(f"{label} {c.group.subset_name(I)}")
            subsets += 1
            members += c.conjecture1(I)["member"]
    detail = f"{subsets} subsets, failures: {bad or 'none'}; conjecture part (1) at v(v-1): {members}/{subsets} members"
    acceptance_line(line(8, "denominators at v=1", not bad, detail))
    assert not bad


# -- 9 ---------------------------------------------------------------------


def test_criterion_9_a1_oracle(acceptance_line):
    c, H, f = cactus("A1"), brute("A", 1), to_brute("A1", "A", 1)
    g, j = c.group, c.jring
    e, s = g.identity, g.element((0,))
    checks = {
        "D = {1, s}": {f[d] for d in c.kl.distinguished} == H.distinguished == {f[e], f[s]},
        "t_s t_s = t_s": j.mul(j.t(s), j.t(s)) == j.t(s) and H.j_mul({f[s]: 1}, {f[s]: 1}) == {f[s]: 1},
        "t_1 t_s = 0": j.mul(j.t(e), j.t(s)) == JElt(g, {}) and not H.j_mul({f[e]: 1}, {f[s]: 1}),
    }
    # in rank one W_I = W, so f(gamma_s) is psi(T_s) at v = 1
    t = sp.Symbol("v")
    oracle_f = {z: int(val.subs(t, 1)) for z, val in H.psi_T(f[s]).items() if val.subs(t, 1) != 0}
    got = c.f_gamma({0})
    checks["f(gamma_s) = t_s - t_1"] = got == JElt(g, {s: 1, e: -1}) and {f[x]: k for x, k in got.coeffs.items()} == oracle_f
    bad = [k for k, ok in checks.items() if not ok]
    acceptance_line(line(9, "A1 oracle", not bad, f"{len(checks)} checks, failures: {bad or 'none'}"))
    assert not bad
