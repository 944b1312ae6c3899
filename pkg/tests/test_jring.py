import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cactus_hecke.hecke import HeckeElt
from cactus_hecke.jring import JElt, JRing, NotMonomial, j_identity, j_mul, psi, psi_invert, sigma, theorem_element
from cactus_hecke.ring import ONE, V, V_INV, RatFunc
from helpers import ORACLE_GROUPS, brute, group, jring, kl, to_brute

SMALL = ["A1", "A2", "A3", "B2", "B3", "G2", "I2(5)", "A1xA2"]
LARGER = ["A4", "D4", "H3"]

two_v = RatFunc.of(2 * V) / (1 + RatFunc.of(V * V))


def C(k, coeffs):
    return HeckeElt(k.group, "C", coeffs, k)


# -- multiplication and identity -------------------------------------------


def test_a1_products():
    j = jring("A1")
    t1, ts = j.t(0), j.t(1)
    assert j_mul(j, ts, ts) == ts
    assert j_mul(j, t1, ts) == JElt(j.group, {})
    assert j_identity(j) == t1 + ts


def test_a2_identity():
    j = jring("A2")
    g = j.group
    assert j.one == JElt(g, {0: 1, 1: 1, 2: 1, g.longest: 1})


@pytest.mark.parametrize("label,kind,n", ORACLE_GROUPS)
def test_product_matches_oracle(label, kind, n):
    j, H, f = jring(label), brute(kind, n), to_brute(label, kind, n)
    for x in j.group:
        for y in j.group:
            got = {f[z]: c for z, c in j.mul(j.t(x), j.t(y)).coeffs.items()}
            assert got == H.j_mul({f[x]: 1}, {f[y]: 1})


@pytest.mark.parametrize("label", SMALL + LARGER)
def test_identity_two_sided(label):
    j = jring(label)
    one = j.j_identity()
    for w in j.group:
        assert j.mul(one, j.t(w)) == j.t(w) == j.mul(j.t(w), one)


@pytest.mark.parametrize("label", SMALL + LARGER)
def test_associativity_random_triples(label):
    j = jring(label)
    n = len(j.group)
    rng = random.Random(label)
    for _ in range(200):
        x, y, z = (j.t(rng.randrange(n)) for _ in range(3))
        assert j.mul(j.mul(x, y), z) == j.mul(x, j.mul(y, z))


@given(st.sampled_from(SMALL), st.data())
def test_ring_axioms_on_sums(label, data):
    j = jring(label)
    n = len(j.group)
    elt = lambda: JElt(j.group, data.draw(st.dictionaries(st.integers(0, n - 1), st.integers(-3, 3), max_size=4)))  # noqa: E731
    a, b, c = elt(), elt(), elt()
    assert j.mul(j.mul(a, b), c) == j.mul(a, j.mul(b, c))
    assert j.mul(a, b + c) == j.mul(a, b) + j.mul(a, c)


# -- psi -------------------------------------------------------------------


def test_psi_examples():
    k, j = kl("A1"), jring("A1")
    assert psi(j, C(k, {0: ONE})) == j.one
    assert psi(j, C(k, {1: ONE})) == JElt(k.group, {1: V + V_INV})
    elt = C(k, {0: RatFunc.of(-1), 1: two_v})
    assert psi(j, elt) == JElt(k.group, {1: 1, 0: -1})
    assert psi_invert(j, JElt(k.group, {1: 1, 0: -1})) == elt


@pytest.mark.parametrize("label", ["A1", "A2", "B2"])
def test_psi_matrix_matches_oracle(label):
    kind, n = {"A1": ("A", 1), "A2": ("A", 2), "B2": ("B", 2)}[label]
    j, H, f = jring(label), brute(kind, n), to_brute(label, kind, n)
    for w in j.group:
        got = {f[z]: c.coeffs for z, c in j.psi_columns[w].items()}
        assert got == H.psi_C(f[w])


@pytest.mark.parametrize("label", SMALL)
def test_psi_multiplicative_all_pairs(label):
    k, j = kl(label), jring(label)
    g = k.group
    cols = [JElt(g, j.psi_columns[w]) for w in g]
    for x in g:
        for y in g:
            assert psi(j, C(k, {x: ONE}) * C(k, {y: ONE})) == j.mul(cols[x], cols[y])


@pytest.mark.parametrize("label", LARGER)
def test_psi_multiplicative_random_pairs(label):
    k, j = kl(label), jring(label)
    g = k.group
    rng = random.Random(label)
    for _ in range(150):
        x, y = rng.randrange(len(g)), rng.randrange(len(g))
        lhs = psi(j, C(k, {x: ONE}) * C(k, {y: ONE}))
        assert lhs == j.mul(JElt(g, j.psi_columns[x]), JElt(g, j.psi_columns[y]))


@pytest.mark.parametrize("label", ["A2", "B3", "H3"])
def test_psi_invert_round_trip(label):
    k, j = kl(label), jring(label)
    rng = random.Random(3)
    for w in rng.sample(range(len(k.group)), 6):
        back = psi_invert(j, psi(j, C(k, {w: ONE})))
        assert back == C(k, {w: RatFunc.of(1)})


def test_psi_of_t_basis():
    k, j = kl("B2"), jring("B2")
    g = k.group
    for w in g:
        tw = HeckeElt.basis_element(g, w, "T", k)
        assert psi(j, tw) == psi(j, k.to_c(tw))


def test_psi_blocks_a2_invertible_at_one():
    j = jring("A2")
    m = j.psi_matrix
    for inv in m.inverses:
        for row in inv:
            for x in row:
                assert x.eval_at(1) is not None


# -- the longest element and sigma -----------------------------------------


def test_theorem_element_a1():
    j = jring("A1")
    assert theorem_element(j) == JElt(j.group, {1: 1, 0: -1})
    assert j.longest_image == theorem_element(j)


@pytest.mark.parametrize("m", [3, 4, 5, 6, 7, 8])
def test_longest_image_dihedral(m):
    j = jring(f"I2({m})")
    g = j.group
    w0 = g.longest
    expect = JElt(g, {0: (-1) ** m, g.mul(w0, 1): -1, g.mul(w0, 2): -1, w0: 1})
    assert j.longest_image == expect
    # the signed formula agrees with it exactly when l(w0) = m is even
    assert (theorem_element(j) == expect) == (m % 2 == 0)


@pytest.mark.parametrize("label", SMALL + LARGER)
def test_longest_image_sign_rule(label):
    """psi(T_w0) at v=1 is sum_d (-1)^a(d) t_{w0 d}."""
    j = jring(label)
    g, a = j.group, j.kl.a
    expect = JElt(g, {g.mul(g.longest, d): (-1) ** a[d] for d in j.kl.distinguished})
    assert j.longest_image == expect


@pytest.mark.parametrize("label", SMALL + LARGER)
def test_longest_image_j_properties(label):
    j = jring(label)
    g = j.group
    t = j.longest_image
    assert j.mul(t, t) == j.one
    for w in g:
        assert j.mul(j.mul(t, j.t(w)), t) == j.t(g.mul(g.mul(g.longest, w), g.longest))


@pytest.mark.parametrize("label", SMALL + LARGER)
def test_theorem_element_j_properties(label):
    """The signed sum squares to one and conjugates t_w, whatever its sign pattern."""
    j = jring(label)
    g = j.group
    t = theorem_element(j)
    assert j.mul(t, t) == j.one
    for w in g:
        assert j.mul(j.mul(t, j.t(w)), t) == j.t(g.mul(g.mul(g.longest, w), g.longest))


@pytest.mark.parametrize("label", SMALL + LARGER)
def test_sigma_law(label):
    j = jring(label)
    g, a = j.group, j.kl.a
    w0 = g.longest
    t = j.longest_image
    for w in g:
        z, sign = sigma(j, w)
        assert sign == (-1) ** a[g.mul(w0, w)]
        assert j.sigma_table[z][0] == w
        assert j.mul(j.t(w), t) == j.t(g.mul(g.mul(w0, z), w0), sign)


def test_sigma_a1():
    # (t_s - t_1) t_1 = -t_1 and (t_s - t_1) t_s = t_s
    j = jring("A1")
    assert sigma(j, 0) == (0, -1)
    assert sigma(j, 1) == (1, 1)


def test_sigma_rejects_non_monomial():
    j = jring("A2")
    with pytest.raises(NotMonomial):
        j.sigma(0, element=j.one.scale(2))


def test_to_json():
    j = jring("A2")
    assert j.longest_image.to_json() == {"t_1": -1, "t_s1 s2": -1, "t_s2 s1": -1, "t_s1 s2 s1": 1}


def test_unchecked_ring():
    j = JRing(kl("A2"), check=False)
    assert j.one == jring("A2").one
