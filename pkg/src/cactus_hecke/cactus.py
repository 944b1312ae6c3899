"""Cactus group words, the elements w~_I, and the map f into the J-ring.

For each I we build W_I as a Coxeter group in its own right, take the
integral J-ring element t_I of W_I with psi^-1(t_I) = T_{w_I} mod (v-1),
invert psi over Q(v), and push the result into H_W through the T-basis
embedding.  Every w~_I is then checked against its characterization
(square one, value w_I at v = 1, conjugation of T_s by w_I).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Literal, Sequence

from .coxeter import CoxGroup, Side, build_group
from .hecke import HeckeElt, KLData, _clear, _restore, _t_product, mul_t_vectors
from .jring import JElt, JRing
from .ring import ONE, LaurentPoly, RatFunc, rf_member_localized, specialize

log = logging.getLogger(__name__)

Subset = frozenset


class CharacterizationFailed(AssertionError):
    pass


class PoleAtZero(ArithmeticError):
    """f(word) has a coefficient with a pole at v = 0."""


class NotSignedPermutation(AssertionError):
    pass


@dataclass(frozen=True)
class CactusWord:
    """A word in the involutive generators gamma_I; empty letters are dropped."""

    letters: tuple[frozenset[int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(frozenset(x) for x in self.letters if x))

    @classmethod
    def of(cls, *letters: Iterable[int]) -> "CactusWord":
        return cls(tuple(frozenset(x) for x in letters))

    def __add__(self, other: "CactusWord") -> "CactusWord":
        return CactusWord(self.letters + other.letters)

    def __len__(self) -> int:
        return len(self.letters)

    def render(self, group: CoxGroup | None = None) -> str:
        if not self.letters:
            return "1"
        name = group.subset_name if group else (lambda I: "{" + ",".join(f"s{s + 1}" for s in sorted(I)) + "}")
        return " ".join(f"g{name(I)}" for I in self.letters)


def alternative_generator(subset: Iterable[int], s: int) -> CactusWord:
    """gamma_{I,s} = gamma_I gamma_{I minus s}."""
    subset = frozenset(subset)
    return CactusWord.of(subset, subset - {s})


def pi_W(group: CoxGroup, word: CactusWord) -> int:
    x = group.identity
    for I in word.letters:
        x = group.mul(x, group.longest_of(I))
    return x


@dataclass(frozen=True)
class Relation:
    kind: Literal["square", "product", "conjugation"]
    I: frozenset[int]
    J: frozenset[int]
    left: CactusWord
    right: CactusWord

    def describe(self, group: CoxGroup) -> str:
        return f"{self.kind}: {self.left.render(group)} = {self.right.render(group)}"


def _commute(group: CoxGroup, I: Iterable[int], J: Iterable[int]) -> bool:
    m = group.matrix.m
    return all(s != t and m[s][t] == 2 for s in I for t in J)


def enumerate_relations(group: CoxGroup) -> list[Relation]:
    """All instances of the three defining relations over nonempty subsets of S."""
    subsets = [I for I in group.subsets() if I]
    out = []
    for I in subsets:
        out.append(Relation("square", I, I, CactusWord.of(I, I), CactusWord()))
    for I in subsets:
        for J in subsets:
            if I == J:
                continue
            size_union = len(group.parabolic(I | J)[0])
            if size_union == len(group.parabolic(I)[0]) * len(group.parabolic(J)[0]) and _commute(group, I, J):
                out.append(Relation("product", I, J, CactusWord.of(I, J), CactusWord.of(I | J)))
    for J in subsets:
        for I in subsets:
            if I < J:
                K = group.conjugate_subset(J, I)
                out.append(Relation("conjugation", I, J, CactusWord.of(I, J), CactusWord.of(J, K)))
    return out


@dataclass
class Parabolic:
    """W_I as a standalone Coxeter group plus its embedding into W."""

    subset: frozenset[int]
    group: CoxGroup
    embed: list[int]
    kl: KLData
    jring: JRing
    restrict: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        self.restrict = {w: x for x, w in enumerate(self.embed)}


@dataclass(frozen=True)
class Characterization:
    square_is_one: bool
    specializes_to_longest: bool
    conjugates_generators: bool
    denominators_ok_at_one: bool

    @property
    def ok(self) -> bool:
        return self.square_is_one and self.specializes_to_longest and self.conjugates_generators

    def failures(self) -> list[str]:
        names = ["square_is_one", "specializes_to_longest", "conjugates_generators", "denominators_ok_at_one"]
        return [n for n in names if not getattr(self, n)]


def check_characterization(group: CoxGroup, elt: dict, subset: Iterable[int]) -> Characterization:
    """Test the three defining properties of w~_I for a T-basis vector on W_I."""
    subset = frozenset(subset)
    w_i = group.longest_of(subset)
    square = mul_t_vectors(group, elt, elt)
    square_ok = square == {group.identity: RatFunc.of(1)} or square == {group.identity: ONE}
    den_ok = all(rf_member_localized(c, {1}) for c in elt.values())
    if den_ok:
        at_one = {x: val for x, c in elt.items() if (val := specialize(c, 1))}
        spec_ok = at_one == {w_i: Fraction(1)}
    else:
        spec_ok = False
    conj_ok = True
    for s in sorted(subset):
        t = group.mul(group.mul(w_i, group.element((s,))), w_i)
        lhs = mul_t_vectors(group, mul_t_vectors(group, elt, {group.element((s,)): ONE}), elt)
        rhs = {t: RatFunc.of(1)}
        if lhs != rhs and lhs != {t: ONE}:
            conj_ok = False
            break
    return Characterization(square_ok, spec_ok, conj_ok, den_ok)


class Cactus:
    """The map f = psi o kappa o phi from the cactus group of W into J_W."""

    def __init__(
        self,
        group: CoxGroup,
        kl: KLData | None = None,
        jring: JRing | None = None,
        coset_reading: Literal["right", "left"] = "right",
        check: bool = True,
    ):
        self.group = group
        self.kl = kl or KLData(group, check=check)
        self.jring = jring or JRing(self.kl, check=check)
        self.coset_reading = coset_reading
        self.check = check
        self._parabolics: dict[frozenset[int], Parabolic] = {}
        self._wtilde: dict[frozenset[int], HeckeElt] = {}
        self._f: dict[frozenset[int], JElt] = {}
        self._cleared_cache: dict[frozenset[int], tuple[dict, LaurentPoly]] = {}

    # -- parabolic data ----------------------------------------------------
    def parabolic(self, subset: Iterable[int]) -> Parabolic:
        subset = frozenset(subset)
        hit = self._parabolics.get(subset)
        if hit is not None:
            return hit
        g = self.group
        if len(subset) == g.rank:
            par = Parabolic(subset, g, list(g), self.kl, self.jring)
        else:
            gens = sorted(subset)
            sub = build_group(g.matrix.restrict(gens), max_size=len(g))
            embed = [g.element(gens[j] for j in sub.words[x]) for x in sub]
            kl = KLData(sub, check=self.check)
            par = Parabolic(subset, sub, embed, kl, JRing(kl, check=self.check))
        self._parabolics[subset] = par
        return par

    def sigma_parabolic(self, subset: Iterable[int], x: int) -> tuple[int, int]:
        """sigma_{W_I}(x) and its sign, for x in W_I (ids of W)."""
        par = self.parabolic(subset)
        y, sign = par.jring.sigma(par.restrict[x])
        return par.embed[y], sign

    def a_parabolic(self, subset: Iterable[int], x: int) -> int:
        par = self.parabolic(subset)
        return par.kl.a[par.restrict[x]]

    # -- w~_I ----------------------------------------------------------------
    def wtilde(self, subset: Iterable[int]) -> HeckeElt:
        """w~_I in the T-basis of H_W with rational coefficients."""
        subset = frozenset(subset)
        hit = self._wtilde.get(subset)
        if hit is not None:
            return hit
        g = self.group
        if not subset:
            elt = HeckeElt(g, "T", {g.identity: RatFunc.of(1)}, self.kl)
            self._wtilde[subset] = elt
            return elt
        par = self.parabolic(subset)
        t_i = par.jring.longest_image
        pre = par.kl.to_t(par.jring.psi_invert(t_i))
        coeffs = {x: RatFunc.of(c) for x, c in pre.coeffs.items()}
        if self.check:
            res = check_characterization(par.group, coeffs, range(par.group.rank))
            if not res.ok or not res.denominators_ok_at_one:
                raise CharacterizationFailed(
                    f"w~_{g.subset_name(subset)} fails: {', '.join(res.failures())}"
                )
        elt = HeckeElt(g, "T", {par.embed[x]: c for x, c in coeffs.items()}, self.kl)
        self._wtilde[subset] = elt
        return elt

    def wtilde_from_element(self, subset: Iterable[int], t: JElt) -> HeckeElt:
        """psi_{W_I}^-1(t) pushed into H_W, for an arbitrary J_{W_I} element t."""
        par = self.parabolic(subset)
        pre = par.kl.to_t(par.jring.psi_invert(t))
        return HeckeElt(self.group, "T", {par.embed[x]: RatFunc.of(c) for x, c in pre.coeffs.items()}, self.kl)

    # -- f and f-bar ---------------------------------------------------------
    def _cleared(self, subset: frozenset[int]) -> tuple[dict, LaurentPoly]:
        hit = self._cleared_cache.get(subset)
        if hit is None:
            hit = _clear(self.wtilde(subset).coeffs)
            self._cleared_cache[subset] = hit
        return hit

    def _hecke_image_cleared(self, word: CactusWord) -> tuple[dict, LaurentPoly]:
        g = self.group
        vec: dict = {g.identity: ONE}
        den = ONE
        for I in word.letters:
            nums, d = self._cleared(I)
            vec = _t_product(g, vec, nums)
            den = den * d
        return vec, den

    def hecke_image(self, word: CactusWord) -> HeckeElt:
        """The product of the w~_I over the letters, in H_W."""
        vec, den = self._hecke_image_cleared(word)
        return HeckeElt(self.group, "T", _restore(vec, den), self.kl)

    def f_of(self, word: CactusWord) -> JElt:
        if len(word) == 1:
            hit = self._f.get(word.letters[0])
            if hit is not None:
                return hit
        vec, den = self._hecke_image_cleared(word)
        out = JElt(self.group, _restore(self.jring.psi_laurent(self.kl._t_to_c(vec)), den))
        if len(word) == 1:
            self._f[word.letters[0]] = out
        return out

    def f_gamma(self, subset: Iterable[int]) -> JElt:
        subset = frozenset(subset)
        if not subset:
            return self.jring.one
        return self.f_of(CactusWord.of(subset))

    def conjecture1(self, subset: Iterable[int]) -> dict:
        """Membership of the coefficients of f(gamma_I) in the localization at v(v-1)."""
        f = self.f_gamma(subset)
        bad_points = [x for x, c in f.coeffs.items() if not rf_member_localized(c, {0, 1})]
        non_integral = [
            x for x, c in f.coeffs.items() if isinstance(c, RatFunc) and c.integer_denominator() != 1
        ]
        return {"member": not bad_points, "integral": not non_integral, "witness": bad_points or non_integral}

    def fbar_of(self, word: CactusWord) -> JElt:
        f = self.f_of(word) if len(word) else self.jring.one
        out = {}
        for x, c in f.coeffs.items():
            if not rf_member_localized(c, {0}):
                raise PoleAtZero(f"coefficient of t_{self.group.name(x)} in f({word.render(self.group)}) is {c}")
            val = specialize(c, 0)
            if val.denominator != 1:
                raise PoleAtZero(f"non-integral value {val} at v=0 for t_{self.group.name(x)}")
            if val:
                out[x] = int(val)
        return JElt(self.group, out)

    def fbar_gamma(self, subset: Iterable[int]) -> JElt:
        return self.fbar_of(CactusWord.of(subset))

    # -- conjecture parts (2) and (3) ----------------------------------------
    def _split(self, subset: frozenset[int], w: int, side: Side) -> tuple[int, int]:
        return self.group.coset_decompose(subset, w, side)

    def conjecture2_predicted(self, subset: Iterable[int]) -> JElt:
        subset = frozenset(subset)
        g = self.group
        if not subset:
            return self.jring.one
        w_i = g.longest_of(subset)
        out: dict = {}
        for d in self.kl.distinguished:
            if self.coset_reading == "right":
                d1, d2 = self._split(subset, d, "left")
            else:
                d1, d2 = self._split(subset, d, "right")
            sig, _ = self.sigma_parabolic(subset, d1)
            sign = (-1) ** (self.a_parabolic(subset, g.mul(w_i, d1)) % 2)
            z = g.mul(sig, d2)
            out[z] = out.get(z, 0) + sign
        return JElt(g, out)

    def conjecture3_predictions(self, subset: Iterable[int], w: int) -> tuple[JElt, JElt]:
        """Right-hand sides of the left and right multiplication formulas."""
        subset = frozenset(subset)
        g = self.group
        if not subset:
            return self.jring.t(w), self.jring.t(w)
        w_i = g.longest_of(subset)
        x, y = self._split(subset, w, "left")
        sig, _ = self.sigma_parabolic(subset, x)
        sign = (-1) ** (self.a_parabolic(subset, g.mul(w_i, x)) % 2)
        left = self.jring.t(g.mul(sig, y), sign)
        x, y = self._split(subset, w, "right")
        sig, _ = self.sigma_parabolic(subset, x)
        sign = (-1) ** (self.a_parabolic(subset, g.mul(w_i, x)) % 2)
        right = self.jring.t(g.mul(g.mul(g.mul(y, w_i), sig), w_i), sign)
        return left, right

    def conjecture3_check(self, subset: Iterable[int], w: int) -> dict:
        subset = frozenset(subset)
        fbar = self.fbar_gamma(subset)
        tw = self.jring.t(w)
        got_l = self.jring.mul(fbar, tw)
        got_r = self.jring.mul(tw, fbar)
        exp_l, exp_r = self.conjecture3_predictions(subset, w)
        return {"left": got_l == exp_l, "right": got_r == exp_r, "got": (got_l, got_r), "expected": (exp_l, exp_r)}

    # -- orbits --------------------------------------------------------------
    def action_generators(self) -> list[frozenset[int]]:
        return [I for I in self.group.subsets() if self.group.is_irreducible_subset(I)]

    def signed_permutation(self, subset: Iterable[int], side: Side = "left") -> list[tuple[int, int]]:
        fbar = self.fbar_gamma(subset)
        out = []
        for w in self.group:
            tw = self.jring.t(w)
            prod = self.jring.mul(fbar, tw) if side == "left" else self.jring.mul(tw, fbar)
            mono = prod.monomial()
            if mono is None or mono[1] not in (1, -1):
                raise NotSignedPermutation(
                    f"fbar(gamma_{self.group.subset_name(subset)}) acting on t_{self.group.name(w)} gives {prod}"
                )
            out.append(mono)
        return out

    def cactus_action_orbits(self, side: Side = "left") -> list[list[int]]:
        n = len(self.group)
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for I in self.action_generators():
            for w, (z, _) in enumerate(self.signed_permutation(I, side)):
                a, b = find(w), find(z)
                if a != b:
                    parent[max(a, b)] = min(a, b)
        groups: dict[int, list[int]] = {}
        for x in range(n):
            groups.setdefault(find(x), []).append(x)
        return sorted(groups.values())


def orbit_cell_relation(orbits: list[list[int]], cells: list[list[int]]) -> dict[str, bool]:
    """Whether the orbits are unions of cells, refine the cells, or equal them.

    >>> orbit_cell_relation([[0, 1], [2]], [[0], [1], [2]])
    {'union_of': True, 'refine': False, 'equal': False}
    """
    refine = not orbit_cell_comparison(cells, orbits)
    union = not orbit_cell_comparison(orbits, cells)
    return {"union_of": union, "refine": refine, "equal": union and refine}


def orbit_cell_comparison(orbits: list[list[int]], cells: list[list[int]]) -> list[list[int]]:
    """Orbits that are not unions of the given cells (empty list when all are)."""
    where = {}
    for k, cell in enumerate(cells):
        for x in cell:
            where[x] = k
    bad = []
    for orb in orbits:
        members = set(orb)
        if any(not set(cells[where[x]]) <= members for x in orb):
            bad.append(orb)
    return bad


# --------------------------------------------------------------------------
# conjecture checker


@dataclass
class ReportRow:
    group: str
    I: str
    part: str
    w: str
    passed: bool
    witness: str = ""
    theorem_backed: bool = False

    def as_dict(self) -> dict:
        return {
            "group": self.group,
            "I": self.I,
            "part": self.part,
            "w": self.w,
            "pass": "pass" if self.passed else "fail",
            "witness": self.witness,
            "theorem_backed": self.theorem_backed,
        }


def check_conjecture(cactus: Cactus, subsets: Sequence[Iterable[int]] | None = None) -> list[ReportRow]:
    """Evaluate parts (1), (2), (3) for every subset; one row per check."""
    g = cactus.group
    label = g.label
    rows: list[ReportRow] = []
    subsets = g.subsets() if subsets is None else [frozenset(I) for I in subsets]
    for I in subsets:
        name = g.subset_name(I)
        backed = len(I) == g.rank or len(I) == 1
        c1 = cactus.conjecture1(I)
        witness = "; ".join(f"t_{g.name(x)}: {cactus.f_gamma(I).coeffs[x]}" for x in c1["witness"])
        rows.append(ReportRow(label, name, "1", "", c1["member"], witness, backed))
        rows.append(ReportRow(label, name, "1-integral", "", c1["integral"], witness, False))
        if not c1["member"]:
            rows.append(ReportRow(label, name, "2", "", False, "part (1) fails", backed))
            continue
        fbar = cactus.fbar_gamma(I)
        pred = cactus.conjecture2_predicted(I)
        rows.append(
            ReportRow(label, name, "2", "", fbar == pred, "" if fbar == pred else f"fbar={fbar}; predicted={pred}", backed)
        )
        for w in g:
            res = cactus.conjecture3_check(I, w)
            for side, key, k in (("3-left", "left", 0), ("3-right", "right", 1)):
                wit = "" if res[key] else f"got {res['got'][k]}; expected {res['expected'][k]}"
                rows.append(ReportRow(label, name, side, g.name(w), res[key], wit, backed))
    return rows


# --------------------------------------------------------------------------
# dihedral closed forms


def dihedral_predictions(group: CoxGroup) -> dict[str, JElt]:
    """Closed forms of f(gamma_{s1}), f(gamma_{s2}) and f(gamma_S) for I2(m).

    f(gamma_{s_i}) = -t_1 + t_{s_i} - t_{s_j} + 2v/(1+v^2) t_{s_i s_j} + t_{w0},
    f(gamma_S) = (-1)^m t_1 - t_{w0 s1} - t_{w0 s2} + t_{w0}.
    """
    if group.rank != 2 or group.matrix.m[0][1] < 3:
        raise ValueError(f"{group.label} is not an irreducible dihedral group")
    m = group.matrix.m[0][1]
    e, w0 = group.identity, group.longest
    s = [group.element((0,)), group.element((1,))]
    two_v = RatFunc.from_laurent(LaurentPoly.monomial(1, 2), LaurentPoly.from_dict({0: 1, 2: 1}))
    out = {}
    for i in (0, 1):
        j = 1 - i
        coeffs: dict = {}
        for x, c in ((e, -1), (s[i], 1), (s[j], -1), (group.mul(s[i], s[j]), two_v), (w0, 1)):
            coeffs[x] = coeffs.get(x, 0) + c
        out[f"s{i + 1}"] = JElt(group, coeffs)
    coeffs = {e: (-1) ** m, group.mul(w0, s[0]): -1, group.mul(w0, s[1]): -1, w0: 1}
    out["S"] = JElt(group, coeffs)
    return out
