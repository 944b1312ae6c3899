"""Hecke algebra, Kazhdan-Lusztig basis and Lusztig's a-function.

Conventions: T_s^2 = 1 + (v - v^-1) T_s, the bar involution sends v to v^-1
and T_s to T_s^-1, and C_w = T_w + sum_{y<w} p_{y,w} T_y with
p_{y,w} in v^-1 Z[v^-1].  So C_s = T_s + v^-1 and C_s^2 = (v + v^-1) C_s.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Literal, Mapping

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .coxeter import CoxGroup
from .ring import (
    ONE,
    V,
    V_INV,
    LaurentPoly,
    RatFunc,
    Scalar,
    common_denominator,
    specialize,
)

log = logging.getLogger(__name__)

Basis = Literal["T", "C"]

V_MINUS_VINV = V - V_INV
VINV_MINUS_V = V_INV - V
V_PLUS_VINV = V + V_INV


class InternalAssertion(AssertionError):
    """A computed table contradicts a property its definition guarantees."""


# --------------------------------------------------------------------------
# sparse vectors: dict element -> scalar


def _axpy(out: dict, x: int, c) -> None:
    old = out.get(x)
    if old is None:
        out[x] = c
    else:
        new = old + c
        if new:
            out[x] = new
        else:
            del out[x]


def _clean(vec: Mapping) -> dict:
    return {k: c for k, c in vec.items() if c}


def _right_mul_ts(group: CoxGroup, vec: Mapping[int, Scalar], s: int) -> dict:
    """vec * T_s in the T-basis."""
    out: dict = {}
    rm, ln = group.right_mul, group.length
    for x, c in vec.items():
        xs = rm[x][s]
        _axpy(out, xs, c)
        if ln[xs] < ln[x]:
            _axpy(out, x, c * V_MINUS_VINV)
    return out


def _left_mul_ts(group: CoxGroup, vec: Mapping[int, Scalar], s: int) -> dict:
    """T_s * vec in the T-basis."""
    out: dict = {}
    lm, ln = group.left_mul, group.length
    for x, c in vec.items():
        sx = lm[x][s]
        _axpy(out, sx, c)
        if ln[sx] < ln[x]:
            _axpy(out, x, c * V_MINUS_VINV)
    return out


def _t_product(group: CoxGroup, a: Mapping[int, Scalar], b: Mapping[int, Scalar]) -> dict:
    """Product of two T-basis vectors with Laurent (or int) coefficients."""
    if len(b) == 1 and group.identity in b:
        c = b[group.identity]
        return _clean({x: y * c for x, y in a.items()})
    prefix: dict[int, dict] = {group.identity: dict(a)}

    def times_t(y: int) -> dict:
        hit = prefix.get(y)
        if hit is None:
            s = group.words[y][-1]
            hit = _right_mul_ts(group, times_t(group.right_mul[y][s]), s)
            prefix[y] = hit
        return hit

    out: dict = {}
    for y in sorted(b, key=group.length.__getitem__):
        c = b[y]
        for x, d in times_t(y).items():
            _axpy(out, x, d * c)
    return out


def _is_rational(coeffs: Iterable) -> bool:
    return any(isinstance(c, RatFunc) for c in coeffs)


def _clear(vec: Mapping[int, Scalar]) -> tuple[dict[int, LaurentPoly], LaurentPoly]:
    keys = list(vec)
    nums, den = common_denominator(vec[k] for k in keys)
    return dict(zip(keys, nums)), den


def _restore(vec: Mapping[int, LaurentPoly], den: LaurentPoly) -> dict[int, RatFunc]:
    d = RatFunc.of(den)
    return {k: RatFunc.of(c) / d for k, c in vec.items() if c}


def mul_t_vectors(group: CoxGroup, a: Mapping[int, Scalar], b: Mapping[int, Scalar]) -> dict:
    """T-basis product; rational coefficients are handled over a common denominator."""
    if _is_rational(a.values()) or _is_rational(b.values()):
        na, da = _clear(a)
        nb, db = _clear(b)
        return _restore(_t_product(group, na, nb), da * db)
    return _t_product(group, a, b)


# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class HeckeElt:
    """A finite sum of T_w or C_w with Laurent or rational coefficients."""

    group: CoxGroup
    basis: Basis
    coeffs: Mapping[int, Scalar]
    kl: "KLData | None" = None

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _clean(self.coeffs))

    @classmethod
    def basis_element(cls, group: CoxGroup, w: int, basis: Basis = "T", kl=None) -> "HeckeElt":
        return cls(group, basis, {w: ONE}, kl)

    @classmethod
    def scalar(cls, group: CoxGroup, c: Scalar, basis: Basis = "T", kl=None) -> "HeckeElt":
        return cls(group, basis, {group.identity: c}, kl)

    def _check(self, other: "HeckeElt") -> None:
        if other.group is not self.group:
            raise ValueError("Hecke elements of different groups")
        if other.basis != self.basis:
            raise ValueError(f"cannot combine {self.basis}-basis and {other.basis}-basis elements; convert first")

    def _with(self, coeffs) -> "HeckeElt":
        return HeckeElt(self.group, self.basis, coeffs, self.kl)

    def __add__(self, other):
        if not isinstance(other, HeckeElt):
            return self + HeckeElt.scalar(self.group, other, self.basis, self.kl) if self.basis == "T" else NotImplemented
        self._check(other)
        out = dict(self.coeffs)
        for x, c in other.coeffs.items():
            _axpy(out, x, c)
        return self._with(out)

    __radd__ = __add__

    def __neg__(self):
        return self._with({x: -c for x, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: Scalar) -> "HeckeElt":
        return self._with({x: y * c for x, y in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, HeckeElt):
            self._check(other)
            if self.basis == "T":
                return t_mul(self, other)
            kl = self.kl or other.kl
            if kl is None:
                raise ValueError("C-basis multiplication needs KL data")
            return kl.c_mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __eq__(self, other):
        if not isinstance(other, HeckeElt):
            return NotImplemented
        return self.group is other.group and self.basis == other.basis and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.basis, frozenset(self.coeffs.items())))

    def over_ratfunc(self) -> "HeckeElt":
        return self._with({x: RatFunc.of(c) for x, c in self.coeffs.items()})

    def is_rational(self) -> bool:
        return _is_rational(self.coeffs.values())

    def specialize(self, point: int) -> dict[int, Fraction]:
        return {x: val for x, c in self.coeffs.items() if (val := specialize(c, point))}

    def __repr__(self):
        if not self.coeffs:
            return "0"
        terms = [f"({c})*{self.basis}[{self.group.name(x)}]" for x, c in sorted(self.coeffs.items())]
        return " + ".join(terms)


def t_mul(h1: HeckeElt, h2: HeckeElt) -> HeckeElt:
    if h1.basis != "T" or h2.basis != "T":
        raise ValueError("t_mul expects T-basis elements")
    return HeckeElt(h1.group, "T", mul_t_vectors(h1.group, h1.coeffs, h2.coeffs), h1.kl or h2.kl)


class _BarTable:
    """bar(T_y) in the T-basis for every y, built on demand."""

    def __init__(self, group: CoxGroup):
        self.group = group
        self.rows: dict[int, dict[int, LaurentPoly]] = {group.identity: {group.identity: ONE}}

    def __getitem__(self, y: int) -> dict[int, LaurentPoly]:
        hit = self.rows.get(y)
        if hit is not None:
            return hit
        g = self.group
        # iterate so deep elements do not recurse
        chain = []
        z = y
        while z not in self.rows:
            chain.append(z)
            z = g.left_mul[z][g.words[z][0]]
        for z in reversed(chain):
            s = g.words[z][0]
            prev = self.rows[g.left_mul[z][s]]
            out: dict = {}
            for x, c in prev.items():
                sx = g.left_mul[x][s]
                _axpy(out, sx, c)
                if g.length[sx] > g.length[x]:
                    _axpy(out, x, c * VINV_MINUS_V)
            self.rows[z] = out
        return self.rows[y]


def bar(h: HeckeElt) -> HeckeElt:
    """The ring involution v -> v^-1, T_s -> T_s^-1 (T-basis input)."""
    if h.basis != "T":
        raise ValueError("bar expects a T-basis element")
    table = _BarTable(h.group)
    out: dict = {}
    for y, c in h.coeffs.items():
        cb = c.bar() if not isinstance(c, int) else c
        for x, d in table[y].items():
            _axpy(out, x, d * cb)
    return HeckeElt(h.group, "T", out, h.kl)


# --------------------------------------------------------------------------


class KLData:
    """Kazhdan-Lusztig data of a finite Coxeter group, computed lazily.

    Attributes (each computed on first access): ``p`` (KL polynomials),
    ``mu``, ``h`` (structure constants), ``a``, ``gamma``, ``delta``,
    ``distinguished``, and the cell partitions.
    """

    def __init__(self, group: CoxGroup, check: bool = True):
        self.group = group
        self.check = check
        self.p, self.mu = self._kl_polynomials()
        if check:
            self.check_kl_basis()

    # -- KL polynomials ----------------------------------------------------
    def _kl_polynomials(self):
        g = self.group
        n = len(g)
        p: list[dict[int, LaurentPoly]] = [None] * n  # type: ignore[list-item]
        mu: list[dict[int, int]] = [None] * n  # type: ignore[list-item]
        p[0] = {0: ONE}
        mu[0] = {}
        lm, ln = g.left_mul, g.length
        for w in range(1, n):
            s = g.words[w][0]
            x = lm[w][s]
            q: dict = {}
            for y, c in p[x].items():
                sy = lm[y][s]
                _axpy(q, sy, c)
                _axpy(q, y, c * (V if ln[sy] < ln[y] else V_INV))
            for z, m in mu[x].items():
                if ln[lm[z][s]] < ln[z]:
                    for y, c in p[z].items():
                        _axpy(q, y, c * (-m))
            p[w] = q
            mu[w] = {y: c.coeff(-1) for y, c in q.items() if y != w and c.coeff(-1)}
        return p, mu

    def check_kl_basis(self) -> None:
        """Assert unitriangularity and bar-invariance of every C_w."""
        g = self.group
        table = _BarTable(g)
        for w in g:
            col = self.p[w]
            if col.get(w) != ONE:
                raise InternalAssertion(f"p_(w,w) != 1 for w={g.name(w)}")
            for y, c in col.items():
                if y != w and (g.length[y] >= g.length[w] or c.high > -1):
                    raise InternalAssertion(f"bad lower term p_({g.name(y)},{g.name(w)}) = {c}")
            barred: dict = {}
            for y, c in col.items():
                cb = c.bar()
                for x, d in table[y].items():
                    _axpy(barred, x, d * cb)
            if barred != col:
                raise InternalAssertion(f"C_{g.name(w)} is not bar-invariant")

    def mu_coefficient(self, y: int, w: int) -> int:
        return self.mu[w].get(y, 0)

    def c_in_t(self, w: int) -> HeckeElt:
        return HeckeElt(self.group, "T", self.p[w], self)

    # -- left action of C_s in the C-basis ---------------------------------
    @cached_property
    def left_action(self) -> list[list[list[tuple[int, LaurentPoly]]]]:
        """left_action[s][y]: C_s C_y as a list of (z, coefficient)."""
        g = self.group
        out = []
        for s in range(g.rank):
            rows = []
            for y in g:
                sy = g.left_mul[y][s]
                if g.length[sy] < g.length[y]:
                    rows.append([(y, V_PLUS_VINV)])
                else:
                    row = [(sy, ONE)]
                    for z, m in self.mu[y].items():
                        if g.length[g.left_mul[z][s]] < g.length[z]:
                            row.append((z, LaurentPoly.const(m)))
                    rows.append(row)
            out.append(rows)
        return out

    @cached_property
    def right_action(self) -> list[list[list[tuple[int, LaurentPoly]]]]:
        """right_action[s][y]: C_y C_s as a list of (z, coefficient)."""
        g = self.group
        inv = g.inverse
        out = []
        for s, rows in enumerate(self.left_action):
            # C_y C_s is the image of C_s C_{y^-1} under the anti-involution C_w -> C_{w^-1}
            out.append([[(inv[z], c) for z, c in rows[inv[y]]] for y in g])
        return out

    def _apply(self, action, vec: Mapping[int, Scalar]) -> dict:
        out: dict = {}
        for y, c in vec.items():
            for z, k in action[y]:
                _axpy(out, z, k * c)
        return out

    # -- structure constants -----------------------------------------------
    @cached_property
    def h(self) -> list[list[dict[int, LaurentPoly]]]:
        """h[w][w'] = {w'': h_{w,w',w''}} with C_w C_w' = sum h C_w''."""
        g = self.group
        n = len(g)
        log.info("structure constants for %s (|W|=%d)", g.label, n)
        lm, ln = g.left_mul, g.length
        h: list = [None] * n
        h[0] = [{w: ONE} for w in range(n)]
        for w in range(1, n):
            s = g.words[w][0]
            x = lm[w][s]
            act = self.left_action[s]
            corr = [(z, m) for z, m in self.mu[x].items() if ln[lm[z][s]] < ln[z]]
            hx = h[x]
            row = []
            for w2 in range(n):
                vec: dict = {}
                for y, c in hx[w2].items():
                    for z, k in act[y]:
                        _axpy(vec, z, k * c)
                for z, m in corr:
                    for y, c in h[z][w2].items():
                        _axpy(vec, y, c * (-m))
                row.append(vec)
            h[w] = row
        return h

    def c_mul(self, a: HeckeElt, b: HeckeElt) -> HeckeElt:
        """Product of C-basis elements via the structure constants."""
        out: dict = {}
        h = self.h
        for x, c in a.coeffs.items():
            for y, d in b.coeffs.items():
                cd = c * d
                for z, k in h[x][y].items():
                    _axpy(out, z, k * cd)
        return HeckeElt(self.group, "C", out, self)

    # -- a-function, gamma, distinguished involutions ----------------------
    @cached_property
    def a(self) -> list[int]:
        """a(w) = -(lowest exponent occurring in any h_{x,y,w})."""
        n = len(self.group)
        low = [0] * n
        for row in self.h:
            for vec in row:
                for z, c in vec.items():
                    if c.low < low[z]:
                        low[z] = c.low
        return [-x for x in low]

    @cached_property
    def gamma(self) -> dict[tuple[int, int], dict[int, int]]:
        """gamma[(w, w')][w''] = (v^a(w'') h_{w,w',w''^-1}) at v = 0; zeros omitted."""
        g = self.group
        a, inv = self.a, g.inverse
        out: dict[tuple[int, int], dict[int, int]] = {}
        for w, row in enumerate(self.h):
            for w2, vec in enumerate(row):
                entry = {}
                for z, c in vec.items():
                    w3 = inv[z]
                    if c.low < -a[w3]:
                        raise InternalAssertion(
                            f"v^a({g.name(w3)}) h_({g.name(w)},{g.name(w2)},{g.name(z)}) has a pole at v=0"
                        )
                    k = c.coeff(-a[w3])
                    if k:
                        entry[w3] = k
                if entry:
                    out[(w, w2)] = entry
        return out

    @cached_property
    def delta(self) -> list[tuple[int, int]]:
        """(Delta(z), n_z) with p_{1,z} = n_z v^-Delta(z) + lower powers."""
        out = []
        for z in self.group:
            c = self.p[z][self.group.identity]
            out.append((-c.high, c.c[-1]))
        return out

    @cached_property
    def distinguished(self) -> list[int]:
        """Distinguished involutions: Delta(z) = a(z)."""
        g = self.group
        d = [z for z in g if self.delta[z][0] == self.a[z]]
        for z in d:
            if g.inverse[z] != z:
                raise InternalAssertion(f"distinguished element {g.name(z)} is not an involution")
        return d

    # -- cells -------------------------------------------------------------
    def _cells(self, left: bool, right: bool) -> list[list[int]]:
        n = len(self.group)
        rows, cols = [], []
        for w, row in enumerate(self.h):
            for w2, vec in enumerate(row):
                for z in vec:
                    # z <=_L w2 when it occurs in C_w C_w2; z <=_R w likewise
                    if left:
                        rows.append(w2)
                        cols.append(z)
                    if right:
                        rows.append(w)
                        cols.append(z)
        graph = coo_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n)).tocsr()
        _, labels = connected_components(graph, directed=True, connection="strong")
        groups: dict[int, list[int]] = {}
        for x, lab in enumerate(labels):
            groups.setdefault(int(lab), []).append(x)
        return sorted(groups.values())

    @cached_property
    def left_cells(self) -> list[list[int]]:
        return self._cells(True, False)

    @cached_property
    def right_cells(self) -> list[list[int]]:
        return self._cells(False, True)

    @cached_property
    def two_sided_cells(self) -> list[list[int]]:
        return self._cells(True, True)

    def cell_index(self, kind: str) -> list[int]:
        cells = {"left": self.left_cells, "right": self.right_cells, "two-sided": self.two_sided_cells}[kind]
        out = [0] * len(self.group)
        for k, cell in enumerate(cells):
            for x in cell:
                out[x] = k
        return out

    # -- basis changes -----------------------------------------------------
    def to_t(self, elt: HeckeElt) -> HeckeElt:
        if elt.basis == "T":
            return elt
        if elt.is_rational():
            nums, den = _clear(elt.coeffs)
            return HeckeElt(self.group, "T", _restore(self._c_to_t(nums), den), self)
        return HeckeElt(self.group, "T", self._c_to_t(elt.coeffs), self)

    def _c_to_t(self, coeffs: Mapping[int, Scalar]) -> dict:
        out: dict = {}
        for w, c in coeffs.items():
            for y, d in self.p[w].items():
                _axpy(out, y, d * c)
        return out

    def to_c(self, elt: HeckeElt) -> HeckeElt:
        """Re-express a T-basis element in the C-basis (triangular solve)."""
        if elt.basis == "C":
            return elt
        if elt.is_rational():
            nums, den = _clear(elt.coeffs)
            out = self._t_to_c(nums)
            return HeckeElt(self.group, "C", _restore(out, den), self)
        return HeckeElt(self.group, "C", self._t_to_c(elt.coeffs), self)

    def _t_to_c(self, coeffs: Mapping[int, Scalar]) -> dict:
        rest = dict(coeffs)
        out = {}
        # ids increase with length, so the largest id is a maximal element
        while rest:
            w = max(rest)
            c = rest[w]
            out[w] = c
            for y, d in self.p[w].items():
                _axpy(rest, y, d * (-c))
        return out


def kl_basis(group: CoxGroup, check: bool = True) -> KLData:
    return KLData(group, check=check)


def structure_constants(group: CoxGroup, kl: KLData):
    return kl.h


def a_function(kl: KLData) -> list[int]:
    return kl.a


def gamma_constants(kl: KLData) -> dict[tuple[int, int], dict[int, int]]:
    return kl.gamma


def distinguished_involutions(kl: KLData) -> list[int]:
    return kl.distinguished


def cells(kl: KLData) -> dict[str, list[list[int]]]:
    return {"left": kl.left_cells, "right": kl.right_cells, "two-sided": kl.two_sided_cells}
