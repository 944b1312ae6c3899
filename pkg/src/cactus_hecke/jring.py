"""Lusztig's asymptotic ring J and the homomorphism psi: H -> Z[v, v^-1] J.

The product follows Lusztig's normalization t_x t_y = sum_z gamma_{x,y,z} t_{z^-1}
where gamma_{x,y,z} is the v^a(z) coefficient extracted from h_{x,y,z^-1}.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Mapping

import networkx as nx

from .coxeter import CoxGroup
from .hecke import HeckeElt, KLData, _axpy, _clean, _clear, _restore
from .ring import LaurentPoly, RatFunc, RF_ZERO, Scalar, scalar_to_json, specialize

log = logging.getLogger(__name__)


class IdentityCheckFailed(AssertionError):
    pass


class SingularPsi(ArithmeticError):
    pass


class NotMonomial(AssertionError):
    """A product expected to be a signed basis vector is not one."""


def _promote(c):
    """Scalar tag promotion int -> LaurentPoly -> RatFunc (one-way)."""
    if isinstance(c, int):
        return LaurentPoly.const(c)
    return c


@dataclass(frozen=True, eq=False)
class JElt:
    """A finite sum of t_w with int, Laurent or rational coefficients."""

    group: CoxGroup
    coeffs: Mapping[int, Scalar]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _clean(self.coeffs))

    @classmethod
    def basis(cls, group: CoxGroup, w: int, c: Scalar = 1) -> "JElt":
        return cls(group, {w: c})

    def __add__(self, other: "JElt") -> "JElt":
        out = dict(self.coeffs)
        for x, c in other.coeffs.items():
            _axpy(out, x, c)
        return JElt(self.group, out)

    def __neg__(self) -> "JElt":
        return JElt(self.group, {x: -c for x, c in self.coeffs.items()})

    def __sub__(self, other: "JElt") -> "JElt":
        return self + (-other)

    def scale(self, c: Scalar) -> "JElt":
        return JElt(self.group, {x: y * c for x, y in self.coeffs.items()})

    def __eq__(self, other):
        if not isinstance(other, JElt):
            return NotImplemented
        if self.coeffs.keys() != other.coeffs.keys():
            return False
        return all(self.coeffs[k] == other.coeffs[k] for k in self.coeffs)

    def __hash__(self):
        return hash(frozenset(self.coeffs))

    def is_integral(self) -> bool:
        return all(isinstance(c, int) for c in self.coeffs.values())

    def specialize(self, point: int) -> "JElt":
        """Coefficientwise value at v = point; raises on a pole."""
        out = {}
        for x, c in self.coeffs.items():
            val = specialize(c, point)
            if val:
                out[x] = int(val) if val.denominator == 1 else val
        return JElt(self.group, out)

    def monomial(self) -> tuple[int, Scalar] | None:
        """(w, c) if this is c*t_w, else None."""
        if len(self.coeffs) != 1:
            return None
        return next(iter(self.coeffs.items()))

    def to_json(self) -> dict:
        return {f"t_{self.group.name(x)}": scalar_to_json(c) for x, c in sorted(self.coeffs.items())}

    def __repr__(self):
        if not self.coeffs:
            return "0"
        return " + ".join(f"({c})*t[{self.group.name(x)}]" for x, c in sorted(self.coeffs.items()))


class JRing:
    """The J-ring of a finite Coxeter group together with psi and its inverse."""

    def __init__(self, kl: KLData, check: bool = True):
        self.kl = kl
        self.group = kl.group
        if check:
            self.j_identity()

    # -- multiplication ----------------------------------------------------
    @cached_property
    def table(self) -> dict[tuple[int, int], dict[int, int]]:
        """(x, y) -> {z: coefficient of t_z in t_x t_y}."""
        inv = self.group.inverse
        return {key: {inv[w3]: k for w3, k in entry.items()} for key, entry in self.kl.gamma.items()}

    @cached_property
    def _rows(self) -> dict[int, list[tuple[int, dict[int, int]]]]:
        rows: dict[int, list] = {}
        for (x, y), entry in self.table.items():
            rows.setdefault(x, []).append((y, entry))
        return rows

    def mul(self, a: JElt, b: JElt) -> JElt:
        table = self.table
        out: dict = {}
        for x, c in a.coeffs.items():
            for y, d in b.coeffs.items():
                entry = table.get((x, y))
                if entry:
                    cd = c * d
                    for z, k in entry.items():
                        _axpy(out, z, cd * k)
        return JElt(self.group, out)

    def t(self, w: int, c: Scalar = 1) -> JElt:
        return JElt(self.group, {w: c})

    def j_identity(self) -> JElt:
        """sum_{d in D} t_d, checked to be a two-sided identity."""
        one = JElt(self.group, {d: 1 for d in self.kl.distinguished})
        for w in self.group:
            tw = self.t(w)
            if self.mul(one, tw) != tw or self.mul(tw, one) != tw:
                raise IdentityCheckFailed(f"sum of t_d is not an identity on t_{self.group.name(w)}")
        return one

    @cached_property
    def one(self) -> JElt:
        return JElt(self.group, {d: 1 for d in self.kl.distinguished})

    # -- psi ---------------------------------------------------------------
    @cached_property
    def psi_columns(self) -> list[dict[int, LaurentPoly]]:
        """psi(C_w) = sum_y psi_columns[w][y] t_y."""
        kl = self.kl
        a = kl.a
        dist = kl.distinguished
        cols = []
        for w in self.group:
            col: dict = {}
            row = kl.h[w]
            for d in dist:
                for y, c in row[d].items():
                    if a[y] == a[d]:
                        _axpy(col, y, c)
            cols.append(col)
        return cols

    def psi(self, h: HeckeElt) -> JElt:
        if h.is_rational():
            nums, den = _clear(h.coeffs)
            if h.basis == "T":
                nums = self.kl._t_to_c(nums)
            return JElt(self.group, _restore(self.psi_laurent(nums), den))
        if h.basis == "T":
            h = self.kl.to_c(h)
        return JElt(self.group, self.psi_laurent(h.coeffs))

    def psi_laurent(self, coeffs: Mapping[int, Scalar]) -> dict:
        """psi on a C-basis coefficient vector, without any normalization."""
        out: dict = {}
        cols = self.psi_columns
        for w, c in coeffs.items():
            for y, k in cols[w].items():
                _axpy(out, y, k * c)
        return out

    @cached_property
    def psi_matrix(self) -> "PsiMatrix":
        return PsiMatrix(self.group, self.psi_columns)

    def psi_invert(self, target: JElt) -> HeckeElt:
        coeffs = self.psi_matrix.solve(target.coeffs)
        return HeckeElt(self.group, "C", coeffs, self.kl)

    # -- the longest element ------------------------------------------------
    def theorem_element(self) -> JElt:
        """sum_{d in D} (-1)^(l(w0) + a(w0 d)) t_{w0 d}.

        It agrees with ``longest_image`` only when l(w0) + a(w0 d) + a(d) is
        even for every d in D; on A2, A4, H3 and I2(odd m) it does not.
        """
        g, a = self.group, self.kl.a
        w0 = g.longest
        out = {}
        for d in self.kl.distinguished:
            x = g.mul(w0, d)
            out[x] = (-1) ** ((g.length[w0] + a[x]) % 2)
        return JElt(g, out)

    @cached_property
    def longest_image(self) -> JElt:
        """The integral element t with psi^-1(t) - T_w0 in (v-1)H: psi(T_w0) at v=1."""
        g = self.group
        img = self.psi(HeckeElt.basis_element(g, g.longest, "T", self.kl))
        out = {}
        for y, c in img.coeffs.items():
            val = c.eval_at(1)
            if val:
                out[y] = int(val)
        return JElt(g, out)

    def sigma(self, w: int, element: JElt | None = None, side: str = "left") -> tuple[int, int]:
        """(sigma_W(w), sign) from f(gamma_S) t_w = sign * t_sigma(w).

        With side="right" the product t_w f(gamma_S) is decomposed instead and
        the returned element is the label of its single basis vector.
        """
        element = self.longest_image if element is None else element
        tw = self.t(w)
        prod = self.mul(element, tw) if side == "left" else self.mul(tw, element)
        mono = prod.monomial()
        if mono is None or mono[1] not in (1, -1):
            raise NotMonomial(f"f(gamma_S) t_{self.group.name(w)} = {prod} is not a signed basis vector")
        return mono[0], mono[1]

    @cached_property
    def sigma_table(self) -> list[tuple[int, int]]:
        return [self.sigma(w) for w in self.group]


class PsiMatrix:
    """The matrix of psi (rows t_y, columns C_w) with cached block inverses.

    The matrix is block triangular after ordering the strongly connected
    components of its support graph; each diagonal block is inverted once over
    Q(v) by Gauss-Jordan elimination.
    """

    def __init__(self, group: CoxGroup, columns: list[dict[int, LaurentPoly]]):
        self.group = group
        self.columns = columns
        n = len(group)
        graph = nx.DiGraph()
        graph.add_nodes_from(range(n))
        for w, col in enumerate(columns):
            if w not in col:
                raise SingularPsi(f"zero diagonal entry at {group.name(w)}")
            for y in col:
                if y != w:
                    graph.add_edge(w, y)
        cond = nx.condensation(graph)
        order = list(nx.lexicographical_topological_sort(cond, key=lambda c: min(cond.nodes[c]["members"])))
        self.blocks = [sorted(cond.nodes[c]["members"]) for c in order]
        self.rows: dict[int, dict[int, LaurentPoly]] = {y: {} for y in range(n)}
        for w, col in enumerate(columns):
            for y, c in col.items():
                self.rows[y][w] = c
        self.inverses = [self._invert_block(b) for b in self.blocks]
        log.debug("psi matrix: %d blocks, largest %d", len(self.blocks), max(map(len, self.blocks)))

    def _invert_block(self, block: list[int]) -> list[list[RatFunc]]:
        k = len(block)
        pos = {w: i for i, w in enumerate(block)}
        m = [[RF_ZERO] * k + [RatFunc.of(1) if i == j else RF_ZERO for j in range(k)] for i in range(k)]
        for y in block:
            for w, c in self.rows[y].items():
                if w in pos:
                    m[pos[y]][pos[w]] = RatFunc.of(c)
        for col in range(k):
            piv = None
            best = None
            for r in range(col, k):
                x = m[r][col]
                if x:
                    size = len(x.num) + len(x.den)
                    if best is None or size < best:
                        piv, best = r, size
            if piv is None:
                raise SingularPsi(f"psi block {[self.group.name(w) for w in block]} is singular")
            m[col], m[piv] = m[piv], m[col]
            pinv = m[col][col].inv()
            m[col] = [x * pinv if x else x for x in m[col]]
            for r in range(k):
                if r != col and m[r][col]:
                    f = m[r][col]
                    m[r] = [x - f * y if y else x for x, y in zip(m[r], m[col])]
        return [row[k:] for row in m]

    def entry(self, y: int, w: int) -> LaurentPoly:
        return self.columns[w].get(y, LaurentPoly())

    def solve(self, target: Mapping[int, Scalar]) -> dict[int, RatFunc]:
        """x with psi(sum x_w C_w) = sum target_y t_y."""
        x: dict[int, RatFunc] = {}
        for block, inv in zip(self.blocks, self.inverses):
            rhs = []
            for y in block:
                acc = RatFunc.of(target.get(y, 0))
                for w, c in self.rows[y].items():
                    xw = x.get(w)
                    if xw is not None and w not in block:
                        acc = acc - xw * c
                rhs.append(acc)
            for i, w in enumerate(block):
                val = RF_ZERO
                for f, r in zip(inv[i], rhs):
                    if f and r:
                        val = val + f * r
                if val:
                    x[w] = val
        return x

    def to_json(self) -> dict:
        g = self.group
        return {
            "rows": [g.name(y) for y in g],
            "columns": [g.name(w) for w in g],
            "entries": [
                {"t": g.name(y), "C": g.name(w), "value": c.to_json()}
                for w, col in enumerate(self.columns)
                for y, c in sorted(col.items())
            ],
        }


def j_mul(ring: JRing, a: JElt, b: JElt) -> JElt:
    return ring.mul(a, b)


def j_identity(ring: JRing) -> JElt:
    return ring.j_identity()


def psi(ring: JRing, h: HeckeElt) -> JElt:
    return ring.psi(h)


def build_psi_matrix(ring: JRing) -> PsiMatrix:
    return ring.psi_matrix


def psi_invert(ring: JRing, target: JElt) -> HeckeElt:
    return ring.psi_invert(target)


def theorem_element(ring: JRing) -> JElt:
    return ring.theorem_element()


def sigma(ring: JRing, w: int) -> tuple[int, int]:
    return ring.sigma(w)
