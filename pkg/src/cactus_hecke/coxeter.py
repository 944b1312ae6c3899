"""Finite Coxeter groups from their Coxeter matrix.

Elements are dense integer ids ordered by ShortLex on their canonical words,
so id 0 is the identity and ids increase with length.  The group is built by
coset enumeration of the Coxeter presentation over the trivial subgroup;
nothing beyond the matrix itself is needed, which keeps non-crystallographic
types (H3, H4, I2(m)) on the same footing as the Weyl groups.
"""
from __future__ import annotations

import json
import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from math import factorial, prod
from pathlib import Path
from typing import Iterable, Literal, Sequence

Side = Literal["left", "right"]


class GroupTooLarge(RuntimeError):
    """Coset enumeration went over the element budget."""


class UnknownType(ValueError):
    pass


class MalformedMatrixFile(ValueError):
    pass


class NotASubsetOfS(AssertionError):
    pass


@dataclass(frozen=True)
class CoxeterMatrix:
    m: tuple[tuple[int, ...], ...]
    label: str | None = field(default=None, compare=False)

    def __post_init__(self):
        n = len(self.m)
        for i, row in enumerate(self.m):
            if len(row) != n:
                raise ValueError("Coxeter matrix must be square")
            for j, x in enumerate(row):
                if not isinstance(x, int):
                    raise ValueError(f"entry m[{i}][{j}] = {x!r} is not an integer (infinity is not supported)")
                if i == j and x != 1:
                    raise ValueError("diagonal entries must be 1")
                if i != j and (x < 2 or x != self.m[j][i]):
                    raise ValueError(f"bad off-diagonal entry m[{i}][{j}] = {x}")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]], label: str | None = None) -> "CoxeterMatrix":
        return cls(tuple(tuple(int(x) for x in r) for r in rows), label)

    @property
    def size(self) -> int:
        return len(self.m)

    def restrict(self, subset: Sequence[int]) -> "CoxeterMatrix":
        return CoxeterMatrix(tuple(tuple(self.m[i][j] for j in subset) for i in subset))

    def components(self, subset: Iterable[int] | None = None) -> list[list[int]]:
        """Connected components of the Coxeter diagram restricted to subset."""
        todo = sorted(range(self.size) if subset is None else subset)
        left = set(todo)
        comps = []
        for s in todo:
            if s not in left:
                continue
            comp, stack = [], [s]
            left.discard(s)
            while stack:
                a = stack.pop()
                comp.append(a)
                for b in list(left):
                    if self.m[a][b] > 2:
                        left.discard(b)
                        stack.append(b)
            comps.append(sorted(comp))
        return comps

    def to_json(self) -> dict:
        return {"size": self.size, "m": [list(r) for r in self.m]}


# --------------------------------------------------------------------------
# recognized types


def _chain(n: int, labels: dict[tuple[int, int], int]) -> list[list[int]]:
    m = [[1 if i == j else 2 for j in range(n)] for i in range(n)]
    for i in range(n - 1):
        m[i][i + 1] = m[i + 1][i] = 3
    for (i, j), x in labels.items():
        m[i][j] = m[j][i] = x
    return m


def _irreducible(label: str) -> tuple[list[list[int]], int]:
    """Coxeter matrix and group order for one irreducible label."""
    mt = re.fullmatch(r"I2\((\d+)\)", label)
    if mt:
        k = int(mt.group(1))
        if k < 2:
            raise UnknownType(label)
        return [[1, k], [k, 1]], 2 * k
    mt = re.fullmatch(r"([ABCDEFGH])(\d+)", label)
    if not mt:
        raise UnknownType(f"unrecognized Coxeter type {label!r}")
    t, n = mt.group(1), int(mt.group(2))
    if t == "A" and n >= 1:
        return _chain(n, {}), factorial(n + 1)
    if t in "BC" and n >= 2:
        return _chain(n, {(n - 2, n - 1): 4}), 2**n * factorial(n)
    if t == "D" and n >= 4:
        m = _chain(n, {})
        # branch: node n-1 attaches to n-3 instead of n-2
        m[n - 2][n - 1] = m[n - 1][n - 2] = 2
        m[n - 3][n - 1] = m[n - 1][n - 3] = 3
        return m, 2 ** (n - 1) * factorial(n)
    if t == "E" and n in (6, 7, 8):
        m = _chain(n - 1, {})
        m = [r + [2] for r in m] + [[2] * (n - 1) + [1]]
        m[2][n - 1] = m[n - 1][2] = 3
        return m, {6: 51840, 7: 2903040, 8: 696729600}[n]
    if t == "F" and n == 4:
        return _chain(4, {(1, 2): 4}), 1152
    if t == "G" and n == 2:
        return [[1, 6], [6, 1]], 12
    if t == "H" and n in (3, 4):
        return _chain(n, {(0, 1): 5}), {3: 120, 4: 14400}[n]
    raise UnknownType(f"unrecognized Coxeter type {label!r}")


def expected_order(label: str) -> int:
    return prod(_irreducible(part)[1] for part in _split_label(label))


def _split_label(label: str) -> list[str]:
    parts = [p.strip() for p in re.split(r"[x×*]", label.replace(" ", "")) if p.strip()]
    if not parts:
        raise UnknownType(f"empty Coxeter type {label!r}")
    return parts


def parse_group_spec(spec: str) -> CoxeterMatrix:
    """Type label such as ``"B3"``, ``"I2(5)"``, ``"A1xA1"``, or a JSON file path.

    >>> parse_group_spec("A1xA1").m
    ((1, 2), (2, 1))
    """
    path = Path(spec)
    if spec.endswith(".json") or path.is_file():
        return load_matrix_file(path)
    blocks = [_irreducible(p)[0] for p in _split_label(spec)]
    n = sum(len(b) for b in blocks)
    m = [[1 if i == j else 2 for j in range(n)] for i in range(n)]
    off = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, x in enumerate(row):
                m[off + i][off + j] = x
        off += len(b)
    return CoxeterMatrix.from_rows(m, label=spec)


def load_matrix_file(path: str | Path) -> CoxeterMatrix:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedMatrixFile(f"{path}: {exc}") from exc
    if isinstance(data, dict) and "type" in data:
        return parse_group_spec(str(data["type"]))
    try:
        rows = data["m"]
        if "size" in data and int(data["size"]) != len(rows):
            raise MalformedMatrixFile(f"{path}: size does not match matrix")
        return CoxeterMatrix.from_rows(rows, label=data.get("label"))
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedMatrixFile(f"{path}: {exc}") from exc


# --------------------------------------------------------------------------
# coset enumeration


def _coset_table(ngens: int, relators: list[list[int]], budget: int) -> list[list[int]]:
    """HLT coset enumeration over the trivial subgroup, all generators involutions.

    Returns the compacted table: table[c][s] = c.s, coset 0 = identity.
    """
    table: list[list[int | None]] = [[None] * ngens]
    parent = [0]

    def find(c: int) -> int:
        root = c
        while parent[root] != root:
            root = parent[root]
        while parent[c] != root:
            parent[c], c = root, parent[c]
        return root

    def new_coset() -> int:
        if len(table) >= budget:
            raise GroupTooLarge(f"coset enumeration exceeded {budget} cosets")
        table.append([None] * ngens)
        parent.append(len(parent))
        return len(table) - 1

    def merge(a: int, b: int, queue: deque) -> None:
        a, b = find(a), find(b)
        if a != b:
            if a > b:
                a, b = b, a
            parent[b] = a
            queue.append(b)

    def coincidence(a: int, b: int) -> None:
        queue: deque = deque()
        merge(a, b, queue)
        while queue:
            e = queue.popleft()
            for s in range(ngens):
                f = table[e][s]
                if f is None:
                    continue
                table[e][s] = None
                if table[f][s] == e:
                    table[f][s] = None
                e1, f1 = find(e), find(f)
                if table[e1][s] is not None:
                    merge(f1, table[e1][s], queue)
                elif table[f1][s] is not None:
                    merge(e1, table[f1][s], queue)
                else:
                    table[e1][s] = f1
                    table[f1][s] = e1

    def scan_and_fill(c: int, rel: list[int]) -> None:
        f, i = c, 0
        b, j = c, len(rel) - 1
        while True:
            while i <= j and table[f][rel[i]] is not None:
                f = table[f][rel[i]]
                i += 1
            if i > j:
                if f != b:
                    coincidence(f, b)
                return
            while j >= i and table[b][rel[j]] is not None:
                b = table[b][rel[j]]
                j -= 1
            if j < i:
                coincidence(f, b)
                return
            if i == j:
                table[f][rel[i]] = b
                table[b][rel[i]] = f
                return
            d = new_coset()
            table[f][rel[i]] = d
            table[d][rel[i]] = f

    c = 0
    while c < len(table):
        for rel in relators:
            if find(c) != c:
                break
            scan_and_fill(c, rel)
        if find(c) == c:
            for s in range(ngens):
                if table[c][s] is None:
                    d = new_coset()
                    table[c][s] = d
                    table[d][s] = c
        c += 1

    live = [c for c in range(len(table)) if find(c) == c]
    index = {c: k for k, c in enumerate(live)}
    return [[index[find(table[c][s])] for s in range(ngens)] for c in live]


# --------------------------------------------------------------------------


class CoxGroup:
    """A finite Coxeter group with complete multiplication-by-generator tables."""

    def __init__(self, matrix: CoxeterMatrix, words: list[tuple[int, ...]], right_mul: list[list[int]]):
        self.matrix = matrix
        self.rank = matrix.size
        self.words = words
        self.right_mul = right_mul
        self.length = [len(w) for w in words]
        self._word_index = {w: i for i, w in enumerate(words)}
        n = len(words)
        self.inverse = [self.element(tuple(reversed(w))) for w in words]
        self.left_mul = [[self.inverse[right_mul[self.inverse[x]][s]] for s in range(self.rank)] for x in range(n)]
        self.identity = 0
        self.longest = max(range(n), key=lambda x: self.length[x])
        self._mul_cache: dict[tuple[int, int], int] = {}

    def __len__(self) -> int:
        return len(self.words)

    def __iter__(self):
        return iter(range(len(self.words)))

    def __repr__(self) -> str:
        label = self.matrix.label or f"rank {self.rank}"
        return f"<CoxGroup {label}, order {len(self)}>"

    @property
    def label(self) -> str:
        return self.matrix.label or "W"

    # -- elements --------------------------------------------------------
    def element(self, word: Iterable[int]) -> int:
        """Element represented by an arbitrary (not necessarily reduced) word."""
        x = 0
        rm = self.right_mul
        for s in word:
            x = rm[x][s]
        return x

    def word(self, x: int) -> tuple[int, ...]:
        return self.words[x]

    def name(self, x: int) -> str:
        """Rendering used in reports: ``"s1 s2 s1"``; the identity is ``"1"``."""
        w = self.words[x]
        return " ".join(f"s{s + 1}" for s in w) if w else "1"

    def parse_name(self, name: str) -> int:
        name = name.strip()
        if name in ("", "1", "e"):
            return 0
        return self.element(int(tok[1:]) - 1 for tok in name.split())

    def mul(self, a: int, b: int) -> int:
        key = (a, b)
        r = self._mul_cache.get(key)
        if r is None:
            r = a
            rm = self.right_mul
            for s in self.words[b]:
                r = rm[r][s]
            self._mul_cache[key] = r
        return r

    def inv(self, a: int) -> int:
        return self.inverse[a]

    def len(self, a: int) -> int:
        return self.length[a]

    def descents(self, a: int, side: Side = "left") -> frozenset[int]:
        tab = self.left_mul if side == "left" else self.right_mul
        la = self.length[a]
        return frozenset(s for s in range(self.rank) if self.length[tab[a][s]] < la)

    def first_left_descent(self, a: int) -> int:
        return self.words[a][0]

    # -- parabolic subgroups ---------------------------------------------
    @cached_property
    def _parabolic_cache(self) -> dict:
        return {}

    def parabolic(self, subset: Iterable[int]) -> tuple[list[int], int]:
        """Elements of W_I (sorted by id) and the longest element w_I."""
        key = frozenset(subset)
        hit = self._parabolic_cache.get(key)
        if hit is not None:
            return hit
        seen = {0}
        queue = deque([0])
        gens = sorted(key)
        while queue:
            x = queue.popleft()
            for s in gens:
                y = self.right_mul[x][s]
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        elems = sorted(seen)
        w_i = max(elems, key=lambda x: self.length[x])
        self._parabolic_cache[key] = (elems, w_i)
        return elems, w_i

    def longest_of(self, subset: Iterable[int]) -> int:
        return self.parabolic(subset)[1]

    def coset_decompose(self, subset: Iterable[int], w: int, side: Side = "left") -> tuple[int, int]:
        """Length-additive factorization through W_I.

        side="left":  w = x*y with x in W_I and y minimal in W_I w.
        side="right": w = y*x with x in W_I and y minimal in w W_I.
        Returns (x, y).
        """
        gens = frozenset(subset)
        y = w
        if side == "left":
            # strip left descents in I
            while True:
                for s in gens:
                    z = self.left_mul[y][s]
                    if self.length[z] < self.length[y]:
                        y = z
                        break
                else:
                    break
            x = self.mul(w, self.inverse[y])
        else:
            while True:
                for s in gens:
                    z = self.right_mul[y][s]
                    if self.length[z] < self.length[y]:
                        y = z
                        break
                else:
                    break
            x = self.mul(self.inverse[y], w)
        return x, y

    def conjugate_subset(self, j_subset: Iterable[int], i_subset: Iterable[int]) -> frozenset[int]:
        """{ w_J s w_J : s in I } as a set of generator indices."""
        j_subset = frozenset(j_subset)
        i_subset = frozenset(i_subset)
        if not i_subset <= j_subset:
            raise ValueError("I must be a subset of J")
        w_j = self.longest_of(j_subset)
        out = set()
        for s in i_subset:
            t = self.mul(self.mul(w_j, self.element((s,))), w_j)
            if self.length[t] != 1:
                raise NotASubsetOfS(f"conjugate of s{s + 1} by w_J is not a simple reflection")
            out.add(self.words[t][0])
        return frozenset(out)

    def subsets(self) -> list[frozenset[int]]:
        """All subsets of S, ordered by size then lexicographically."""
        return [frozenset(c) for k in range(self.rank + 1) for c in combinations(range(self.rank), k)]

    def is_irreducible_subset(self, subset: Iterable[int]) -> bool:
        subset = sorted(subset)
        return bool(subset) and len(self.matrix.components(subset)) == 1

    def subset_name(self, subset: Iterable[int]) -> str:
        subset = sorted(subset)
        return "{" + ",".join(f"s{s + 1}" for s in subset) + "}"


def build_group(matrix: CoxeterMatrix, max_size: int = 50000) -> CoxGroup:
    """Enumerate W from its Coxeter matrix, or raise GroupTooLarge."""
    n = matrix.size
    relators = [[s, s] for s in range(n)]
    for s in range(n):
        for t in range(s + 1, n):
            relators.append([s, t] * matrix.m[s][t])
    if n == 0:
        return CoxGroup(matrix, [()], [[]])
    if matrix.label:
        try:
            known = expected_order(matrix.label)
        except UnknownType:
            known = None
        if known is not None and known > max_size:
            raise GroupTooLarge(f"{matrix.label} has {known} elements, over the budget max_size={max_size}")
    budget = max(64, 8 * max_size)
    table = _coset_table(n, relators, budget)
    if len(table) > max_size:
        raise GroupTooLarge(f"group has {len(table)} elements, over the budget max_size={max_size}")

    # relabel in ShortLex order: BFS in generator order from the identity
    words: list[tuple[int, ...]] = [()]
    order = {0: 0}
    queue = deque([0])
    while queue:
        c = queue.popleft()
        base = words[order[c]]
        for s in range(n):
            d = table[c][s]
            if d not in order:
                order[d] = len(words)
                words.append(base + (s,))
                queue.append(d)
    right_mul = [[0] * n for _ in words]
    for c, k in order.items():
        for s in range(n):
            right_mul[k][s] = order[table[c][s]]
    group = CoxGroup(matrix, words, right_mul)
    if matrix.label:
        try:
            expected = expected_order(matrix.label)
        except UnknownType:
            expected = None
        if expected is not None and expected != len(group):
            raise AssertionError(f"{matrix.label}: enumerated {len(group)} elements, expected {expected}")
    return group


def group_from_spec(spec: str, max_size: int = 50000) -> CoxGroup:
    return build_group(parse_group_spec(spec), max_size=max_size)
