"""Permutations, ordered-table bijections and the homogeneous bar resolution
of symmetric groups.

Permutations are one-line tuples of 1-based images: ``w[k-1] == w(k)``.
The contraction maps delete a column from the table of values of a bijection
and read the result off through the induced orders; the dummy placeholder
left behind by a pair contraction keeps the rank of the slot it replaces.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations


Perm = tuple  # one-line notation, images of 1..r


def identity(r: int) -> Perm:
    return tuple(range(1, r + 1))


def compose(u: Perm, v: Perm) -> Perm:
    """(u o v)(k) = u(v(k))."""
    return tuple(u[x - 1] for x in v)


def inverse(w: Perm) -> Perm:
    inv = [0] * len(w)
    for pos, img in enumerate(w, start=1):
        inv[img - 1] = pos
    return tuple(inv)


def sign(w: Perm) -> int:
    seen = [False] * len(w)
    s = 1
    for start in range(1, len(w) + 1):
        if seen[start - 1]:
            continue
        length = 0
        k = start
        while not seen[k - 1]:
            seen[k - 1] = True
            k = w[k - 1]
            length += 1
        if length % 2 == 0:
            s = -s
    return s


def all_perms(r: int):
    """All of Sigma_r in lexicographic order."""
    return [tuple(p) for p in permutations(range(1, r + 1))]


def perm_to_str(w: Perm) -> str:
    return " ".join(map(str, w))


def perm_from_str(text: str) -> Perm:
    w = tuple(int(x) for x in text.split())
    if sorted(w) != list(range(1, len(w) + 1)):
        raise ValueError(f"not a permutation: {text!r}")
    return w


@dataclass(frozen=True)
class Bijection:
    """A bijection between two ordered label lists, as a table of values."""

    domain: tuple
    codomain: tuple
    table: tuple  # pairs (x, y), one per domain element

    def __post_init__(self):
        d = dict(self.table)
        if len(self.domain) != len(self.codomain):
            raise ValueError("domain and codomain sizes differ")
        if set(d) != set(self.domain) or set(d.values()) != set(self.codomain):
            raise ValueError("table is not a bijection between the given sets")

    def as_perm(self) -> Perm:
        """Read the table through the fixed orderings of domain and codomain."""
        dpos = {x: k for k, x in enumerate(self.domain, start=1)}
        cpos = {y: k for k, y in enumerate(self.codomain, start=1)}
        images = [0] * len(self.domain)
        for x, y in self.table:
            images[dpos[x] - 1] = cpos[y]
        return tuple(images)


def contract_pair(w: Perm, i: int, j: int) -> Perm:
    """Contraction c^e_{i,j}: delete the later-preimage column of {i, j} and
    replace the other image by a dummy that keeps its slot's rank.

    If w^{-1}(i) < w^{-1}(j) the column with image j goes away and the image
    i becomes the dummy at i's place; otherwise exchange the roles of i, j.
    """
    r = len(w)
    if i == j:
        raise ValueError("labels must differ")
    if not (1 <= i <= r and 1 <= j <= r):
        raise ValueError(f"labels out of range for Sigma_{r}")
    if r < 2:
        raise ValueError("need r >= 2")
    pi, pj = w.index(i) + 1, w.index(j) + 1
    if pj < pi:
        i, j = j, i
        pi, pj = pj, pi
    # Now w^{-1}(i) < w^{-1}(j): drop position pj, dummy sits at i's rank.
    out = []
    for pos in range(1, r + 1):
        if pos == pj:
            continue
        v = w[pos - 1]
        if pos == pi:
            nv = i - (1 if i > j else 0)  # rank of the dummy = rank of i without j
        else:
            nv = v - (1 if v > j else 0)
        out.append(nv)
    return tuple(out)


def contract_single(w: Perm, i: int) -> Perm:
    """Contraction c_{empty,i}: delete the column where i is the image."""
    r = len(w)
    if not 1 <= i <= r:
        raise ValueError(f"label out of range for Sigma_{r}")
    if r < 2:
        raise ValueError("need r >= 2")
    p = w.index(i) + 1
    out = []
    for pos in range(1, r + 1):
        if pos == p:
            continue
        v = w[pos - 1]
        out.append(v - (1 if v > i else 0))
    return tuple(out)


def induced_perm_on_rest(sigma: Perm, i: int, j: int) -> Perm:
    """The bijection induced by sigma on labels-minus-{i,j} plus the dummy.

    The dummy occupies i's slot on the source side and sigma(i)'s slot on the
    target side; everything is read through induced orders, which is exactly
    how the contracted tables transform under the left action.
    """
    r = len(sigma)
    src = sorted((set(range(1, r + 1)) - {i, j}) | {i})   # dummy at i's place
    dst = sorted((set(range(1, r + 1)) - {sigma[i - 1], sigma[j - 1]}) | {sigma[i - 1]})
    images = []
    for x in src:
        y = sigma[x - 1]
        images.append(dst.index(y) + 1)
    return tuple(images)


def induced_perm_on_rest_single(sigma: Perm, i: int) -> Perm:
    """The bijection induced by sigma on labels minus {i}."""
    r = len(sigma)
    src = sorted(set(range(1, r + 1)) - {i})
    dst = sorted(set(range(1, r + 1)) - {sigma[i - 1]})
    return tuple(dst.index(sigma[x - 1]) + 1 for x in src)


# ---------------------------------------------------------------------------
# Bar tuples
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BarTuple:
    """A (t+1)-tuple of permutations of the same size; degree t basis element
    of the homogeneous bar resolution, with its free diagonal left action."""

    r: int
    ws: tuple  # tuple of Perm, length t + 1

    def __post_init__(self):
        if not self.ws:
            raise ValueError("a bar tuple holds at least one permutation")
        for w in self.ws:
            if len(w) != self.r:
                raise ValueError("mixed arities in bar tuple")

    @property
    def t(self) -> int:
        return len(self.ws) - 1

    def __str__(self):
        return " | ".join(perm_to_str(w) for w in self.ws)

    @classmethod
    def from_str(cls, text: str) -> "BarTuple":
        ws = tuple(perm_from_str(part) for part in text.split("|"))
        return cls(len(ws[0]), ws)


def left_act(s: Perm, wt: BarTuple) -> BarTuple:
    if len(s) != wt.r:
        raise ValueError("arity mismatch in left action")
    return BarTuple(wt.r, tuple(compose(s, w) for w in wt.ws))


def normalize(wt: BarTuple, anchor: str = "first"):
    """Free-orbit section: returns (s, canonical) with left_act(s, canonical)
    == wt and the anchored entry of ``canonical`` equal to the identity.

    ``anchor`` picks which entry is normalised to id: "first" (the default
    section) or "last" (the alternate section used for cross-checks).
    """
    w = wt.ws[0] if anchor == "first" else wt.ws[-1]
    return w, left_act(inverse(w), wt)


def contract_tuple(wt: BarTuple, mode) -> BarTuple:
    """Componentwise contraction; ``mode`` is ("pair", i, j) or ("single", i)."""
    if mode[0] == "pair":
        _, i, j = mode
        ws = tuple(contract_pair(w, i, j) for w in wt.ws)
    elif mode[0] == "single":
        _, i = mode
        ws = tuple(contract_single(w, i) for w in wt.ws)
    else:
        raise ValueError(f"unknown contraction mode {mode!r}")
    return BarTuple(wt.r - 1, ws)


def bar_differential(wt: BarTuple):
    """Alternating sum of entry omissions; empty for t = 0."""
    if wt.t == 0:
        return []
    out = []
    for k in range(wt.t + 1):
        ws = wt.ws[:k] + wt.ws[k + 1:]
        out.append((-1 if k % 2 else 1, BarTuple(wt.r, ws)))
    return out


# ---------------------------------------------------------------------------
# Cached integer-indexed symmetric group tables (hot paths index permutations
# by their lexicographic rank instead of manipulating tuples)
# ---------------------------------------------------------------------------


class SymmetricGroupTables:
    """Lexicographically indexed Sigma_r with composition, inverse and
    contraction lookup tables."""

    def __init__(self, r: int):
        self.r = r
        self.perms = all_perms(r)
        self.index = {w: k for k, w in enumerate(self.perms)}
        self.id_index = self.index[identity(r)]
        n = len(self.perms)
        self.inv = [self.index[inverse(w)] for w in self.perms]
        self._mul = None
        self._cpair = {}
        self._csingle = {}

    def mul(self, a: int, b: int) -> int:
        if self._mul is None:
            idx = self.index
            perms = self.perms
            self._mul = [[idx[compose(u, v)] for v in perms] for u in perms]
        return self._mul[a][b]

    def contract_pair_table(self, i: int, j: int, smaller: "SymmetricGroupTables"):
        key = (i, j)
        if key not in self._cpair:
            self._cpair[key] = [smaller.index[contract_pair(w, i, j)] for w in self.perms]
        return self._cpair[key]

    def contract_single_table(self, i: int, smaller: "SymmetricGroupTables"):
        if i not in self._csingle:
            self._csingle[i] = [smaller.index[contract_single(w, i)] for w in self.perms]
        return self._csingle[i]


@lru_cache(maxsize=None)
def sym_tables(r: int) -> SymmetricGroupTables:
    return SymmetricGroupTables(r)
