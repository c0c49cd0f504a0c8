"""Binary quadratic operad presentations and their components.

A presentation is a generator space with a transposition action plus a list
of relation vectors in the arity-3 free component.  Components P(r) come
from two interchangeable providers:

* ``QuotientComponents`` -- generic path over a field: the free-operad
  component modulo the ideal spanned by all graftings of the relations.
* ``ComComponents`` / ``LieComponents`` / ``AssComponents`` -- built-in
  integral structure constants, valid over any ring.  Lie elements are
  carried as multilinear associative expansions in the left-normed basis,
  where coordinates can be read off the words starting with 1.

Both expose the same small surface: ``dim``, the left symmetric-group
action ``act`` (relabel inputs), and partial composition ``compose``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations

from . import trees
from .rings import RingSpec, QQ
from .linalg import SparseMatrix, rank


DEFAULT_ARITY_CAP = 6


class ArityCapError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Presentations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Presentation:
    """Binary quadratic presentation: E_2 with its transposition action and
    relation vectors in the canonical arity-3 free basis order."""

    name: str
    gen_dim: int
    sigma2: tuple          # gen_dim x gen_dim, rows index output basis
    relations: tuple       # vectors of length = dim of free arity-3 component

    def __post_init__(self):
        g = self.gen_dim
        if len(self.sigma2) != g or any(len(row) != g for row in self.sigma2):
            raise ValueError("sigma2 action has wrong shape")
        for i in range(g):
            for j in range(g):
                acc = sum(self.sigma2[i][k] * self.sigma2[k][j] for k in range(g))
                if acc != (1 if i == j else 0):
                    raise ValueError("sigma2 action is not an involution")
        want = len(free_basis_keys(self, 3))
        for rel in self.relations:
            if len(rel) != want:
                raise ValueError(f"relation vector length {len(rel)} != {want}")
        if self.relations:
            m = SparseMatrix.from_rows([[Fraction(v) for v in rel] for rel in self.relations])
            if rank(m, QQ) != len(self.relations):
                raise ValueError("relation vectors are linearly dependent")

    def text_dump(self) -> str:
        lines = [f"gen_dim {self.gen_dim}",
                 "sigma2 " + " ".join(str(v) for row in self.sigma2 for v in row)]
        for rel in self.relations:
            lines.append("relation " + " ".join(str(v) for v in rel))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, name: str = "custom") -> "Presentation":
        gen_dim = None
        sigma2 = None
        relations = []
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            head, *rest = line.split()
            vals = [_parse_scalar(v) for v in rest]
            if head == "gen_dim":
                gen_dim = int(vals[0])
            elif head == "sigma2":
                if gen_dim is None:
                    raise ValueError("gen_dim must come before sigma2")
                sigma2 = tuple(tuple(vals[i * gen_dim:(i + 1) * gen_dim])
                               for i in range(gen_dim))
            elif head == "relation":
                relations.append(tuple(vals))
            else:
                raise ValueError(f"unknown presentation field {head!r}")
        if gen_dim is None or sigma2 is None:
            raise ValueError("presentation needs gen_dim and sigma2")
        return cls(name, gen_dim, sigma2, tuple(relations))


def _parse_scalar(tok: str):
    return Fraction(tok) if "/" in tok else int(tok)


def free_basis_keys(p: Presentation, r: int):
    """Canonical ordered basis of the arity-r free component (tree keys)."""
    if r < 1:
        raise ValueError("arity must be >= 1")
    if r == 1:
        return [1]  # the unit, by convention a bare leaf
    return trees.enumerate_free_monomials(r, p.gen_dim)


def free_basis(p: Presentation, r: int, cap: int = DEFAULT_ARITY_CAP):
    """TreeMonomial basis of the free component, arity-capped."""
    if r > cap:
        raise ArityCapError(f"arity {r} exceeds cap {cap}")
    return [trees.TreeMonomial(k) for k in free_basis_keys(p, r)]


def _canonical_combo(key, sigma2):
    """Canonicalize a possibly non-canonical planar tree: {monomial: coeff}."""
    ident = {v: v for v in range(1, trees.arity(key) + 1)}
    return trees.relabel(key, ident, sigma2)


def _relation_from_exprs(gen_dim, sigma2, terms):
    index = {k: i for i, k in enumerate(trees.enumerate_free_monomials(3, gen_dim))}
    vec = [0] * len(index)
    for coeff, key in terms:
        for mono, c in _canonical_combo(key, sigma2).items():
            vec[index[mono]] += coeff * c
    return tuple(vec)


def builtin(name: str) -> Presentation:
    """Standard presentations: Com, Lie, Ass."""
    s123 = ("N", 0, ("N", 0, 1, 2), 3)   # (x1 x2) x3
    s132 = ("N", 0, ("N", 0, 1, 3), 2)   # (x1 x3) x2
    s1_23 = ("N", 0, 1, ("N", 0, 2, 3))  # x1 (x2 x3)
    if name == "Com":
        sigma2 = ((1,),)
        rels = (_relation_from_exprs(1, sigma2, [(1, s123), (-1, s132)]),
                _relation_from_exprs(1, sigma2, [(1, s123), (-1, s1_23)]))
        return Presentation("Com", 1, sigma2, rels)
    if name == "Lie":
        sigma2 = ((-1,),)
        rel = _relation_from_exprs(1, sigma2, [(1, s123), (-1, s132), (-1, s1_23)])
        return Presentation("Lie", 1, sigma2, (rel,))
    if name == "Ass":
        # regular Sigma_2 generator space: 0 = planar product, 1 = its swap
        sigma2 = ((0, 1), (1, 0))
        rels = []
        for a, b, c in permutations((1, 2, 3)):
            left = ("N", 0, ("N", 0, a, b), c)   # (a b) c, planar order
            right = ("N", 0, a, ("N", 0, b, c))  # a (b c)
            rels.append(_relation_from_exprs(2, sigma2, [(1, left), (-1, right)]))
        return Presentation("Ass", 2, sigma2, tuple(rels))
    raise ValueError(f"unknown builtin operad {name!r}")


# ---------------------------------------------------------------------------
# Component providers
# ---------------------------------------------------------------------------


class ComponentsBase:
    """Common vector plumbing for operad component providers.

    Elements of P(n) are coordinate tuples in the provider's basis order.
    ``act`` is the left action by relabeling inputs; ``compose`` the partial
    composition P(m) x_i P(n) -> P(m+n-1).  Entries live in ``self.ring``.
    """

    ring: RingSpec
    cap: int

    def dim(self, n: int) -> int:
        raise NotImplementedError

    def act(self, n: int, sigma, vec):
        raise NotImplementedError

    def compose(self, m: int, vec_m, i: int, n: int, vec_n):
        raise NotImplementedError

    def basis_label(self, n: int, idx: int) -> str:
        return f"b{idx}"

    def unit(self):
        return (self.ring.one(),)

    def basis_vec(self, n: int, idx: int):
        v = [self.ring.zero()] * self.dim(n)
        v[idx] = self.ring.one()
        return tuple(v)

    def check_arity(self, n: int):
        if n > self.cap:
            raise ArityCapError(f"arity {n} exceeds cap {self.cap}")

    def _compose_unit(self, m, vec_m, i, n, vec_n):
        if n == 1:
            return tuple(self.ring.mul(v, vec_n[0]) for v in vec_m)
        if m == 1:
            return tuple(self.ring.mul(vec_m[0], v) for v in vec_n)
        return None


class ComComponents(ComponentsBase):
    """Com(n) = the ground ring with trivial action for every n >= 1."""

    def __init__(self, ring: RingSpec, cap: int = DEFAULT_ARITY_CAP):
        self.ring = ring
        self.cap = cap

    def dim(self, n: int) -> int:
        self.check_arity(n)
        return 1

    def act(self, n, sigma, vec):
        return tuple(vec)

    def compose(self, m, vec_m, i, n, vec_n):
        return (self.ring.mul(vec_m[0], vec_n[0]),)

    def basis_label(self, n, idx):
        return f"mu{n}"


class AssComponents(ComponentsBase):
    """Ass(n) = the regular representation; basis indexed by the words
    (permutations of 1..n in lexicographic order)."""

    def __init__(self, ring: RingSpec, cap: int = DEFAULT_ARITY_CAP):
        self.ring = ring
        self.cap = cap

    @lru_cache(maxsize=None)
    def _words(self, n: int):
        return [tuple(p) for p in permutations(range(1, n + 1))]

    @lru_cache(maxsize=None)
    def _index(self, n: int):
        return {w: k for k, w in enumerate(self._words(n))}

    def dim(self, n: int) -> int:
        self.check_arity(n)
        return len(self._words(n))

    def act(self, n, sigma, vec):
        out = [self.ring.zero()] * len(vec)
        idx = self._index(n)
        for k, w in enumerate(self._words(n)):
            if not self.ring.is_zero(vec[k]):
                new_w = tuple(sigma[l - 1] for l in w)
                out[idx[new_w]] = self.ring.add(out[idx[new_w]], vec[k])
        return tuple(out)

    def compose(self, m, vec_m, i, n, vec_n):
        quick = self._compose_unit(m, vec_m, i, n, vec_n)
        if quick is not None:
            return quick
        self.check_arity(m + n - 1)
        out = [self.ring.zero()] * self.dim(m + n - 1)
        idx = self._index(m + n - 1)
        for ku, u in enumerate(self._words(m)):
            cu = vec_m[ku]
            if self.ring.is_zero(cu):
                continue
            for kv, v in enumerate(self._words(n)):
                cv = vec_n[kv]
                if self.ring.is_zero(cv):
                    continue
                w = _substitute_word(u, i, v)
                out[idx[w]] = self.ring.add(out[idx[w]], self.ring.mul(cu, cv))
        return tuple(out)

    def basis_label(self, n, idx):
        return "w" + "".join(map(str, self._words(n)[idx]))


def _substitute_word(u, i, v):
    n = len(v)
    out = []
    for letter in u:
        if letter == i:
            out.extend(x + i - 1 for x in v)
        else:
            out.append(letter + (n - 1) if letter > i else letter)
    return tuple(out)


class LieComponents(ComponentsBase):
    """Lie(n) over Z in the left-normed basis.

    Basis elements are the brackets [[..[x_1, x_s(2)], ..], x_s(n)] indexed
    by permutations s of {2..n}; each expands to a multilinear associative
    polynomial whose words starting with the letter 1 are exactly the basis
    coordinates.
    """

    def __init__(self, ring: RingSpec, cap: int = DEFAULT_ARITY_CAP):
        self.ring = ring
        self.cap = cap

    @lru_cache(maxsize=None)
    def _suffixes(self, n: int):
        return [tuple(p) for p in permutations(range(2, n + 1))]

    @lru_cache(maxsize=None)
    def _suffix_index(self, n: int):
        return {s: k for k, s in enumerate(self._suffixes(n))}

    def dim(self, n: int) -> int:
        self.check_arity(n)
        return len(self._suffixes(n))

    @lru_cache(maxsize=None)
    def _basis_expansion(self, n: int, idx: int):
        """Associative expansion {word: int} of a left-normed basis bracket."""
        expansion = {(1,): 1}
        for letter in self._suffixes(n)[idx]:
            new = {}
            for w, c in expansion.items():
                left = w + (letter,)
                new[left] = new.get(left, 0) + c
                right = (letter,) + w
                new[right] = new.get(right, 0) - c
            expansion = new
        return expansion

    def _expand(self, n, vec):
        out = {}
        for idx, c in enumerate(vec):
            if self.ring.is_zero(c):
                continue
            for w, e in self._basis_expansion(n, idx).items():
                v = self.ring.add(out.get(w, self.ring.zero()),
                                  self.ring.mul(c, self.ring.coerce(e)))
                out[w] = v
        return {w: c for w, c in out.items() if not self.ring.is_zero(c)}

    def _extract(self, n, expansion):
        """Coordinates of a multilinear Lie element from its expansion."""
        sidx = self._suffix_index(n)
        vec = [self.ring.zero()] * len(sidx)
        for w, c in expansion.items():
            if w[0] == 1:
                vec[sidx[w[1:]]] = c
        return tuple(vec)

    def dict_mul(self, d1, d2):
        out = {}
        for w1, c1 in d1.items():
            for w2, c2 in d2.items():
                w = w1 + w2
                out[w] = self.ring.add(out.get(w, self.ring.zero()),
                                       self.ring.mul(c1, c2))
        return out

    def act(self, n, sigma, vec):
        expansion = self._expand(n, vec)
        new = {}
        for w, c in expansion.items():
            nw = tuple(sigma[l - 1] for l in w)
            new[nw] = self.ring.add(new.get(nw, self.ring.zero()), c)
        return self._extract(n, new)

    def compose(self, m, vec_m, i, n, vec_n):
        quick = self._compose_unit(m, vec_m, i, n, vec_n)
        if quick is not None:
            return quick
        self.check_arity(m + n - 1)
        du = self._expand(m, vec_m)
        dv = self._expand(n, vec_n)
        out = {}
        for u, cu in du.items():
            for v, cv in dv.items():
                w = _substitute_word(u, i, v)
                out[w] = self.ring.add(out.get(w, self.ring.zero()),
                                       self.ring.mul(cu, cv))
        return self._extract(m + n - 1, out)

    def basis_label(self, n, idx):
        if n == 1:
            return "x1"
        word = (1,) + self._suffixes(n)[idx]
        s = f"[x{word[0]},x{word[1]}]"
        for letter in word[2:]:
            s = f"[{s},x{letter}]"
        return s


class QuotientComponents(ComponentsBase):
    """Generic path: P(n) as the free component modulo the relation ideal,
    computed over a field by linear algebra.

    Basis: free monomials away from the ideal's echelon pivots; elements are
    reduced on the fly.  Deterministic by the canonical monomial order.
    """

    def __init__(self, presentation: Presentation, ring: RingSpec,
                 cap: int = DEFAULT_ARITY_CAP):
        if not ring.is_field:
            raise ValueError("generic operad quotients need a field; "
                             "built-in operads carry integral data")
        self.p = presentation
        self.ring = ring
        self.cap = cap
        self._monos = {}
        self._mono_index = {}
        self._pivots = {}      # n -> {pivot monomial: {monomial: coeff}}
        self._basis_keys = {}  # n -> list of non-pivot monomials

    # -- ideal machinery -------------------------------------------------

    def _free_monomials(self, n):
        if n not in self._monos:
            keys = trees.enumerate_free_monomials(n, self.p.gen_dim)
            self._monos[n] = keys
            self._mono_index[n] = {k: i for i, k in enumerate(keys)}
        return self._monos[n]

    def _ensure(self, n):
        if n in self._basis_keys:
            return
        self.check_arity(n)
        if n == 1:
            self._pivots[1] = {}
            self._basis_keys[1] = [1]
            return
        if n == 2:
            self._pivots[2] = {}
            self._basis_keys[2] = self._free_monomials(2)
            return
        self._ensure(n - 1)
        span = []
        if n == 3:
            monos = self._free_monomials(3)
            for rel in self.p.relations:
                span.append({monos[k]: self.ring.coerce(c)
                             for k, c in enumerate(rel) if c})
        else:
            gens2 = self._free_monomials(2)
            prev_vectors = []
            for piv, tail in self._pivots[n - 1].items():
                vec = dict(tail)
                vec[piv] = self.ring.neg(self.ring.one())
                prev_vectors.append(vec)
            # An ideal element of arity n is a relation tree; strip a
            # generator vertex from a leaf or extend at the root.
            for vec in prev_vectors:
                for i in range(1, n):
                    for g in gens2:
                        span.append(self._graft_combo(vec, i, g, left=True))
                for g in gens2:
                    span.append(self._graft_combo(vec, 1, g, left=False, root_slot=1))
                    span.append(self._graft_combo(vec, 2, g, left=False, root_slot=2))
        pivots = self._echelonize(span)
        # The graft span only hits consecutive-block labelings; the ideal is
        # stable under relabeling, so saturate with adjacent transpositions.
        transpositions = []
        for k in range(1, n):
            sigma = list(range(1, n + 1))
            sigma[k - 1], sigma[k] = sigma[k], sigma[k - 1]
            transpositions.append({v: sigma[v - 1] for v in range(1, n + 1)})
        while True:
            vectors = []
            for piv, tail in pivots.items():
                vec = dict(tail)
                vec[piv] = self.ring.neg(self.ring.one())
                vectors.append(vec)
            moved_all = list(vectors)
            for vec in vectors:
                for images in transpositions:
                    moved = {}
                    for mono, c in vec.items():
                        for k2, c2 in trees.relabel(mono, images, self.p.sigma2).items():
                            v = self.ring.add(moved.get(k2, self.ring.zero()),
                                              self.ring.mul(c, self.ring.coerce(c2)))
                            moved[k2] = v
                    moved_all.append({k: v for k, v in moved.items()
                                      if not self.ring.is_zero(v)})
            new_pivots = self._echelonize(moved_all)
            if len(new_pivots) == len(pivots):
                pivots = new_pivots
                break
            pivots = new_pivots
        self._pivots[n] = pivots
        self._basis_keys[n] = [k for k in self._free_monomials(n)
                               if k not in self._pivots[n]]

    def _graft_combo(self, vec, i, g, left=True, root_slot=1):
        out = {}
        for mono, c in vec.items():
            if left:
                key = trees.graft(mono, i, g)
            else:
                key = trees.graft(g, root_slot, mono)
            for k2, c2 in _canonical_combo(key, self.p.sigma2).items():
                v = self.ring.add(out.get(k2, self.ring.zero()),
                                  self.ring.mul(c, self.ring.coerce(c2)))
                out[k2] = v
        return {k: v for k, v in out.items() if not self.ring.is_zero(v)}

    def _echelonize(self, span):
        """Reduced echelon rewriting rules {pivot: tail} over the monomial order."""
        pivots = {}
        order = trees.sort_form
        for vec in span:
            vec = dict(vec)
            while vec:
                piv = min(vec, key=order)
                if piv in pivots:
                    c = vec.pop(piv)
                    for k, v in pivots[piv].items():
                        nv = self.ring.sub(vec.get(k, self.ring.zero()),
                                           self.ring.mul(c, self.ring.neg(v)))
                        # pivots store the tail of (pivot - tail): pivot = tail
                        if self.ring.is_zero(nv):
                            vec.pop(k, None)
                        else:
                            vec[k] = nv
                else:
                    c = vec.pop(piv)
                    inv = self.ring.inv(c)
                    tail = {k: self.ring.neg(self.ring.mul(inv, v))
                            for k, v in vec.items()}
                    pivots[piv] = tail  # pivot rewrites to +tail
                    break
        # full back-substitution so tails only mention basis monomials
        for piv in sorted(pivots, key=order, reverse=True):
            tail = pivots[piv]
            for piv2, tail2 in pivots.items():
                if piv2 == piv or piv not in tail2:
                    continue
                c = tail2.pop(piv)
                for k, v in tail.items():
                    nv = self.ring.add(tail2.get(k, self.ring.zero()),
                                       self.ring.mul(c, v))
                    if self.ring.is_zero(nv):
                        tail2.pop(k, None)
                    else:
                        tail2[k] = nv
        return pivots

    def _reduce(self, n, combo):
        """Rewrite a {monomial: coeff} combo into quotient-basis coordinates."""
        self._ensure(n)
        pivots = self._pivots[n]
        acc = {}
        stack = list(combo.items())
        while stack:
            k, c = stack.pop()
            if self.ring.is_zero(c):
                continue
            tail = pivots.get(k)
            if tail is None:
                acc[k] = self.ring.add(acc.get(k, self.ring.zero()), c)
            else:
                for k2, v in tail.items():
                    stack.append((k2, self.ring.mul(c, v)))
        keys = self._basis_keys[n]
        index = {k: i for i, k in enumerate(keys)}
        vec = [self.ring.zero()] * len(keys)
        for k, c in acc.items():
            vec[index[k]] = c
        return tuple(vec)

    # -- provider surface --------------------------------------------------

    def dim(self, n: int) -> int:
        self._ensure(n)
        return len(self._basis_keys[n])

    def basis_label(self, n, idx):
        self._ensure(n)
        k = self._basis_keys[n][idx]
        return trees.render(k) if not trees.is_leaf(k) else "1"

    def act(self, n, sigma, vec):
        self._ensure(n)
        if n == 1:
            return tuple(vec)
        combo = {}
        images = {v: sigma[v - 1] for v in range(1, n + 1)}
        for idx, c in enumerate(vec):
            if self.ring.is_zero(c):
                continue
            mono = self._basis_keys[n][idx]
            for k, c2 in trees.relabel(mono, images, self.p.sigma2).items():
                v = self.ring.add(combo.get(k, self.ring.zero()),
                                  self.ring.mul(c, self.ring.coerce(c2)))
                combo[k] = v
        return self._reduce(n, combo)

    def compose(self, m, vec_m, i, n, vec_n):
        quick = self._compose_unit(m, vec_m, i, n, vec_n)
        if quick is not None:
            return quick
        self.check_arity(m + n - 1)
        self._ensure(m)
        self._ensure(n)
        combo = {}
        for im, cm in enumerate(vec_m):
            if self.ring.is_zero(cm):
                continue
            km = self._basis_keys[m][im]
            for jn, cn in enumerate(vec_n):
                if self.ring.is_zero(cn):
                    continue
                kn = self._basis_keys[n][jn]
                key = trees.graft(km, i, kn)
                for k2, c2 in _canonical_combo(key, self.p.sigma2).items():
                    v = self.ring.add(combo.get(k2, self.ring.zero()),
                                      self.ring.mul(self.ring.mul(cm, cn),
                                                    self.ring.coerce(c2)))
                    combo[k2] = v
        return self._reduce(m + n - 1, combo)


def make_components(presentation: Presentation, ring: RingSpec,
                    cap: int = DEFAULT_ARITY_CAP,
                    integral_builtins: bool = True) -> ComponentsBase:
    """Provider for an operad: integral built-ins when available and wanted,
    otherwise the generic field quotient."""
    if integral_builtins:
        if presentation.name == "Com":
            return ComComponents(ring, cap)
        if presentation.name == "Lie":
            return LieComponents(ring, cap)
        if presentation.name == "Ass":
            return AssComponents(ring, cap)
    return QuotientComponents(presentation, ring, cap)


# ---------------------------------------------------------------------------
# Spec-facing component snapshot
# ---------------------------------------------------------------------------


@dataclass
class OperadComponent:
    """A view of one quotient component P(r): basis labels, the action and
    composition evaluated through the provider."""

    r: int
    provider: ComponentsBase

    @property
    def dim(self) -> int:
        return self.provider.dim(self.r)

    def basis_labels(self):
        return [self.provider.basis_label(self.r, k) for k in range(self.dim)]

    def act(self, sigma, vec):
        return self.provider.act(self.r, sigma, vec)

    def compose_into(self, vec, i, other: "OperadComponent", vec_other):
        return self.provider.compose(self.r, vec, i, other.r, vec_other)


def component(presentation: Presentation, r: int, ring: RingSpec,
              cap: int = DEFAULT_ARITY_CAP) -> OperadComponent:
    """Generic quotient component over a field (spec operation)."""
    provider = QuotientComponents(presentation, ring, cap)
    provider._ensure(r)
    return OperadComponent(r, provider)
