"""Assembly of the homology chain complexes.

The main complex has generators  x (x) gamma (x) (w_0,...,w_t) (x) (a_1..a_r)
with gamma an arity-r Koszul-dual basis element, the w's a bar tuple over
Sigma_r anchored at the identity (the free-orbit section of the diagonal
coinvariants), and the a's algebra basis indices.  Total degree (r-1) + t.

The differential has three parts:

* binary-on-top coproduct: insert the product kappa(gamma''_+)(a_i, a_j) at
  slot i, delete slot j, contract the bar tuple with the pair map;
* binary-at-root coproduct, with an extra (-1)^(r-1): act on the coefficient
  x through kappa(gamma'_-)(free slot, a_i), delete slot i, contract the bar
  tuple with the single map;
* bar omission with the Koszul sign (-1)^(r-1); omitting the anchored entry
  renormalizes the orbit representative, transporting the symmetric-group
  action onto the Koszul-dual factor (signed) and permuting the a's.

The comparison complex drops the bar factor and takes honest coinvariants;
the cochain variant transposes, with the coefficient action applied on the
other side.  Closure d o d = 0 is checked at assembly time: it certifies the
whole sign system at once.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .linalg import SparseMatrix, HomologySummary, homology_at, rank, kernel_basis_field
from .rings import RingSpec, ZZ
from .perms import sym_tables, identity, inverse, compose, BarTuple, perm_to_str
from .koszul import KoszulContext, KoszulData
from .operads import Presentation, ComponentsBase, make_components, ArityCapError, DEFAULT_ARITY_CAP
from .algebras import FiniteAlgebra, CoefficientModule


class ClosureError(ArithmeticError):
    """The assembled differential does not square to zero."""


@dataclass(frozen=True)
class GammaGenerator:
    """Canonical basis generator; the anchored bar entry is the identity."""

    e_idx: int
    r: int
    g_idx: int
    bar: tuple      # tuple of one-line perms, anchor entry == identity
    a_idx: tuple    # r algebra basis indices

    @property
    def t(self) -> int:
        return len(self.bar) - 1

    @property
    def degree(self) -> int:
        return (self.r - 1) + self.t

    def __str__(self):
        bar = " | ".join(perm_to_str(w) for w in self.bar)
        a = ",".join(str(x) for x in self.a_idx)
        return f"e{self.e_idx} r{self.r} g{self.g_idx} [{bar}] ({a})"


@dataclass
class GammaContext:
    """Everything the differential needs: ring, Koszul data per arity, the
    algebra, the coefficient module, and caches keyed by arity."""

    presentation: Presentation
    ring: RingSpec
    koszul: KoszulContext
    algebra: FiniteAlgebra
    module: CoefficientModule
    cap: int = DEFAULT_ARITY_CAP
    _mult_cache: dict = field(default_factory=dict)
    _act_cache: dict = field(default_factory=dict)
    _perm_cache: dict = field(default_factory=dict)

    def sym(self, r):
        if r not in self._perm_cache:
            self._perm_cache[r] = sym_tables(r)
        return self._perm_cache[r]

    def mult_entries(self, n, i, j):
        """Nonzero (k, coeff) of generator n applied to algebra basis (i, j)."""
        key = (n, i, j)
        if key not in self._mult_cache:
            vec = self.algebra.mult[n][i][j]
            self._mult_cache[key] = tuple(
                (k, self.ring.coerce(c)) for k, c in enumerate(vec) if c)
        return self._mult_cache[key]

    def act_entries(self, n, e, a):
        """Nonzero (f, coeff) of the module action of generator n on (e, a)."""
        key = (n, e, a)
        if key not in self._act_cache:
            vec = self.module.act[n][e][a]
            self._act_cache[key] = tuple(
                (f, self.ring.coerce(c)) for f, c in enumerate(vec) if c)
        return self._act_cache[key]


def make_context(presentation: Presentation, ring: RingSpec,
                 algebra: FiniteAlgebra, module: CoefficientModule,
                 cap: int = DEFAULT_ARITY_CAP,
                 koszul_source: str = "closed_form") -> GammaContext:
    """Build a context; ``koszul_source`` picks integral built-in data
    ('closed_form', Com/Lie/Ass only) or the generic quotient path
    ('generic', field rings)."""
    from .koszul import dual_components
    integral = koszul_source == "closed_form"
    if integral and presentation.name not in ("Com", "Lie", "Ass"):
        raise ValueError(f"no closed form for operad {presentation.name!r}")
    primal = make_components(presentation, ring, cap, integral_builtins=integral)
    dual = dual_components(presentation, ring, cap, integral_builtins=integral)
    ctx_koszul = KoszulContext(primal, dual, cap, check=(koszul_source == "generic"))
    return GammaContext(presentation, ring, ctx_koszul, algebra, module, cap)


# ---------------------------------------------------------------------------
# The differential, generator by generator
# ---------------------------------------------------------------------------
#
# Internally a generator is (e, g, ws, aseq): ws a tuple of permutation ranks
# in the arity's lexicographic tables, aseq a tuple of algebra basis indices.
# Raw terms are emitted without the coefficient-module factor so the same
# core drives the chain and cochain assemblies:
#   ("plain", coeff, r', g', ws', aseq')            x passes through
#   ("act", n, a_val, coeff, r', g', ws', aseq')    x moves through the action


from . import conventions


def raw_differential(ctx: GammaContext, r, g, ws, aseq, anchor="first"):
    ring = ctx.ring
    one = ring.one()
    sign_r = one if (r - 1) % 2 == 0 else ring.neg(one)
    alpha = ring.coerce(conventions.ALPHA(r))
    eps = ring.coerce(conventions.EPS(r))
    data = ctx.koszul.get(r)
    tabs = ctx.sym(r)
    out = []
    t = len(ws) - 1
    # bar omissions, sign (-1)^(r-1) * (-1)^k
    if t >= 1:
        anchored = 0 if anchor == "first" else t
        for k in range(t + 1):
            c = sign_r if k % 2 == 0 else ring.neg(sign_r)
            new_ws = ws[:k] + ws[k + 1:]
            if k != anchored:
                out.append(("plain", c, r, g, new_ws, aseq))
                continue
            # renormalize: act diagonally by the inverse of the new anchor
            pivot = new_ws[0] if anchor == "first" else new_ws[-1]
            sig = tabs.inv[pivot]
            ws2 = tuple(tabs.mul(sig, w) for w in new_ws)
            sigma = tabs.perms[sig]
            sigma_inv = tabs.perms[pivot]
            new_aseq = tuple(aseq[sigma_inv[k2] - 1] for k2 in range(r))
            for m, cm in data.act_columns(sigma)[g]:
                out.append(("plain", ring.mul(c, cm), r, m, ws2, new_aseq))
    if r == 1:
        return out
    smaller = ctx.sym(r - 1)
    # binary-on-top terms; the global -1 against the binary-at-root factor
    # (-1)^(r-1) is what makes the two coproduct routes and the double-action
    # route cancel (closure is the arbiter, checked at assembly)
    for (i, j), entries in data.delta_plus[g].items():
        table = tabs.contract_pair_table(i, j, smaller)
        new_ws = tuple(table[w] for w in ws)
        ai, aj = aseq[i - 1], aseq[j - 1]
        for (m, n, c) in entries:
            for k2, ck in ctx.mult_entries(n, ai, aj):
                coeff = ring.mul(alpha, ring.mul(c, ck))
                new_aseq = aseq[:i - 1] + (k2,) + aseq[i:j - 1] + aseq[j:]
                out.append(("plain", coeff, r - 1, m, new_ws, new_aseq))
    # binary-at-root terms, extra (-1)^(r-1)
    for i, entries in data.delta_minus[g].items():
        table = tabs.contract_single_table(i, smaller)
        new_ws = tuple(table[w] for w in ws)
        ai = aseq[i - 1]
        new_aseq = aseq[:i - 1] + aseq[i:]
        for (n, m, c) in entries:
            coeff = ring.mul(eps, c)
            out.append(("act", n, ai, coeff, r - 1, m, new_ws, new_aseq))
    return out


def gamma_differential(gen: GammaGenerator, ctx: GammaContext, anchor="first"):
    """Formal sum {GammaGenerator: coeff} of the differential of ``gen``."""
    ring = ctx.ring
    tabs = ctx.sym(gen.r)
    anchored = 0 if anchor == "first" else len(gen.bar) - 1
    if gen.bar[anchored] != identity(gen.r):
        raise ValueError("generator is not in the canonical section")
    ws = tuple(tabs.index[w] for w in gen.bar)
    out = {}
    for term in raw_differential(ctx, gen.r, gen.g_idx, ws, gen.a_idx, anchor):
        if term[0] == "plain":
            _, coeff, r2, g2, ws2, aseq2 = term
            contribs = [(gen.e_idx, coeff)]
        else:
            _, n, a_val, coeff, r2, g2, ws2, aseq2 = term
            contribs = [(f, ring.mul(coeff, cf))
                        for f, cf in ctx.act_entries(n, gen.e_idx, a_val)]
        small = ctx.sym(r2)
        bar2 = tuple(small.perms[w] for w in ws2)
        for e2, c in contribs:
            if ring.is_zero(c):
                continue
            key = GammaGenerator(e2, r2, g2, bar2, aseq2)
            v = ring.add(out.get(key, ring.zero()), c)
            if ring.is_zero(v):
                out.pop(key, None)
            else:
                out[key] = v
    return out


# ---------------------------------------------------------------------------
# Assembled complexes
# ---------------------------------------------------------------------------


@dataclass
class AssembledComplex:
    """Chain (or cochain) complex with explicit sparse differentials.

    For direction 'homological', matrices[d] maps degree d to degree d-1;
    for 'cohomological', matrices[d] maps degree d-1 to degree d.  Degrees
    run 0..top; homology is available for 0..top-1.
    """

    ring: RingSpec
    direction: str
    dims: dict             # degree -> dimension
    matrices: dict         # see above
    labels: dict = field(default_factory=dict, repr=False)  # degree -> callable or list

    @property
    def top(self) -> int:
        return max(self.dims) if self.dims else -1

    def check_closure(self):
        for d in sorted(self.matrices):
            if d + 1 in self.matrices:
                a, b = self.matrices[d], self.matrices[d + 1]
                prod = (a.mul(b, self.ring) if self.direction == "homological"
                        else b.mul(a, self.ring))
                if not prod.is_zero():
                    raise ClosureError(f"differential does not square to zero "
                                       f"at degree {d + 1}")

    def boundary_into(self, d):
        """Matrix landing in degree d (the incoming differential)."""
        if self.direction == "homological":
            return self.matrices.get(d + 1) or SparseMatrix.zero(self.dims.get(d, 0), 0)
        return self.matrices.get(d) or SparseMatrix.zero(self.dims.get(d, 0), 0)

    def boundary_out_of(self, d):
        if self.direction == "homological":
            return self.matrices.get(d) or SparseMatrix.zero(0, self.dims.get(d, 0))
        return self.matrices.get(d + 1) or SparseMatrix.zero(0, self.dims.get(d, 0))

    def homology(self, d) -> HomologySummary:
        return homology_at(self.boundary_into(d), self.boundary_out_of(d),
                           self.ring, degree=d)

    def homology_range(self, d_max):
        return [self.homology(d) for d in range(d_max + 1)]

    def dump(self) -> str:
        lines = []
        for d in sorted(self.dims):
            lines.append(f"degree {d} dim {self.dims[d]}")
            labels = self.labels.get(d)
            if labels:
                for k in range(self.dims[d]):
                    lines.append(f"  gen {k}: {labels[k]}")
        for d in sorted(self.matrices):
            m = self.matrices[d]
            tag = "boundary" if self.direction == "homological" else "coboundary"
            lines.append(f"{tag} {d}")
            lines.append(m.dump().rstrip("\n"))
        return "\n".join(lines) + "\n"


def _block_list(ctx, d_max, max_degree=None):
    """(degree -> [(r, t)]) for all blocks with degree <= max_degree."""
    top = d_max + 1 if max_degree is None else max_degree
    blocks = {}
    for d in range(top + 1):
        bl = []
        for r in range(1, d + 2):
            t = d - (r - 1)
            if t < 0:
                continue
            if r > ctx.cap:
                raise ArityCapError(
                    f"degree {d} needs arity {r} beyond the cap {ctx.cap}")
            bl.append((r, t))
        blocks[d] = bl
    return blocks


def _enumerate_block(ctx, r, t, dim_e, anchor):
    """Generator tuples (e, g, ws, aseq) of one (r, t) block, in order."""
    tabs = ctx.sym(r)
    n_perm = len(tabs.perms)
    kdim = ctx.koszul.get(r).dim
    dim_a = ctx.algebra.dim
    idp = tabs.id_index
    gens = []
    free = list(product(range(n_perm), repeat=t))
    for e in range(dim_e):
        for g in range(kdim):
            for rest in free:
                ws = (idp,) + rest if anchor == "first" else rest + (idp,)
                for aseq in product(range(dim_a), repeat=r):
                    gens.append((e, g, ws, aseq))
    return gens


def assemble_gamma(ctx: GammaContext, d_max: int, anchor: str = "first",
                   check: bool = True, with_labels: bool = False) -> AssembledComplex:
    """The main complex up to degree d_max + 1 (enough for H_0..H_{d_max})."""
    if d_max < 0:
        raise ValueError("d_max must be >= 0")
    ring = ctx.ring
    dim_e = ctx.module.dim
    blocks = _block_list(ctx, d_max)
    index = {}
    dims = {}
    labels = {}
    for d, bl in blocks.items():
        offset = 0
        idx = {}
        lab = []
        for (r, t) in bl:
            gens = _enumerate_block(ctx, r, t, dim_e, anchor)
            for gen in gens:
                idx[(r,) + gen[:2] + gen[2:]] = offset
                offset += 1
            if with_labels:
                tabs = ctx.sym(r)
                for (e, g, ws, aseq) in gens:
                    bar = " | ".join(perm_to_str(tabs.perms[w]) for w in ws)
                    lab.append(f"e{e} r{r} g{g} [{bar}] "
                               f"({','.join(map(str, aseq))})")
        index[d] = idx
        dims[d] = offset
        if with_labels:
            labels[d] = lab
    matrices = {}
    for d in range(1, max(blocks) + 1):
        entries = {}
        target = index[d - 1]
        col = 0
        for (r, t) in blocks[d]:
            for (e, g, ws, aseq) in _enumerate_block(ctx, r, t, dim_e, anchor):
                for term in raw_differential(ctx, r, g, ws, aseq, anchor):
                    if term[0] == "plain":
                        _, coeff, r2, g2, ws2, aseq2 = term
                        row = target[(r2, e, g2, ws2, aseq2)]
                        key = (row, col)
                        v = ring.add(entries.get(key, ring.zero()), coeff)
                        entries[key] = v
                    else:
                        _, n, a_val, coeff, r2, g2, ws2, aseq2 = term
                        for e2, cf in ctx.act_entries(n, e, a_val):
                            row = target[(r2, e2, g2, ws2, aseq2)]
                            key = (row, col)
                            v = ring.add(entries.get(key, ring.zero()),
                                         ring.mul(coeff, cf))
                            entries[key] = v
                col += 1
        matrices[d] = SparseMatrix(dims[d - 1], dims[d],
                                   {k: v for k, v in entries.items()
                                    if not ring.is_zero(v)})
    cx = AssembledComplex(ring, "homological", dims, matrices, labels)
    if check:
        cx.check_closure()
    return cx


# ---------------------------------------------------------------------------
# Comparison complex: no bar factor, honest coinvariants (field rings)
# ---------------------------------------------------------------------------


class _CoinvariantSpace:
    """Quotient of (Koszul-dual factor (x) A^r) by the diagonal action."""

    def __init__(self, ctx, r):
        ring = ctx.ring
        self.ring = ring
        data = ctx.koszul.get(r)
        dim_a = ctx.algebra.dim
        self.raw = [(g, aseq) for g in range(data.dim)
                    for aseq in product(range(dim_a), repeat=r)]
        self.raw_index = {x: k for k, x in enumerate(self.raw)}
        n = len(self.raw)
        relations = []
        tabs = ctx.sym(r)
        for k in range(1, r):
            sigma = list(range(1, r + 1))
            sigma[k - 1], sigma[k] = sigma[k], sigma[k - 1]
            sigma = tuple(sigma)
            cols = data.act_columns(sigma)
            sigma_inv = inverse(sigma)
            for g, aseq in self.raw:
                vec = {self.raw_index[(g, aseq)]: ring.one()}
                new_aseq = tuple(aseq[sigma_inv[k2] - 1] for k2 in range(r))
                for m, c in cols[g]:
                    key = self.raw_index[(m, new_aseq)]
                    vec[key] = ring.sub(vec.get(key, ring.zero()), c)
                vec = {k2: v for k2, v in vec.items() if not ring.is_zero(v)}
                if vec:
                    relations.append(vec)
        self.pivots = self._echelon(relations)
        self.basis = [k for k in range(n) if k not in self.pivots]
        self.basis_pos = {k: i for i, k in enumerate(self.basis)}

    def _echelon(self, relations):
        ring = self.ring
        pivots = {}
        for vec in relations:
            vec = dict(vec)
            while vec:
                p = min(vec)
                if p in pivots:
                    c = vec.pop(p)
                    for k, v in pivots[p].items():
                        nv = ring.add(vec.get(k, ring.zero()), ring.mul(c, v))
                        if ring.is_zero(nv):
                            vec.pop(k, None)
                        else:
                            vec[k] = nv
                else:
                    c = vec.pop(p)
                    inv = ring.inv(c)
                    pivots[p] = {k: ring.neg(ring.mul(inv, v))
                                 for k, v in vec.items()}
                    break
        changed = True
        while changed:
            changed = False
            for p, tail in pivots.items():
                for p2 in [k for k in tail if k in pivots]:
                    changed = True
                    c = tail.pop(p2)
                    for k, v in pivots[p2].items():
                        nv = ring.add(tail.get(k, ring.zero()), ring.mul(c, v))
                        if ring.is_zero(nv):
                            tail.pop(k, None)
                        else:
                            tail[k] = nv
        return pivots

    def reduce(self, vec):
        """{raw index: coeff} -> dense coordinates over the quotient basis."""
        ring = self.ring
        acc = {}
        stack = list(vec.items())
        while stack:
            k, c = stack.pop()
            if ring.is_zero(c):
                continue
            tail = self.pivots.get(k)
            if tail is None:
                acc[k] = ring.add(acc.get(k, ring.zero()), c)
            else:
                for k2, v in tail.items():
                    stack.append((k2, ring.mul(c, v)))
        out = [ring.zero()] * len(self.basis)
        for k, c in acc.items():
            out[self.basis_pos[k]] = c
        return out

    @property
    def dim(self):
        return len(self.basis)


def assemble_koszul(ctx: GammaContext, d_max: int, check: bool = True,
                    with_labels: bool = False) -> AssembledComplex:
    """The comparison complex: Koszul-dual factor against A, coinvariants
    taken as an honest quotient (field rings only)."""
    ring = ctx.ring
    if not ring.is_field:
        raise ValueError("the comparison complex takes coinvariant quotients; "
                         "run it over Q or a prime field")
    dim_e = ctx.module.dim
    spaces = {}
    for d in range(d_max + 2):
        r = d + 1
        if r > ctx.cap:
            raise ArityCapError(f"degree {d} needs arity {r} beyond the cap {ctx.cap}")
        spaces[d] = _CoinvariantSpace(ctx, r)
    dims = {d: dim_e * spaces[d].dim for d in spaces}
    labels = {}
    if with_labels:
        for d, sp in spaces.items():
            lab = []
            for e in range(dim_e):
                for k in sp.basis:
                    g, aseq = sp.raw[k]
                    lab.append(f"e{e} r{d+1} g{g} ({','.join(map(str, aseq))})")
            labels[d] = lab
    matrices = {}
    for d in range(1, d_max + 2):
        r = d + 1
        sp, sp_low = spaces[d], spaces[d - 1]
        entries = {}
        for e in range(dim_e):
            for col_local, rawk in enumerate(sp.basis):
                g, aseq = sp.raw[rawk]
                col = e * sp.dim + col_local
                ws = (ctx.sym(r).id_index,)
                acc_by_e = {}
                for term in raw_differential(ctx, r, g, ws, aseq):
                    if term[0] == "plain":
                        _, coeff, r2, g2, ws2, aseq2 = term
                        targets = [(e, coeff, g2, aseq2)]
                    else:
                        _, n, a_val, coeff, r2, g2, ws2, aseq2 = term
                        targets = [(e2, ring.mul(coeff, cf), g2, aseq2)
                                   for e2, cf in ctx.act_entries(n, e, a_val)]
                    for e2, c, g2, aseq2 in targets:
                        d_vec = acc_by_e.setdefault(e2, {})
                        k2 = sp_low.raw_index[(g2, aseq2)]
                        d_vec[k2] = ring.add(d_vec.get(k2, ring.zero()), c)
                for e2, vec in acc_by_e.items():
                    reduced = sp_low.reduce(vec)
                    for row_local, c in enumerate(reduced):
                        if not ring.is_zero(c):
                            entries[(e2 * sp_low.dim + row_local, col)] = c
        matrices[d] = SparseMatrix(dims[d - 1], dims[d], entries)
    cx = AssembledComplex(ring, "homological", dims, matrices, labels)
    if check:
        cx.check_closure()
    return cx


# ---------------------------------------------------------------------------
# Cochain complex
# ---------------------------------------------------------------------------


def assemble_cochain(ctx: GammaContext, d_max: int, anchor: str = "first",
                     check: bool = True) -> AssembledComplex:
    """Cochains with values in the coefficient module used contravariantly:
    transpose of the main complex with the action applied to the value side.
    Degrees are cohomological; matrices[d] maps degree d-1 to degree d."""
    ring = ctx.ring
    dim_f = ctx.module.dim
    blocks = _block_list(ctx, d_max)
    index = {}
    dims = {}
    enumerated = {}
    for d, bl in blocks.items():
        offset = 0
        idx = {}
        gens_all = []
        for (r, t) in bl:
            gens = _enumerate_block(ctx, r, t, 1, anchor)
            for (_, g, ws, aseq) in gens:
                idx[(r, g, ws, aseq)] = offset
                gens_all.append((r, g, ws, aseq))
                offset += 1
        index[d] = idx
        enumerated[d] = gens_all
        dims[d] = dim_f * offset
    matrices = {}
    for d in range(1, max(blocks) + 1):
        # coboundary C^{d-1} -> C^d pairs against the boundary of degree-d chains
        entries = {}
        n_low = len(enumerated[d - 1])
        for row_gen, (r, g, ws, aseq) in enumerate(enumerated[d]):
            for term in raw_differential(ctx, r, g, ws, aseq, anchor):
                if term[0] == "plain":
                    _, coeff, r2, g2, ws2, aseq2 = term
                    colg = index[d - 1][(r2, g2, ws2, aseq2)]
                    for phi in range(dim_f):
                        key = (phi * len(enumerated[d]) + row_gen, phi * n_low + colg)
                        v = ring.add(entries.get(key, ring.zero()), coeff)
                        entries[key] = v
                else:
                    _, n, a_val, coeff, r2, g2, ws2, aseq2 = term
                    colg = index[d - 1][(r2, g2, ws2, aseq2)]
                    for phi in range(dim_f):
                        for psi, cf in ctx.act_entries(n, phi, a_val):
                            key = (psi * len(enumerated[d]) + row_gen,
                                   phi * n_low + colg)
                            v = ring.add(entries.get(key, ring.zero()),
                                         ring.mul(coeff, cf))
                            entries[key] = v
        matrices[d] = SparseMatrix(dims[d], dims[d - 1],
                                   {k: v for k, v in entries.items()
                                    if not ring.is_zero(v)})
    cx = AssembledComplex(ring, "cohomological", dims, matrices)
    if check:
        cx.check_closure()
    return cx
