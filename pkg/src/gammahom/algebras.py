"""Finite-dimensional algebras over a binary quadratic operad and coefficient
modules over their enveloping algebras.

An algebra is a structure-constant tensor per binary generator; a coefficient
module records the action of the one-free-input binary operations.  Both are
degree 0 with no internal differential.  Checkers evaluate every presentation
relation on basis triples (with the free slot in each position for modules)
and report the nonzero residuals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .operads import Presentation, builtin
from .rings import RingSpec


@dataclass(frozen=True)
class FiniteAlgebra:
    """Structure constants mult[g][i][j] = coordinates of the g-th generator
    applied to basis elements i, j."""

    name: str
    dim: int
    mult: tuple  # [g][i][j] -> tuple of dim coefficients

    def product(self, ring, gen_vec, i, j):
        """Apply a generator-space vector to basis elements i, j."""
        out = [ring.zero()] * self.dim
        for g, c in enumerate(gen_vec):
            if ring.is_zero(c):
                continue
            for k, s in enumerate(self.mult[g][i][j]):
                if s:
                    out[k] = ring.add(out[k], ring.mul(c, ring.coerce(s)))
        return out


@dataclass(frozen=True)
class CoefficientModule:
    """Right action act[g][e][a] = coordinates of e . (g applied to the free
    slot and basis element a); the free slot is the generator's first input."""

    name: str
    dim: int
    alg_dim: int
    act: tuple  # [g][e][a] -> tuple of dim coefficients

    def apply(self, ring, gen_vec, e, a):
        out = [ring.zero()] * self.dim
        for g, c in enumerate(gen_vec):
            if ring.is_zero(c):
                continue
            for f, s in enumerate(self.act[g][e][a]):
                if s:
                    out[f] = ring.add(out[f], ring.mul(c, ring.coerce(s)))
        return out


# ---------------------------------------------------------------------------
# Relation checkers
# ---------------------------------------------------------------------------


def _eval_tree_on_algebra(key, leaf_to_idx, alg: FiniteAlgebra, ring):
    """Evaluate a free-operad monomial on algebra basis elements: a dense
    vector over the algebra basis."""
    if isinstance(key, int):
        vec = [ring.zero()] * alg.dim
        vec[leaf_to_idx[key]] = ring.one()
        return vec
    _, g, left, right = key
    lv = _eval_tree_on_algebra(left, leaf_to_idx, alg, ring)
    rv = _eval_tree_on_algebra(right, leaf_to_idx, alg, ring)
    out = [ring.zero()] * alg.dim
    for i, cl in enumerate(lv):
        if ring.is_zero(cl):
            continue
        for j, cr in enumerate(rv):
            if ring.is_zero(cr):
                continue
            c = ring.mul(cl, cr)
            for k, s in enumerate(alg.mult[g][i][j]):
                if s:
                    out[k] = ring.add(out[k], ring.mul(c, ring.coerce(s)))
    return out


def check_algebra(p: Presentation, alg: FiniteAlgebra, ring: RingSpec):
    """Nonzero relation residuals; empty iff the structure constants satisfy
    the transposition equivariance and every quadratic relation."""
    from . import trees
    report = []
    g_dim = p.gen_dim
    if len(alg.mult) != g_dim:
        raise ValueError(f"algebra has {len(alg.mult)} generator tensors, "
                         f"presentation has {g_dim}")
    # transposition equivariance: (twisted generator)(a, b) == generator(b, a)
    for g in range(g_dim):
        for i in range(alg.dim):
            for j in range(alg.dim):
                lhs = [ring.zero()] * alg.dim
                for m in range(g_dim):
                    s = p.sigma2[m][g]
                    if s:
                        for k, v in enumerate(alg.mult[m][i][j]):
                            if v:
                                lhs[k] = ring.add(lhs[k], ring.mul(ring.coerce(s),
                                                                   ring.coerce(v)))
                rhs = [ring.coerce(v) for v in alg.mult[g][j][i]]
                diff = [ring.sub(a, b) for a, b in zip(lhs, rhs)]
                if any(not ring.is_zero(d) for d in diff):
                    report.append(("sigma2", g, i, j, tuple(diff)))
    monos = trees.enumerate_free_monomials(3, g_dim)
    for ridx, rel in enumerate(p.relations):
        for a in range(alg.dim):
            for b in range(alg.dim):
                for c in range(alg.dim):
                    total = [ring.zero()] * alg.dim
                    leaf_map = {1: a, 2: b, 3: c}
                    for k, coeff in enumerate(rel):
                        if not coeff:
                            continue
                        val = _eval_tree_on_algebra(monos[k], leaf_map, alg, ring)
                        for t, v in enumerate(val):
                            total[t] = ring.add(total[t],
                                                ring.mul(ring.coerce(coeff), v))
                    if any(not ring.is_zero(v) for v in total):
                        report.append(("relation", ridx, a, b, c, tuple(total)))
    return report


def _eval_tree_on_module(key, hole_leaf, leaf_to_idx, e_idx, alg, mod, p, ring):
    """Evaluate a monomial with the module element in one leaf.

    Returns ('E', vector over E) when the subtree contains the hole, else
    ('A', vector over A).  A hole in a generator's second input routes
    through the transposition-twisted generator, so only first-slot action
    tensors are ever needed.
    """
    if isinstance(key, int):
        if key == hole_leaf:
            vec = [ring.zero()] * mod.dim
            vec[e_idx] = ring.one()
            return "E", vec
        vec = [ring.zero()] * alg.dim
        vec[leaf_to_idx[key]] = ring.one()
        return "A", vec
    _, g, left, right = key
    lk, lv = _eval_tree_on_module(left, hole_leaf, leaf_to_idx, e_idx, alg, mod, p, ring)
    rk, rv = _eval_tree_on_module(right, hole_leaf, leaf_to_idx, e_idx, alg, mod, p, ring)
    if lk == "A" and rk == "A":
        out = [ring.zero()] * alg.dim
        for i, cl in enumerate(lv):
            if ring.is_zero(cl):
                continue
            for j, cr in enumerate(rv):
                if ring.is_zero(cr):
                    continue
                c = ring.mul(cl, cr)
                for k, s in enumerate(alg.mult[g][i][j]):
                    if s:
                        out[k] = ring.add(out[k], ring.mul(c, ring.coerce(s)))
        return "A", out
    out = [ring.zero()] * mod.dim
    if lk == "E":
        gen_vec = [ring.one() if m == g else ring.zero() for m in range(p.gen_dim)]
        evec, avec = lv, rv
    else:
        # hole in the second input: twist the generator by the transposition
        gen_vec = [ring.coerce(p.sigma2[m][g]) for m in range(p.gen_dim)]
        evec, avec = rv, lv
    for e, ce in enumerate(evec):
        if ring.is_zero(ce):
            continue
        for a, ca in enumerate(avec):
            if ring.is_zero(ca):
                continue
            c = ring.mul(ce, ca)
            contrib = mod.apply(ring, gen_vec, e, a)
            for f, v in enumerate(contrib):
                if not ring.is_zero(v):
                    out[f] = ring.add(out[f], ring.mul(c, v))
    return "E", out


def check_module(p: Presentation, alg: FiniteAlgebra, mod: CoefficientModule,
                 ring: RingSpec):
    """Residuals of the arity-3 relations with the free slot in each input."""
    from . import trees
    if mod.alg_dim != alg.dim:
        raise ValueError("module and algebra dimensions disagree")
    report = []
    monos = trees.enumerate_free_monomials(3, p.gen_dim)
    for ridx, rel in enumerate(p.relations):
        for hole in (1, 2, 3):
            others = [l for l in (1, 2, 3) if l != hole]
            for e in range(mod.dim):
                for a in range(alg.dim):
                    for b in range(alg.dim):
                        leaf_map = {others[0]: a, others[1]: b}
                        total = [ring.zero()] * mod.dim
                        for k, coeff in enumerate(rel):
                            if not coeff:
                                continue
                            kind, val = _eval_tree_on_module(
                                monos[k], hole, leaf_map, e, alg, mod, p, ring)
                            assert kind == "E"
                            for t, v in enumerate(val):
                                total[t] = ring.add(total[t],
                                                    ring.mul(ring.coerce(coeff), v))
                        if any(not ring.is_zero(v) for v in total):
                            report.append(("relation", ridx, hole, e, a, b, tuple(total)))
    return report


# ---------------------------------------------------------------------------
# Built-in algebras and modules
# ---------------------------------------------------------------------------


def _zero_mult(gens, dim):
    row = tuple(tuple(tuple(0 for _ in range(dim)) for _ in range(dim))
                for _ in range(dim))
    return tuple(row for _ in range(gens))


def trivial_square_zero(n: int, gens: int = 1) -> FiniteAlgebra:
    """dim-n algebra with vanishing products; satisfies any quadratic relation."""
    return FiniteAlgebra(f"trivial_square_zero({n})", n, _zero_mult(gens, n))


def abelian_lie(n: int) -> FiniteAlgebra:
    return FiniteAlgebra(f"abelian_lie({n})", n, _zero_mult(1, n))


def sl2() -> FiniteAlgebra:
    """Basis (h, e, f): [h,e] = 2e, [h,f] = -2f, [e,f] = h."""
    dim = 3
    h, e, f = 0, 1, 2
    table = [[[0] * dim for _ in range(dim)] for _ in range(dim)]

    def put(i, j, k, c):
        table[i][j][k] = c
        table[j][i][k] = -c

    put(h, e, e, 2)
    put(h, f, f, -2)
    put(e, f, h, 1)
    mult = (tuple(tuple(tuple(row) for row in plane) for plane in table),)
    return FiniteAlgebra("sl2", dim, mult)


def nilpotent_truncated_polynomial(k: int) -> FiniteAlgebra:
    """span(x, x^2, ..., x^k) with x^i x^j = x^{i+j}, truncated (no unit)."""
    dim = k
    mult = [[[0] * dim for _ in range(dim)] for _ in range(dim)]
    for i in range(1, k + 1):
        for j in range(1, k + 1):
            if i + j <= k:
                mult[i - 1][j - 1][i + j - 1] = 1
    return FiniteAlgebra(f"nilpotent_truncated_polynomial({k})", dim,
                         (tuple(tuple(tuple(r) for r in p) for p in mult),))


def trivial_coefficients(alg: FiniteAlgebra, gens: int = 1) -> CoefficientModule:
    """E = the ground ring with zero action."""
    act = tuple(tuple(((0,),) * alg.dim for _ in range(1)) for _ in range(gens))
    return CoefficientModule("trivial", 1, alg.dim, act)


def adjoint_coefficients(alg: FiniteAlgebra) -> CoefficientModule:
    """E = A with the action given by the structure constants themselves."""
    return CoefficientModule("adjoint", alg.dim, alg.dim, alg.mult)


def builtin_algebra(name: str):
    """Parse 'sl2', 'abelian_lie(2)', 'trivial_square_zero(3)', etc.

    Returns (presentation tag, FiniteAlgebra); tag 'any' fits every operad.
    """
    base, arg = _parse_call(name)
    if base == "trivial_square_zero":
        return "any", trivial_square_zero(arg)
    if base == "abelian_lie":
        return "Lie", abelian_lie(arg)
    if base == "sl2":
        return "Lie", sl2()
    if base == "nilpotent_truncated_polynomial":
        return "Com", nilpotent_truncated_polynomial(arg)
    raise ValueError(f"unknown builtin algebra {name!r}")


def _parse_call(name: str):
    name = name.strip()
    if "(" in name:
        base, rest = name.split("(", 1)
        if not rest.endswith(")"):
            raise ValueError(f"malformed algebra name {name!r}")
        return base, int(rest[:-1])
    return name, None


def builtin_coefficients(name: str, alg: FiniteAlgebra, gens: int) -> CoefficientModule:
    if name == "trivial":
        return trivial_coefficients(alg, gens)
    if name == "adjoint":
        return adjoint_coefficients(alg)
    raise ValueError(f"unknown builtin coefficients {name!r}")


# ---------------------------------------------------------------------------
# Text file formats (dense structure constants in canonical basis order)
# ---------------------------------------------------------------------------


def algebra_to_text(alg: FiniteAlgebra) -> str:
    lines = [f"dim {alg.dim}", f"generators {len(alg.mult)}"]
    for g, plane in enumerate(alg.mult):
        for i, row in enumerate(plane):
            for j, vec in enumerate(row):
                lines.append(f"mult {g} {i} {j} " + " ".join(str(v) for v in vec))
    return "\n".join(lines) + "\n"


def algebra_from_text(text: str, name: str = "custom") -> FiniteAlgebra:
    dim = gens = None
    table = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "dim":
            dim = int(parts[1])
        elif parts[0] == "generators":
            gens = int(parts[1])
        elif parts[0] == "mult":
            if dim is None or gens is None:
                raise ValueError("dim and generators must come before mult rows")
            if table is None:
                table = [[[None] * dim for _ in range(dim)] for _ in range(gens)]
            g, i, j = int(parts[1]), int(parts[2]), int(parts[3])
            vals = [_scalar(v) for v in parts[4:]]
            if len(vals) != dim:
                raise ValueError(f"mult row needs {dim} values")
            table[g][i][j] = tuple(vals)
        else:
            raise ValueError(f"unknown algebra field {parts[0]!r}")
    if dim is None or table is None:
        raise ValueError("algebra file needs dim and mult rows")
    for g in range(gens):
        for i in range(dim):
            for j in range(dim):
                if table[g][i][j] is None:
                    raise ValueError(f"missing mult row for ({g},{i},{j})")
    mult = tuple(tuple(tuple(row) for row in plane) for plane in table)
    return FiniteAlgebra(name, dim, mult)


def module_to_text(mod: CoefficientModule) -> str:
    lines = [f"dim {mod.dim}", f"alg_dim {mod.alg_dim}",
             f"generators {len(mod.act)}"]
    for g, plane in enumerate(mod.act):
        for e, row in enumerate(plane):
            for a, vec in enumerate(row):
                lines.append(f"act {g} {e} {a} " + " ".join(str(v) for v in vec))
    return "\n".join(lines) + "\n"


def module_from_text(text: str, name: str = "custom") -> CoefficientModule:
    dim = alg_dim = gens = None
    table = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "dim":
            dim = int(parts[1])
        elif parts[0] == "alg_dim":
            alg_dim = int(parts[1])
        elif parts[0] == "generators":
            gens = int(parts[1])
        elif parts[0] == "act":
            if None in (dim, alg_dim, gens):
                raise ValueError("header fields must come before act rows")
            if table is None:
                table = [[[None] * alg_dim for _ in range(dim)] for _ in range(gens)]
            g, e, a = int(parts[1]), int(parts[2]), int(parts[3])
            vals = [_scalar(v) for v in parts[4:]]
            if len(vals) != dim:
                raise ValueError(f"act row needs {dim} values")
            table[g][e][a] = tuple(vals)
        else:
            raise ValueError(f"unknown module field {parts[0]!r}")
    if table is None:
        raise ValueError("module file needs act rows")
    act = tuple(tuple(tuple(row) for row in plane) for plane in table)
    return CoefficientModule(name, dim, alg_dim, act)


def _scalar(tok: str):
    return Fraction(tok) if "/" in tok else int(tok)
