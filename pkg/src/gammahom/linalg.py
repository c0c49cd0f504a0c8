"""Sparse exact linear algebra: rank over fields, Smith normal form over Z,
integer kernel lattices, and homology of a pair of composable differentials.

Matrices are immutable-ish ``SparseMatrix`` values (dict of nonzero entries).
The elimination routines copy into mutable dict-of-dict row structures and
never touch floating point.  Pivoting prefers units and small fill-in, which
keeps the factorially wide boundary matrices from blowing up.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .rings import RingSpec, ZZ, QQ


def xgcd(a: int, b: int):
    """Extended gcd: returns (x, y, g) with x*a + y*b == g >= 0."""
    x, next_x = 1, 0
    y, next_y = 0, 1
    g, next_g = a, b
    while next_g:
        q = g // next_g
        x, next_x = next_x, x - q * next_x
        y, next_y = next_y, y - q * next_y
        g, next_g = next_g, g - q * next_g
    if g < 0:
        x, y, g = -x, -y, -g
    return x, y, g


class SparseMatrix:
    """A rows x cols matrix storing only nonzero entries.

    ``entries`` maps (row, col) -> value with 0-based indices.  Stored zero
    values are dropped on construction so equality of the dicts is equality
    of matrices.
    """

    __slots__ = ("n_rows", "n_cols", "entries")

    def __init__(self, n_rows: int, n_cols: int, entries=None):
        if n_rows < 0 or n_cols < 0:
            raise ValueError("negative matrix dimensions")
        self.n_rows = n_rows
        self.n_cols = n_cols
        self.entries = {}
        if entries:
            items = entries.items() if isinstance(entries, dict) else entries
            for (i, j), v in items:
                if not (0 <= i < n_rows and 0 <= j < n_cols):
                    raise IndexError(f"entry ({i},{j}) outside {n_rows}x{n_cols}")
                if v:
                    self.entries[(i, j)] = v

    @classmethod
    def from_rows(cls, rows):
        n_rows = len(rows)
        n_cols = len(rows[0]) if rows else 0
        entries = {}
        for i, row in enumerate(rows):
            for j, v in enumerate(row):
                if v:
                    entries[(i, j)] = v
        return cls(n_rows, n_cols, entries)

    @classmethod
    def zero(cls, n_rows: int, n_cols: int):
        return cls(n_rows, n_cols)

    @classmethod
    def identity(cls, n: int):
        return cls(n, n, {(i, i): 1 for i in range(n)})

    def __eq__(self, other):
        return (isinstance(other, SparseMatrix)
                and (self.n_rows, self.n_cols) == (other.n_rows, other.n_cols)
                and self.entries == other.entries)

    def __repr__(self):
        return f"SparseMatrix({self.n_rows}x{self.n_cols}, {len(self.entries)} entries)"

    def is_zero(self) -> bool:
        return not self.entries

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(self.n_cols, self.n_rows,
                            {(j, i): v for (i, j), v in self.entries.items()})

    def rows(self):
        """Dense row-of-lists copy (use only on small matrices)."""
        out = [[0] * self.n_cols for _ in range(self.n_rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def mul(self, other: "SparseMatrix", ring: "RingSpec | None" = None) -> "SparseMatrix":
        """Exact sparse product self @ other.

        Pass the ring for matrices over F_p so entries reduce mod p; plain
        int / Fraction arithmetic is exact for Z and Q.
        """
        if self.n_cols != other.n_rows:
            raise ValueError(f"shape mismatch {self.n_rows}x{self.n_cols} @ "
                             f"{other.n_rows}x{other.n_cols}")
        by_row = {}
        for (k, j), v in other.entries.items():
            by_row.setdefault(k, []).append((j, v))
        acc = {}
        for (i, k), u in self.entries.items():
            for j, v in by_row.get(k, ()):
                key = (i, j)
                acc[key] = acc.get(key, 0) + u * v
        if ring is not None:
            acc = {k: ring.coerce(v) for k, v in acc.items()}
        return SparseMatrix(self.n_rows, other.n_cols, acc)

    def map_values(self, fn) -> "SparseMatrix":
        return SparseMatrix(self.n_rows, self.n_cols,
                            {k: fn(v) for k, v in self.entries.items()})

    # -- text dump format ----------------------------------------------
    # header "rows cols", then one line "row col value" per nonzero entry.

    def dump(self) -> str:
        lines = [f"{self.n_rows} {self.n_cols}"]
        for (i, j) in sorted(self.entries):
            lines.append(f"{i} {j} {self.entries[(i, j)]}")
        return "\n".join(lines) + "\n"

    @classmethod
    def load(cls, text: str) -> "SparseMatrix":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        n_rows, n_cols = map(int, lines[0].split())
        entries = {}
        for ln in lines[1:]:
            i, j, v = ln.split()
            entries[(int(i), int(j))] = int(v)
        return cls(n_rows, n_cols, entries)


def _to_row_dicts(m: SparseMatrix, ring: RingSpec | None = None):
    rows = {}
    for (i, j), v in m.entries.items():
        if ring is not None:
            v = ring.coerce(v)
        if v or (ring is not None and not ring.is_zero(v)):
            rows.setdefault(i, {})[j] = v
    return rows


def rank(m: SparseMatrix, ring: RingSpec) -> int:
    """Rank of ``m`` over a field.  Deterministic w.r.t. the entry set.

    Rejects Z; integral homology goes through ``smith_normal_form``.
    """
    if not ring.is_field:
        raise ValueError("rank over Z is not defined here; use smith_normal_form")
    rows = _to_row_dicts(m, ring)
    rows = {i: r for i, r in rows.items() if any(not ring.is_zero(v) for v in r.values())}
    rnk = 0
    # Eliminate column by column; among candidate rows pick the sparsest,
    # tie-broken by row index so the result never depends on dict order.
    col_to_rows = {}
    for i, r in rows.items():
        for j in r:
            col_to_rows.setdefault(j, set()).add(i)
    for j in sorted(col_to_rows):
        cand = [i for i in col_to_rows.get(j, ()) if i in rows and j in rows[i]]
        if not cand:
            continue
        piv = min(cand, key=lambda i: (len(rows[i]), i))
        prow = rows.pop(piv)
        rnk += 1
        inv = ring.inv(prow[j])
        for i in list(col_to_rows.get(j, ())):
            if i == piv or i not in rows or j not in rows[i]:
                continue
            row = rows[i]
            factor = ring.mul(row[j], inv)
            for jj, v in prow.items():
                nv = ring.sub(row.get(jj, ring.zero()), ring.mul(factor, v))
                if ring.is_zero(nv):
                    row.pop(jj, None)
                else:
                    if jj not in row:
                        col_to_rows.setdefault(jj, set()).add(i)
                    row[jj] = nv
            if not row:
                del rows[i]
    return rnk


def rank_over_q_int(m: SparseMatrix) -> int:
    """Rank over Q of an integer matrix (what Smith normal form would count)."""
    return rank(m, QQ)


def kernel_basis_field(m: SparseMatrix, ring: RingSpec):
    """Basis of ker(m) over a field, from the reduced row echelon form.

    Returns a list of dense column vectors (lists of ring elements), in the
    lexicographically-first reduced-echelon convention: free columns in
    increasing order, each vector has 1 at its free column.
    """
    if not ring.is_field:
        raise ValueError("field kernels only; integer lattices use kernel_basis_int")
    n = m.n_cols
    rows = [dict(r) for r in _to_row_dicts(m, ring).values()]
    pivots = {}  # col -> reduced tail (pivot coefficient 1, not stored)
    for row in rows:
        while row:
            j = min(row)
            if j in pivots:
                factor = row.pop(j)
                for jj, v in pivots[j].items():
                    nv = ring.sub(row.get(jj, ring.zero()), ring.mul(factor, v))
                    if ring.is_zero(nv):
                        row.pop(jj, None)
                    else:
                        row[jj] = nv
            else:
                inv = ring.inv(row.pop(j))
                pivots[j] = {jj: ring.mul(inv, v) for jj, v in row.items()}
                break
    # Back-substitute to full reduction.
    for j in sorted(pivots, reverse=True):
        prow = pivots[j]
        for j2, prow2 in pivots.items():
            if j2 >= j or j not in prow2:
                continue
            factor = prow2.pop(j)
            for jj, v in prow.items():
                nv = ring.sub(prow2.get(jj, ring.zero()), ring.mul(factor, v))
                if ring.is_zero(nv):
                    prow2.pop(jj, None)
                else:
                    prow2[jj] = nv
    free = [j for j in range(n) if j not in pivots]
    basis = []
    for f in free:
        vec = [ring.zero()] * n
        vec[f] = ring.one()
        for j, prow in pivots.items():
            if f in prow:
                vec[j] = ring.neg(prow[f])
        basis.append(vec)
    return basis


def solve_field(m: SparseMatrix, targets, ring: RingSpec):
    """Solve m @ x = t for each dense target column; raises if inconsistent.

    Used to express cycles in a chosen cycle basis, where solvability is a
    structural guarantee and failure means an upstream bug.
    """
    rows = _to_row_dicts(m, ring)
    aug = []
    n_t = len(targets)
    for i in range(m.n_rows):
        row = dict(rows.get(i, {}))
        for k, t in enumerate(targets):
            v = ring.coerce(t[i])
            if not ring.is_zero(v):
                row[m.n_cols + k] = v
        if row:
            aug.append(row)
    pivots = {}
    for row in aug:
        row = dict(row)
        while row:
            j = min(row)
            if j >= m.n_cols:
                raise ArithmeticError("inconsistent linear system")
            if j in pivots:
                factor = row.pop(j)
                for jj, v in pivots[j].items():
                    nv = ring.sub(row.get(jj, ring.zero()), ring.mul(factor, v))
                    if ring.is_zero(nv):
                        row.pop(jj, None)
                    else:
                        row[jj] = nv
            else:
                inv = ring.inv(row.pop(j))
                pivots[j] = {jj: ring.mul(inv, v) for jj, v in row.items()}
                break
    for j in sorted(pivots, reverse=True):
        prow = pivots[j]
        for j2, prow2 in pivots.items():
            if j2 >= j or j not in prow2:
                continue
            factor = prow2.pop(j)
            for jj, v in prow.items():
                nv = ring.sub(prow2.get(jj, ring.zero()), ring.mul(factor, v))
                if ring.is_zero(nv):
                    prow2.pop(jj, None)
                else:
                    prow2[jj] = nv
    sols = []
    for k in range(n_t):
        col = m.n_cols + k
        x = [ring.zero()] * m.n_cols
        for j, prow in pivots.items():
            if col in prow:
                x[j] = prow[col]
        sols.append(x)
    return sols


# ---------------------------------------------------------------------------
# Integer elimination: Smith normal form, Hermite kernels
# ---------------------------------------------------------------------------


class _SparseIntWork:
    """Mutable dict-of-dicts integer matrix with a column index, for SNF."""

    def __init__(self, m: SparseMatrix):
        self.rows = {}
        self.cols = {}
        for (i, j), v in m.entries.items():
            self.rows.setdefault(i, {})[j] = int(v)
            self.cols.setdefault(j, set()).add(i)

    def set(self, i, j, v):
        if v:
            self.rows.setdefault(i, {})[j] = v
            self.cols.setdefault(j, set()).add(i)
        else:
            row = self.rows.get(i)
            if row and j in row:
                del row[j]
                if not row:
                    del self.rows[i]
                self.cols[j].discard(i)
                if not self.cols[j]:
                    del self.cols[j]

    def get(self, i, j):
        return self.rows.get(i, {}).get(j, 0)

    def add_multiple_of_row(self, dst, src, q):
        # row[dst] += q * row[src]
        if q == 0:
            return
        for j, v in list(self.rows.get(src, {}).items()):
            self.set(dst, j, self.get(dst, j) + q * v)

    def swap_rows(self, a, b):
        if a == b:
            return
        ra, rb = self.rows.pop(a, {}), self.rows.pop(b, {})
        for j in ra:
            self.cols[j].discard(a)
        for j in rb:
            self.cols[j].discard(b)
        if rb:
            self.rows[a] = rb
            for j in rb:
                self.cols.setdefault(j, set()).add(a)
        if ra:
            self.rows[b] = ra
            for j in ra:
                self.cols.setdefault(j, set()).add(b)

    def add_multiple_of_col(self, dst, src, q):
        if q == 0:
            return
        for i in list(self.cols.get(src, set())):
            self.set(i, dst, self.get(i, dst) + q * self.rows[i][src])

    def pick_pivot(self):
        """Entry with smallest (|v| != 1, |v|, fill) - unit pivots first.

        Fill is the Markowitz count (nnz(row)-1)*(nnz(col)-1); tie-break on
        (i, j) keeps everything deterministic.
        """
        best = None
        best_key = None
        for i, row in self.rows.items():
            rl = len(row) - 1
            for j, v in row.items():
                a = abs(v)
                key = (a != 1, a, rl * (len(self.cols[j]) - 1), i, j)
                if best_key is None or key < best_key:
                    best_key = key
                    best = (i, j)
                    if key[:3] == (False, 1, 0):
                        return best
        return best


def smith_normal_form(m: SparseMatrix):
    """Nonzero invariant factors d1 | d2 | ... of an integer matrix.

    The count of factors equals the rank over Q.  An empty matrix gives [].
    """
    work = _SparseIntWork(m)
    diagonal = []
    while work.rows:
        i0, j0 = work.pick_pivot()
        # Clear row j0 / column j0 with gcd row and column operations until
        # the pivot is alone; with a unit pivot one pass suffices.
        while True:
            col_rows = [i for i in work.cols.get(j0, set()) if i != i0]
            for i in sorted(col_rows):
                a = work.get(i0, j0)
                b = work.get(i, j0)
                if b == 0:
                    continue
                if b % a == 0:
                    work.add_multiple_of_row(i, i0, -(b // a))
                else:
                    x, y, g = xgcd(a, b)
                    # Replace rows (r0, ri) by (x r0 + y ri, -(b/g) r0 + (a/g) ri).
                    r0 = dict(work.rows.get(i0, {}))
                    ri = dict(work.rows.get(i, {}))
                    for j in set(r0) | set(ri):
                        u, v = r0.get(j, 0), ri.get(j, 0)
                        work.set(i0, j, x * u + y * v)
                        work.set(i, j, (-(b // g)) * u + (a // g) * v)
            row_cols = [j for j in work.rows.get(i0, {}) if j != j0]
            if not row_cols:
                break
            for j in sorted(row_cols):
                a = work.get(i0, j0)
                b = work.get(i0, j)
                if b == 0:
                    continue
                if b % a == 0:
                    work.add_multiple_of_col(j, j0, -(b // a))
                else:
                    x, y, g = xgcd(a, b)
                    c0 = {i: work.rows[i][j0] for i in work.cols.get(j0, set())}
                    cj = {i: work.rows[i][j] for i in work.cols.get(j, set())}
                    for i in set(c0) | set(cj):
                        u, v = c0.get(i, 0), cj.get(i, 0)
                        work.set(i, j0, x * u + y * v)
                        work.set(i, j, (-(b // g)) * u + (a // g) * v)
            if all(i == i0 for i in work.cols.get(j0, set())):
                break
        d = abs(work.get(i0, j0))
        diagonal.append(d)
        work.set(i0, j0, 0)
    # Repair divisibility: d_i | d_{i+1} via gcd/lcm passes.
    diagonal.sort()
    changed = True
    while changed:
        changed = False
        for k in range(len(diagonal) - 1):
            a, b = diagonal[k], diagonal[k + 1]
            if b % a != 0:
                g = gcd(a, b)
                diagonal[k], diagonal[k + 1] = g, a * b // g
                changed = True
        diagonal.sort()
    return diagonal


def kernel_basis_int(m: SparseMatrix):
    """Basis of the kernel lattice ker(m) inside Z^n_cols.

    Column-style Hermite reduction: unimodular column operations zero out
    columns, and the recorded transforms on the zeroed columns form a basis
    of the saturated kernel lattice.  The basis is put in column Hermite
    normal form so it is canonical.
    """
    n = m.n_cols
    cols = {j: {} for j in range(n)}
    for (i, j), v in m.entries.items():
        cols[j][i] = int(v)
    transform = {j: {j: 1} for j in range(n)}  # column j of U
    live = sorted(cols)
    for i in range(m.n_rows):
        active = [j for j in live if cols[j].get(i)]
        if not active:
            continue
        # Combine columns so only the first active one keeps a nonzero at row i.
        j0 = active[0]
        for j in active[1:]:
            a, b = cols[j0][i], cols[j][i]
            if b % a == 0:
                q = -(b // a)
                _col_addmul(cols, transform, j, j0, q)
            else:
                x, y, g = xgcd(a, b)
                _col_combine(cols, transform, j0, j, x, y, -(b // g), a // g)
        live.remove(j0)
    kernel = [transform[j] for j in sorted(live)]
    vecs = [[col.get(k, 0) for k in range(n)] for col in kernel]
    return hermite_reduce_vectors(vecs)


def _col_addmul(cols, transform, dst, src, q):
    if q == 0:
        return
    for i, v in cols[src].items():
        nv = cols[dst].get(i, 0) + q * v
        if nv:
            cols[dst][i] = nv
        else:
            cols[dst].pop(i, None)
    for i, v in transform[src].items():
        nv = transform[dst].get(i, 0) + q * v
        if nv:
            transform[dst][i] = nv
        else:
            transform[dst].pop(i, None)


def _col_combine(cols, transform, j0, j, x, y, z, w):
    # (col_j0, col_j) <- (x col_j0 + y col_j, z col_j0 + w col_j); det = xw - yz = +-1
    for store in (cols, transform):
        c0, cj = store[j0], store[j]
        keys = set(c0) | set(cj)
        n0, nj = {}, {}
        for i in keys:
            u, v = c0.get(i, 0), cj.get(i, 0)
            a = x * u + y * v
            b = z * u + w * v
            if a:
                n0[i] = a
            if b:
                nj[i] = b
        store[j0], store[j] = n0, nj


def hermite_reduce_vectors(vecs):
    """Canonical (column HNF) basis of the lattice spanned by integer vectors.

    Pivot entries positive, entries above each pivot reduced to [0, pivot).
    """
    work = [list(v) for v in vecs]
    n = len(vecs[0]) if vecs else 0
    basis = []
    pivot_positions = []
    for i in range(n):
        active = [v for v in work if v[i] != 0]
        if not active:
            continue
        rest = [v for v in work if v[i] == 0]
        acc = active[0]
        for v in active[1:]:
            a, b = acc[i], v[i]
            if b % a == 0:
                q = b // a
                v2 = [vb - q * va for va, vb in zip(acc, v)]
            else:
                x, y, g = xgcd(a, b)
                new_acc = [x * va + y * vb for va, vb in zip(acc, v)]
                v2 = [(-(b // g)) * va + (a // g) * vb for va, vb in zip(acc, v)]
                acc = new_acc
            if any(v2):
                rest.append(v2)
        if acc[i] < 0:
            acc = [-x for x in acc]
        basis.append(acc)
        pivot_positions.append(i)
        work = rest
    # Reduce above-pivot entries.
    for k in range(len(basis) - 1, -1, -1):
        i = pivot_positions[k]
        p = basis[k][i]
        for k2 in range(k):
            q = basis[k2][i] // p
            if q:
                basis[k2] = [a - q * b for a, b in zip(basis[k2], basis[k])]
    return basis


def solve_int_lattice(basis, target):
    """Integer coordinates of ``target`` in a Hermite-reduced lattice basis.

    Raises ``ArithmeticError`` when the vector is not in the lattice; callers
    rely on membership as a structural invariant.
    """
    t = list(target)
    coords = [0] * len(basis)
    pivots = []
    for k, vec in enumerate(basis):
        for i, x in enumerate(vec):
            if x:
                pivots.append((i, k))
                break
    for i, k in pivots:
        p = basis[k][i]
        if t[i] % p != 0:
            raise ArithmeticError("vector not in lattice")
        q = t[i] // p
        coords[k] = q
        if q:
            t = [a - q * b for a, b in zip(t, basis[k])]
    if any(t):
        raise ArithmeticError("vector not in lattice")
    return coords


# ---------------------------------------------------------------------------
# Homology of a pair of composable differentials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HomologySummary:
    """Betti number and (over Z) invariant factors > 1 of one homology group."""

    degree: int
    betti: int
    torsion: tuple = ()

    def group_name(self) -> str:
        parts = ["Z"] * self.betti + [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) if parts else "0"


class CompositionError(ValueError):
    """d_out o d_in != 0: signals a sign or assembly bug upstream."""


def homology_at(d_in: SparseMatrix, d_out: SparseMatrix, ring: RingSpec,
                degree: int = 0) -> HomologySummary:
    """Homology at the middle of  C_{d+1} --d_in--> C_d --d_out--> C_{d-1}.

    Over a field: betti = (dim C_d - rank d_out) - rank d_in.
    Over Z: the kernel of d_out is saturated in C_d, so the torsion of
    ker/im equals the torsion of C_d/im, i.e. the invariant factors > 1 of
    d_in; betti comes from the ranks.
    """
    if d_out.n_cols != d_in.n_rows:
        raise ValueError(f"middle dimension mismatch: d_out has {d_out.n_cols} columns, "
                         f"d_in has {d_in.n_rows} rows")
    if not d_out.mul(d_in, ring).is_zero():
        raise CompositionError("d_out o d_in != 0")
    if ring.is_field:
        betti = (d_out.n_cols - rank(d_out, ring)) - rank(d_in, ring)
        return HomologySummary(degree, betti, ())
    factors = smith_normal_form(d_in)
    null_out = d_out.n_cols - rank_over_q_int(d_out)
    betti = null_out - len(factors)
    torsion = tuple(d for d in factors if d > 1)
    return HomologySummary(degree, betti, torsion)
