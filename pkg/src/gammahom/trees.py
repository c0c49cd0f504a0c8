"""Rooted-tree monomials for the free operad on binary generators.

A monomial is a nested tuple: a leaf is its integer label, an internal vertex
is ``('N', label_index, left, right)``.  Canonical form puts the subtree
containing the smallest leaf on the left at every vertex, so each abstract
tree has exactly one planar representative.  Reordering the children of a
vertex acts on the vertex label through the transposition action of the
binary generator space.
"""

from __future__ import annotations

from dataclasses import dataclass


def is_leaf(key) -> bool:
    return isinstance(key, int)


def min_leaf(key) -> int:
    while not is_leaf(key):
        key = key[2]  # canonical: leftmost subtree holds the minimum
    return key


def leaves(key):
    if is_leaf(key):
        return (key,)
    return leaves(key[2]) + leaves(key[3])


def arity(key) -> int:
    return len(leaves(key))


def vertex_count(key) -> int:
    if is_leaf(key):
        return 0
    return 1 + vertex_count(key[2]) + vertex_count(key[3])


def sort_form(key):
    """Totally ordered encoding of a monomial (leaves before vertices)."""
    if is_leaf(key):
        return (0, key)
    return (1, key[1], sort_form(key[2]), sort_form(key[3]))


def node(label_idx: int, left, right):
    """Canonical vertex constructor; callers must pass min(left) < min(right)."""
    return ("N", label_idx, left, right)


def relabel(key, images, sigma2_rows):
    """Apply a leaf relabeling and recanonicalize.

    ``images`` maps old leaf label -> new label (a dict or 1-based tuple).
    ``sigma2_rows`` is the transposition action matrix on the generator
    space, rows indexing output basis elements.  Returns {monomial: coeff}.
    """
    out = {}
    lookup = images.__getitem__ if isinstance(images, dict) else (lambda v: images[v - 1])
    for coeff, new_key in _relabel_terms(key, lookup, sigma2_rows):
        out[new_key] = out.get(new_key, 0) + coeff
    return {k: v for k, v in out.items() if v}


def _relabel_terms(key, lookup, sigma2_rows):
    if is_leaf(key):
        return [(1, lookup(key))]
    _, g, left, right = key
    out = []
    for cl, kl in _relabel_terms(key[2], lookup, sigma2_rows):
        for cr, kr in _relabel_terms(key[3], lookup, sigma2_rows):
            c = cl * cr
            if min_leaf(kl) < min_leaf(kr):
                out.append((c, ("N", g, kl, kr)))
            else:
                # Swapping the children twists the label by the generator
                # transposition action.
                for m, s in enumerate(row_column(sigma2_rows, g)):
                    if s:
                        out.append((c * s, ("N", m, kr, kl)))
    return out


def row_column(rows, j):
    return [rows[m][j] for m in range(len(rows))]


def graft(a_key, slot: int, b_key):
    """Partial composition of canonical monomials: plug ``b`` into leaf
    ``slot`` of ``a`` (1-based), with the usual input renumbering.

    Grafting preserves canonical form because the new subtree keeps the rank
    of the leaf it replaces.
    """
    n = arity(b_key)
    shift_b = slot - 1

    def shift_a(key):
        if is_leaf(key):
            if key == slot:
                return _shift(b_key, shift_b)
            return key + (n - 1) if key > slot else key
        return ("N", key[1], shift_a(key[2]), shift_a(key[3]))

    return shift_a(a_key)


def _shift(key, d):
    if is_leaf(key):
        return key + d
    return ("N", key[1], _shift(key[2], d), _shift(key[3], d))


def enumerate_free_monomials(r: int, gen_dim: int):
    """Canonical basis of the arity-r free-operad component, sorted.

    Counts (number of binary trees with r labeled leaves) x gen_dim^(r-1).
    """
    keys = list(_trees(tuple(range(1, r + 1)), gen_dim))
    keys.sort(key=sort_form)
    return keys


def _trees(labels, gen_dim):
    if len(labels) == 1:
        yield labels[0]
        return
    first, rest = labels[0], labels[1:]
    # The block containing the smallest label is the left child.
    for mask in range(1 << len(rest)):
        left_labels = (first,) + tuple(l for k, l in enumerate(rest) if mask & (1 << k))
        right_labels = tuple(l for k, l in enumerate(rest) if not mask & (1 << k))
        if not right_labels:
            continue
        for lt in _trees(left_labels, gen_dim):
            for rt in _trees(right_labels, gen_dim):
                for g in range(gen_dim):
                    yield ("N", g, lt, rt)


def render(key, gen_names=None) -> str:
    if is_leaf(key):
        return str(key)
    name = gen_names[key[1]] if gen_names else f"m{key[1]}"
    return f"{name}({render(key[2], gen_names)},{render(key[3], gen_names)})"


@dataclass(frozen=True)
class TreeMonomial:
    """A free-operad basis element: binary tree shape, vertex generator
    indices and leaf labels, all packed into the canonical nested-tuple key."""

    key: tuple

    @property
    def arity(self) -> int:
        return arity(self.key)

    @property
    def internal_vertices(self) -> int:
        return vertex_count(self.key)

    def __str__(self):
        return render(self.key)
