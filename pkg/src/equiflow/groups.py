"""Finite symmetry groups and their orthogonal matrix representations.

Groups (cyclic, dihedral, explicit permutation) are stored as Cayley tables
with elements addressed by index, so composition is a table lookup and
everything serializes trivially.  Representation builders cover the planar
rotation/reflection action on R^2, the left regular representation, the
block-diagonal permutation representation, and the trivial representation.
Only orthogonal representations are constructible: the standard-normal base
density is invariant exactly under orthogonal actions, which the invariance
guarantee of equivariant flows relies on.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

DEFAULT_ORDER_CAP = 64

HOMOMORPHISM_TOL = 1e-12
ORTHOGONALITY_TOL = 1e-12

#: flavors whose matrices are exact 0/1 permutations
PERMUTATION_FLAVORS = ("regular", "diagonal-permutation", "trivial")

_GROUP_NAME_RE = re.compile(r"^([CDT])(\d+)$")


def _validate_cayley(table: np.ndarray, identity_index: int) -> None:
    """Brute-force the group axioms on a Cayley table (order <= cap)."""
    n = table.shape[0]
    if table.shape != (n, n):
        raise ValueError(f"cayley table must be square, got shape {table.shape}")
    if table.min() < 0 or table.max() >= n:
        raise ValueError("cayley table entries out of range")
    e = identity_index
    if not (np.array_equal(table[e], np.arange(n)) and np.array_equal(table[:, e], np.arange(n))):
        raise ValueError(f"element {e} is not a two-sided identity")
    ident = np.arange(n)
    for i in range(n):
        if not (np.array_equal(np.sort(table[i]), ident) and np.array_equal(np.sort(table[:, i]), ident)):
            raise ValueError(f"row/column {i} is not a permutation of the elements")
    # associativity: table[table[a,b], c] == table[a, table[b,c]] for all triples
    lhs = table[table, :]
    rhs = np.take(table, table, axis=1)
    if not np.array_equal(lhs, rhs):
        raise ValueError("cayley table is not associative")


class FiniteGroup:
    """A finite group given by a Cayley table; elements are indices 0..order-1."""

    def __init__(self, kind: str, cayley_table: np.ndarray, name: str,
                 element_names: list[str] | None = None, identity_index: int = 0,
                 validate: bool = True):
        self.kind = kind
        self.cayley_table = np.asarray(cayley_table, dtype=np.int64)
        self.order = self.cayley_table.shape[0]
        self.identity_index = identity_index
        self.name = name
        self.element_names = element_names or [f"g{i}" for i in range(self.order)]
        if validate:
            _validate_cayley(self.cayley_table, identity_index)
        inv = np.empty(self.order, dtype=np.int64)
        for i in range(self.order):
            inv[i] = int(np.nonzero(self.cayley_table[i] == identity_index)[0][0])
        self.inverse_table = inv

    def compose_indices(self, i: int, j: int) -> int:
        return int(self.cayley_table[i, j])

    def inverse_index(self, i: int) -> int:
        return int(self.inverse_table[i])

    def element(self, i: int) -> "GroupElement":
        return GroupElement(self, i)

    @property
    def identity(self) -> "GroupElement":
        return GroupElement(self, self.identity_index)

    def elements(self):
        return (GroupElement(self, i) for i in range(self.order))

    def __eq__(self, other) -> bool:
        return (isinstance(other, FiniteGroup)
                and self.order == other.order
                and self.identity_index == other.identity_index
                and np.array_equal(self.cayley_table, other.cayley_table))

    def __hash__(self):
        return hash((self.kind, self.order))

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name}, order={self.order})"


@dataclass(frozen=True)
class GroupElement:
    """An element of a FiniteGroup, identified by its index."""

    group: FiniteGroup
    index: int

    def __post_init__(self):
        if not 0 <= self.index < self.group.order:
            raise ValueError(f"element index {self.index} out of range for order {self.group.order}")

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return compose(self, other)

    @property
    def inverse(self) -> "GroupElement":
        return GroupElement(self.group, self.group.inverse_index(self.index))

    @property
    def name(self) -> str:
        return self.group.element_names[self.index]


def compose(g: GroupElement, h: GroupElement) -> GroupElement:
    """Group law: table lookup cayley_table[g][h]."""
    if g.group is not h.group and g.group != h.group:
        raise ValueError(f"cannot compose elements of different groups "
                         f"({g.group.name} vs {h.group.name})")
    return GroupElement(g.group, g.group.compose_indices(g.index, h.index))


def cyclic_group(n: int, name: str | None = None) -> FiniteGroup:
    """C_n: rotations r^j with r^a r^b = r^{a+b mod n}."""
    if n < 1:
        raise ValueError(f"cyclic group order must be >= 1, got {n}")
    idx = np.arange(n)
    table = (idx[:, None] + idx[None, :]) % n
    names = ["e"] + [f"r{j}" for j in range(1, n)]
    return FiniteGroup("cyclic", table, name or f"C{n}", names)


def dihedral_group(n: int, name: str | None = None) -> FiniteGroup:
    """D_n of order 2n: elements r^j s^f, with s r = r^{-1} s.

    Index convention: j + n*f, so 0..n-1 are rotations and n..2n-1 reflections.
    """
    if n < 1:
        raise ValueError(f"dihedral parameter must be >= 1, got {n}")
    order = 2 * n
    table = np.empty((order, order), dtype=np.int64)
    for a in range(order):
        j1, f1 = a % n, a // n
        for b in range(order):
            j2, f2 = b % n, b // n
            j = (j1 + (j2 if f1 == 0 else -j2)) % n
            f = (f1 + f2) % 2
            table[a, b] = j + n * f
    names = ["e"] + [f"r{j}" for j in range(1, n)]
    names += ["s"] + [f"r{j}s" for j in range(1, n)]
    return FiniteGroup("dihedral", table, name or f"D{n}", names)


def permutation_group(perms: list[tuple[int, ...]], name: str = "perm",
                      order_cap: int = DEFAULT_ORDER_CAP) -> FiniteGroup:
    """Closure of explicit permutations of {0..m-1} as a Cayley-table group."""
    if not perms:
        raise ValueError("need at least one permutation")
    m = len(perms[0])
    norm = []
    for p in perms:
        tp = tuple(int(x) for x in p)
        if sorted(tp) != list(range(m)):
            raise ValueError(f"not a permutation of 0..{m - 1}: {p}")
        norm.append(tp)
    ident = tuple(range(m))
    elements = [ident]
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for a in frontier:
            for b in norm:
                c = tuple(a[b[i]] for i in range(m))
                if c not in seen:
                    if len(elements) >= order_cap:
                        raise ValueError(f"permutation group closure exceeds cap {order_cap}")
                    seen.add(c)
                    elements.append(c)
                    nxt.append(c)
        frontier = nxt
    index = {p: i for i, p in enumerate(elements)}
    order = len(elements)
    table = np.empty((order, order), dtype=np.int64)
    for i, a in enumerate(elements):
        for j, b in enumerate(elements):
            c = tuple(a[b[k]] for k in range(m))
            if c not in index:
                raise ValueError("permutation set is not closed under composition")
            table[i, j] = index[c]
    group = FiniteGroup("explicit-permutation", table, name)
    group.permutations = elements
    return group


def parse_group(name: str) -> FiniteGroup:
    """Resolve config strings like "C4", "D8", "T16" (translations as C_n)."""
    if name == "T":
        raise ValueError('translation group "T" needs an order, e.g. "T8"')
    m = _GROUP_NAME_RE.match(name)
    if not m:
        raise ValueError(f"unrecognized group name {name!r} (expected C<n>, D<n>, or T<n>)")
    kind, n = m.group(1), int(m.group(2))
    if kind == "C":
        return cyclic_group(n)
    if kind == "D":
        return dihedral_group(n)
    return cyclic_group(n, name=name)  # T<n>: cyclic shifts of a circular grid


class Representation:
    """Per-element dim x dim orthogonal matrices forming a homomorphism."""

    def __init__(self, group: FiniteGroup, matrices: np.ndarray, flavor: str,
                 validate: bool = True):
        self.group = group
        self.matrices = np.ascontiguousarray(matrices, dtype=np.float64)
        if self.matrices.shape[0] != group.order or self.matrices.shape[1] != self.matrices.shape[2]:
            raise ValueError(f"expected ({group.order}, d, d) matrices, got {self.matrices.shape}")
        self.dim = self.matrices.shape[1]
        self.flavor = flavor
        if validate:
            self._validate()

    def _validate(self):
        mats = self.matrices
        eye = np.eye(self.dim)
        if not np.allclose(mats[self.group.identity_index], eye, atol=HOMOMORPHISM_TOL):
            raise ValueError("R(identity) != I")
        # orthogonality, required so the base density stays invariant
        gram = np.einsum("gji,gjk->gik", mats, mats)
        err = np.max(np.abs(gram - eye))
        if err > ORTHOGONALITY_TOL:
            raise ValueError(f"representation is not orthogonal (max |R^T R - I| = {err:.3e})")
        # homomorphism over the full Cayley table
        prod = np.einsum("gij,hjk->ghik", mats, mats)
        expected = mats[self.group.cayley_table]
        err = np.max(np.abs(prod - expected))
        if err > HOMOMORPHISM_TOL:
            raise ValueError(f"R(g)R(h) != R(gh) (max error {err:.3e})")
        if self.flavor in PERMUTATION_FLAVORS:
            if not np.all((mats == 0.0) | (mats == 1.0)):
                raise ValueError(f"flavor {self.flavor!r} requires 0/1 permutation matrices")
            if not (np.all(mats.sum(axis=1) == 1.0) and np.all(mats.sum(axis=2) == 1.0)):
                raise ValueError("permutation matrices must be doubly stochastic")

    def matrix(self, g: GroupElement | int) -> np.ndarray:
        i = g.index if isinstance(g, GroupElement) else int(g)
        return self.matrices[i]

    @property
    def is_permutation(self) -> bool:
        return self.flavor in PERMUTATION_FLAVORS

    def permutation_indices(self, g: GroupElement | int) -> np.ndarray:
        """For permutation flavors: p with (R(g) x)[i] = x[p[i]]."""
        if not self.is_permutation:
            raise ValueError(f"flavor {self.flavor!r} is not a permutation representation")
        return np.argmax(self.matrix(g), axis=1)

    def __repr__(self) -> str:
        return f"Representation({self.group.name}, dim={self.dim}, flavor={self.flavor!r})"


def rotation2d_rep(group: FiniteGroup) -> Representation:
    """Planar action of C_n / D_n: rotations by 2*pi*j/n, reflections via diag(1,-1)."""
    if group.kind == "cyclic":
        n = group.order
        reflections = 0
    elif group.kind == "dihedral":
        n = group.order // 2
        reflections = 1
    else:
        raise ValueError(f"no canonical planar action for kind {group.kind!r}")
    mats = np.empty((group.order, 2, 2))
    flip = np.diag([1.0, -1.0])
    for i in range(group.order):
        j = i % n
        theta = 2.0 * np.pi * j / n
        rot = np.array([[np.cos(theta), -np.sin(theta)],
                        [np.sin(theta), np.cos(theta)]])
        mats[i] = rot @ flip if (reflections and i >= n) else rot
    return Representation(group, mats, "rotation2d")


def regular_rep(group: FiniteGroup, order_cap: int = DEFAULT_ORDER_CAP) -> Representation:
    """Left regular representation: R(g) e_j = e_{g.j}, dim = |G|."""
    if group.order > order_cap:
        raise ValueError(f"group order {group.order} exceeds cap {order_cap}")
    n = group.order
    mats = np.zeros((n, n, n))
    for g in range(n):
        for j in range(n):
            mats[g, group.compose_indices(g, j), j] = 1.0
    return Representation(group, mats, "regular")


def diagonal_permutation_rep(base: Representation, k: int) -> Representation:
    """Block-diagonal repetition of a permutation representation across k blocks."""
    if not base.is_permutation:
        raise ValueError(f"base flavor {base.flavor!r} is not a permutation representation")
    if k < 2:
        raise ValueError(f"need k >= 2 blocks, got {k}")
    d = base.dim
    mats = np.zeros((base.group.order, k * d, k * d))
    for g in range(base.group.order):
        for b in range(k):
            mats[g, b * d:(b + 1) * d, b * d:(b + 1) * d] = base.matrices[g]
    rep = Representation(base.group, mats, "diagonal-permutation")
    rep.base = base
    rep.n_blocks = k
    return rep


def trivial_rep(group: FiniteGroup, dim: int = 1) -> Representation:
    """R(g) = I for every g."""
    mats = np.broadcast_to(np.eye(dim), (group.order, dim, dim)).copy()
    return Representation(group, mats, "trivial")


def act(rep: Representation, g: GroupElement | int, x: np.ndarray) -> np.ndarray:
    """Apply R(g) to a vector (or batch of row vectors)."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != rep.dim:
        raise ValueError(f"vector has dim {x.shape[-1]}, representation has dim {rep.dim}")
    return x @ rep.matrix(g).T


def rep_from_config(cfg: dict, group: FiniteGroup) -> Representation:
    """Rebuild a representation from its serialized descriptor."""
    flavor = cfg["flavor"]
    if flavor == "rotation2d":
        return rotation2d_rep(group)
    if flavor == "regular":
        return regular_rep(group)
    if flavor == "trivial":
        return trivial_rep(group, dim=int(cfg.get("dim", 1)))
    if flavor == "diagonal-permutation":
        base = rep_from_config(cfg["base"], group)
        return diagonal_permutation_rep(base, int(cfg["blocks"]))
    raise ValueError(f"unknown representation flavor {flavor!r}")


def rep_to_config(rep: Representation) -> dict:
    if rep.flavor == "rotation2d":
        return {"flavor": "rotation2d"}
    if rep.flavor == "regular":
        return {"flavor": "regular"}
    if rep.flavor == "trivial":
        return {"flavor": "trivial", "dim": rep.dim}
    if rep.flavor == "diagonal-permutation":
        return {"flavor": "diagonal-permutation",
                "base": rep_to_config(rep.base),
                "blocks": rep.n_blocks}
    raise ValueError(f"representation flavor {rep.flavor!r} has no serialized form")
