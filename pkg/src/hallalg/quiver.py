"""Symmetric quivers, dimension vectors, variable alphabets and Weyl actions.

A quiver is an arrow-count matrix a[i][j] over a finite vertex set,
required to be symmetric.  A dimension vector gamma attaches gamma[i]
variable slots to vertex i; the resulting alphabet is ordered
lexicographically by (vertex, slot) and is shared by the cohomology
variables x[i,a] and the K-theory variables z[i,a].

The Weyl group here is the product of the symmetric groups on each
vertex's slots; permutations that mix vertices are rejected.  Shuffles
of (gamma1, gamma2) are the minimal-length coset representatives used
by the gauge-level shuffle products: per vertex, a choice of which
slots the first block occupies, in increasing order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence


class QuiverFormatError(ValueError):
    """Raised for malformed quiver data; carries 1-based (i, j) when relevant."""

    def __init__(self, message: str, i: int | None = None, j: int | None = None):
        super().__init__(message)
        self.i = i
        self.j = j


@dataclass(frozen=True)
class Quiver:
    """Symmetric arrow-count matrix over vertices 0..n-1."""

    arrows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = len(self.arrows)
        if n < 1:
            raise QuiverFormatError("quiver needs at least one vertex")
        for i, row in enumerate(self.arrows):
            if len(row) != n:
                raise QuiverFormatError(f"row {i + 1} has {len(row)} entries, expected {n}")
            for j, a in enumerate(row):
                if not isinstance(a, int) or a < 0:
                    raise QuiverFormatError(
                        f"arrow count at ({i + 1},{j + 1}) must be a non-negative integer",
                        i + 1, j + 1,
                    )
        for i in range(n):
            for j in range(i + 1, n):
                if self.arrows[i][j] != self.arrows[j][i]:
                    raise QuiverFormatError(
                        f"quiver is not symmetric at ({i + 1},{j + 1}): "
                        f"a[{i + 1}][{j + 1}]={self.arrows[i][j]} but "
                        f"a[{j + 1}][{i + 1}]={self.arrows[j][i]}",
                        i + 1, j + 1,
                    )

    @property
    def n(self) -> int:
        return len(self.arrows)

    def a(self, i: int, j: int) -> int:
        return self.arrows[i][j]

    @staticmethod
    def from_rows(rows: Sequence[Sequence[int]]) -> "Quiver":
        return Quiver(tuple(tuple(int(x) for x in row) for row in rows))

    @staticmethod
    def one_vertex(loops: int) -> "Quiver":
        return Quiver(((loops,),))

    def __str__(self):
        return ";".join(" ".join(str(a) for a in row) for row in self.arrows)


def parse_quiver(text: str, source: str = "<quiver>") -> Quiver:
    """Parse the quiver file format: first line n, then n rows of n counts."""
    lines = [ln for ln in (raw.strip() for raw in text.splitlines()) if ln and not ln.startswith("#")]
    if not lines:
        raise QuiverFormatError(f"{source}: empty quiver file")
    try:
        n = int(lines[0])
    except ValueError:
        raise QuiverFormatError(f"{source}: first line must be the vertex count, got {lines[0]!r}") from None
    if n < 1:
        raise QuiverFormatError(f"{source}: vertex count must be >= 1, got {n}")
    if len(lines) != n + 1:
        raise QuiverFormatError(f"{source}: expected {n} matrix rows, found {len(lines) - 1}")
    rows = []
    for i, ln in enumerate(lines[1:]):
        parts = ln.split()
        if len(parts) != n:
            raise QuiverFormatError(f"{source}: row {i + 1} has {len(parts)} entries, expected {n}")
        try:
            row = [int(p) for p in parts]
        except ValueError:
            raise QuiverFormatError(f"{source}: row {i + 1} contains a non-integer entry") from None
        rows.append(row)
    try:
        return Quiver.from_rows(rows)
    except QuiverFormatError as exc:
        raise QuiverFormatError(f"{source}: {exc}", exc.i, exc.j) from None


def load_quiver(path) -> Quiver:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_quiver(fh.read(), source=str(path))


DimVector = tuple[int, ...]


def dim(entries: Iterable[int]) -> DimVector:
    gamma = tuple(int(x) for x in entries)
    if any(x < 0 for x in gamma):
        raise ValueError(f"dimension vector must be non-negative, got {gamma}")
    return gamma


def dim_sum(g1: DimVector, g2: DimVector) -> DimVector:
    if len(g1) != len(g2):
        raise ValueError(f"dimension vectors have different lengths: {g1} vs {g2}")
    return tuple(a + b for a, b in zip(g1, g2))


def total(gamma: DimVector) -> int:
    return sum(gamma)


@dataclass(frozen=True)
class VarContext:
    """Variable alphabet of (quiver, gamma): slots (i, alpha), 0-based, lex order."""

    quiver: Quiver
    gamma: DimVector

    def __post_init__(self):
        if len(self.gamma) != self.quiver.n:
            raise ValueError(
                f"dimension vector length {len(self.gamma)} != vertex count {self.quiver.n}"
            )

    @property
    def nvars(self) -> int:
        return sum(self.gamma)

    @property
    def offsets(self) -> tuple[int, ...]:
        out, acc = [], 0
        for g in self.gamma:
            out.append(acc)
            acc += g
        return tuple(out)

    def var_index(self, vertex: int, slot: int) -> int:
        if not (0 <= vertex < self.quiver.n and 0 <= slot < self.gamma[vertex]):
            raise IndexError(f"no variable ({vertex},{slot}) in context gamma={self.gamma}")
        return self.offsets[vertex] + slot

    def var_names(self) -> list[tuple[int, int]]:
        """All (vertex, slot) pairs in variable order (0-based)."""
        return [(i, a) for i in range(self.quiver.n) for a in range(self.gamma[i])]

    def vertex_of(self, var: int) -> int:
        for i in range(self.quiver.n - 1, -1, -1):
            if var >= self.offsets[i]:
                return i
        raise IndexError(var)


@lru_cache(maxsize=None)
def context(quiver: Quiver, gamma: DimVector) -> VarContext:
    return VarContext(quiver, gamma)


def joint_context(quiver: Quiver, g1: DimVector, g2: DimVector) -> VarContext:
    return context(quiver, dim_sum(g1, g2))


@lru_cache(maxsize=None)
def block_maps(quiver: Quiver, g1: DimVector, g2: DimVector) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Variable-index maps embedding the gamma1 alphabet as the first block
    and the gamma2 alphabet as the second block of the joint alphabet."""
    joint = joint_context(quiver, g1, g2)
    c1 = context(quiver, g1)
    c2 = context(quiver, g2)
    map1 = tuple(joint.var_index(i, a) for i, a in c1.var_names())
    map2 = tuple(joint.var_index(i, g1[i] + a) for i, a in c2.var_names())
    return map1, map2


@dataclass(frozen=True)
class VertexPermutation:
    """Element of the product of symmetric groups on each vertex's slots.

    images[i][s] is the slot that slot s of vertex i is sent to.
    """

    images: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        for i, im in enumerate(self.images):
            if sorted(im) != list(range(len(im))):
                raise ValueError(f"images at vertex {i + 1} are not a permutation: {im}")

    @property
    def gamma(self) -> DimVector:
        return tuple(len(im) for im in self.images)

    @staticmethod
    def identity(gamma: DimVector) -> "VertexPermutation":
        return VertexPermutation(tuple(tuple(range(g)) for g in gamma))

    def compose(self, other: "VertexPermutation") -> "VertexPermutation":
        """self after other: (self.compose(other))(s) = self(other(s))."""
        return VertexPermutation(
            tuple(
                tuple(mine[o] for o in theirs)
                for mine, theirs in zip(self.images, other.images)
            )
        )

    def inverse(self) -> "VertexPermutation":
        out = []
        for im in self.images:
            inv = [0] * len(im)
            for s, t in enumerate(im):
                inv[t] = s
            out.append(tuple(inv))
        return VertexPermutation(tuple(out))

    def var_map(self, ctx: VarContext) -> tuple[int, ...]:
        """Old variable index -> new variable index under the relabeling."""
        if self.gamma != ctx.gamma:
            raise ValueError(f"permutation on gamma={self.gamma} does not act on gamma={ctx.gamma}")
        off = ctx.offsets
        out = [0] * ctx.nvars
        for i, im in enumerate(self.images):
            base = off[i]
            for s, t in enumerate(im):
                out[base + s] = base + t
        return tuple(out)


def transposition(gamma: DimVector, vertex: int, s: int, t: int) -> VertexPermutation:
    images = [list(range(g)) for g in gamma]
    images[vertex][s], images[vertex][t] = images[vertex][t], images[vertex][s]
    return VertexPermutation(tuple(tuple(im) for im in images))


def adjacent_transpositions(gamma: DimVector) -> Iterator[VertexPermutation]:
    for i, g in enumerate(gamma):
        for s in range(g - 1):
            yield transposition(gamma, i, s, s + 1)


def all_permutations(gamma: DimVector) -> Iterator[VertexPermutation]:
    """Every element of the product of per-vertex symmetric groups."""
    pools = [list(itertools.permutations(range(g))) for g in gamma]
    for combo in itertools.product(*pools):
        yield VertexPermutation(tuple(combo))


def act(perm: VertexPermutation, element):
    """Relabel an element's variables: x[i,s] -> x[i, perm_i(s)] (same for z)."""
    return element.permuted(perm)


def is_invariant(element) -> bool:
    """True iff the element is fixed by every adjacent slot transposition."""
    for tr in adjacent_transpositions(element.ctx.gamma):
        if element.permuted(tr) != element:
            return False
    return True


@dataclass(frozen=True)
class Shuffle:
    """Per vertex, the increasing slots that the first block is shuffled onto."""

    block1_slots: tuple[tuple[int, ...], ...]

    def to_permutation(self, g1: DimVector, g2: DimVector) -> VertexPermutation:
        """Relabeling of the joint alphabet that moves the canonically embedded
        first block onto block1_slots and the second onto the complement,
        preserving the order within each block."""
        images = []
        for i, slots in enumerate(self.block1_slots):
            g = g1[i] + g2[i]
            rest = [s for s in range(g) if s not in slots]
            images.append(tuple(list(slots) + rest))
        return VertexPermutation(tuple(images))


def enumerate_shuffles(g1: DimVector, g2: DimVector) -> list[Shuffle]:
    """All shuffles of (g1, g2): one subset choice per vertex."""
    if len(g1) != len(g2):
        raise ValueError(f"dimension vectors have different lengths: {g1} vs {g2}")
    per_vertex = [
        list(itertools.combinations(range(a + b), a)) for a, b in zip(g1, g2)
    ]
    return [Shuffle(tuple(combo)) for combo in itertools.product(*per_vertex)]
