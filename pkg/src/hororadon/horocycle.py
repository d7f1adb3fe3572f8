"""Functions on the space of horocycles.

A horocycle is ``h^v_{w,n} = {x : kappa_w(v, x) = n}``. Fixing a base vertex
``v`` identifies horocycles with pairs (end, index); a :class:`HoroFunction`
stores a function on horocycles in that chart, cylindrically in the end.
Changing the base shifts the index by ``kappa_w(v, u)`` cylinder by cylinder,
and that is the only legitimate way to compare tables with different bases.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InsufficientCylinderDepth
from .tree import Isometry, Tree, Vertex, q_half_power


def half_powers(q: int, n_min: int, n_max: int) -> np.ndarray:
    """q^{n/2} for n = n_min..n_max."""
    return np.array([q_half_power(q, n) for n in range(n_min, n_max + 1)])


@dataclass(frozen=True, eq=False)
class HoroFunction:
    """F(h^base_{w,n}) = values[cylinder of w][n - n_min]; zero outside the n range.

    Integer tables (dtype int64 or object) are treated as exact data.
    """

    tree: Tree
    base: Vertex
    depth: int
    n_min: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.ndim != 2 or vals.shape[0] != self.tree.num_cylinders(self.depth):
            raise ValueError(
                f"values must have shape ({self.tree.num_cylinders(self.depth)}, N), "
                f"got {vals.shape}")
        if self.depth < len(self.base):
            raise InsufficientCylinderDepth(len(self.base), self.depth, "HoroFunction base")
        object.__setattr__(self, "base", tuple(self.base))
        object.__setattr__(self, "values", vals)

    @property
    def n_max(self) -> int:
        return self.n_min + self.values.shape[1] - 1

    @property
    def is_exact(self) -> bool:
        return self.values.dtype.kind in "iuO"

    @classmethod
    def zeros(cls, tree: Tree, base: Vertex, depth: int, n_min: int, n_max: int,
              dtype=np.int64) -> "HoroFunction":
        shape = (tree.num_cylinders(depth), max(n_max - n_min + 1, 0))
        return cls(tree, tuple(base), depth, n_min, np.zeros(shape, dtype=dtype))

    def value(self, u: Vertex, n: int):
        """F(h^base_{w,n}) for w in Omega(u), ``len(u) >= depth``."""
        if len(u) < self.depth:
            raise InsufficientCylinderDepth(self.depth, len(u), "evaluate")
        if not self.n_min <= n <= self.n_max:
            return self.values.dtype.type(0)
        i = self.tree.cylinder_index(self.depth)[u[: self.depth]]
        return self.values[i, n - self.n_min]

    def refine(self, depth: int) -> "HoroFunction":
        if depth == self.depth:
            return self
        parent = self.tree.parent_index(self.depth, depth)
        return HoroFunction(self.tree, self.base, depth, self.n_min, self.values[parent])

    def pad(self, n_min: int, n_max: int) -> "HoroFunction":
        """Same function stored on a wider index window."""
        if n_min > self.n_min or n_max < self.n_max:
            raise ValueError("pad can only widen the index window")
        out = np.zeros((self.values.shape[0], n_max - n_min + 1), dtype=self.values.dtype)
        out[:, self.n_min - n_min : self.n_max - n_min + 1] = self.values
        return HoroFunction(self.tree, self.base, self.depth, n_min, out)

    def trim(self) -> "HoroFunction":
        """Drop all-zero index columns at both ends."""
        nz = np.flatnonzero(np.any(self.values != 0, axis=0))
        if nz.size == 0:
            return HoroFunction(self.tree, self.base, self.depth, 0, self.values[:, :1] * 0)
        lo, hi = int(nz[0]), int(nz[-1])
        return HoroFunction(self.tree, self.base, self.depth, self.n_min + lo,
                            self.values[:, lo : hi + 1])

    def __add__(self, other: "HoroFunction") -> "HoroFunction":
        A, B, ref = align(self, other)
        return HoroFunction(ref.tree, ref.base, ref.depth, ref.n_min, A + B)

    def scale(self, c) -> "HoroFunction":
        return HoroFunction(self.tree, self.base, self.depth, self.n_min, self.values * c)


@dataclass(frozen=True, eq=False)
class AbelTable:
    """Pullback q^{n/2} (F o Psi_base)(w, n) of a horocycle function."""

    tree: Tree
    base: Vertex
    depth: int
    n_min: int
    values: np.ndarray

    @property
    def n_max(self) -> int:
        return self.n_min + self.values.shape[1] - 1

    def l2_norm(self) -> float:
        """Norm in L^2(nu^base x counting measure on Z)."""
        nu = self.tree.nu_array(self.depth, self.base)
        return float(np.sqrt(np.dot(nu, np.sum(np.abs(self.values) ** 2, axis=1))))


def rebase(F: HoroFunction, new_base: Vertex) -> HoroFunction:
    """Express F in the chart of ``new_base``.

    (F o Psi_u)(w, m) = (F o Psi_v)(w, m + kappa_w(v, u)).
    """
    new_base = tuple(new_base)
    if new_base == F.base:
        return F
    tree = F.tree
    need = max(len(F.base), len(new_base))
    if F.depth < need:
        raise InsufficientCylinderDepth(need, F.depth, "rebase")
    shift = tree.kappa_array(F.base, new_base, F.depth)
    # new[u, m] = old[u, m + shift[u]], so the new window is [n_min - s, n_max - s].
    n_min = F.n_min - int(shift.max())
    n_max = F.n_max - int(shift.min())
    out = np.zeros((F.values.shape[0], n_max - n_min + 1), dtype=F.values.dtype)
    width = F.values.shape[1]
    for i, s in enumerate(shift):
        start = F.n_min - int(s) - n_min
        out[i, start : start + width] = F.values[i]
    return HoroFunction(tree, new_base, F.depth, n_min, out)


def align(F: HoroFunction, G: HoroFunction, base: Vertex | None = None):
    """Bring two horocycle functions to one chart, depth and index window.

    Returns ``(A, B, ref)`` where ``A`` and ``B`` are value arrays and ``ref``
    is a zero HoroFunction carrying the shared layout.
    """
    if F.tree != G.tree:
        raise ValueError("horocycle functions live on different trees")
    base = F.base if base is None else tuple(base)
    depth = max(F.depth, G.depth, len(base))
    Fr = rebase(F.refine(max(F.depth, depth)), base)
    Gr = rebase(G.refine(max(G.depth, depth)), base)
    n_min = min(Fr.n_min, Gr.n_min)
    n_max = max(Fr.n_max, Gr.n_max)
    Fr = Fr.pad(n_min, n_max)
    Gr = Gr.pad(n_min, n_max)
    dtype = np.result_type(Fr.values, Gr.values)
    ref = HoroFunction.zeros(F.tree, base, depth, n_min, n_max, dtype=dtype)
    return Fr.values, Gr.values, ref


def max_abs_difference(F: HoroFunction, G: HoroFunction):
    """Largest pointwise deviation as functions on horocycles (exact for integer tables)."""
    A, B, _ = align(F, G)
    if A.size == 0:
        return 0
    d = np.abs(A - B).max()
    return int(d) if np.asarray(d).dtype.kind in "iu" else float(d)


def integrate_xi(F: HoroFunction):
    """Integral against the horocycle measure: sum_u nu^base(u) sum_n q^n F(u, n).

    Exact (a Fraction) for integer tables.
    """
    tree, q = F.tree, F.tree.q
    if F.is_exact:
        nu = tree.nu_exact(F.depth, F.base)
        total = Fraction(0)
        for i, row in enumerate(F.values.tolist()):
            s = sum((Fraction(q) ** n * int(val)
                     for n, val in zip(range(F.n_min, F.n_max + 1), row) if val), Fraction(0))
            total += nu[i] * s
        return total
    nu = tree.nu_array(F.depth, F.base)
    qn = np.power(float(q), np.arange(F.n_min, F.n_max + 1))
    return complex(np.dot(nu, F.values @ qn))


def norm_xi_sq(F: HoroFunction):
    """Squared L^2 norm on horocycles; exact for integer tables."""
    tree, q = F.tree, F.tree.q
    if F.is_exact:
        nu = tree.nu_exact(F.depth, F.base)
        total = Fraction(0)
        for i, row in enumerate(F.values.tolist()):
            s = sum((Fraction(q) ** n * int(val) ** 2
                     for n, val in zip(range(F.n_min, F.n_max + 1), row) if val), Fraction(0))
            total += nu[i] * s
        return total
    nu = tree.nu_array(F.depth, F.base)
    qn = np.power(float(q), np.arange(F.n_min, F.n_max + 1))
    return float(np.dot(nu, (np.abs(F.values) ** 2) @ qn))


def norm_xi(F: HoroFunction) -> float:
    return float(norm_xi_sq(F)) ** 0.5


def psi_star(F: HoroFunction) -> AbelTable:
    """Unitary pullback to L^2(nu^base x dn): multiply by q^{n/2}."""
    w = half_powers(F.tree.q, F.n_min, F.n_max)
    return AbelTable(F.tree, F.base, F.depth, F.n_min, F.values * w)


def pihat_action(g: Isometry, F: HoroFunction) -> HoroFunction:
    """(pi_hat(g) F)(xi) = F(g^{-1}.xi), returned in the chart of ``F.base``.

    g maps h^v_{w,n} to h^{g[v]}_{g.w,n}, so in the chart of g[v] the table
    is just F's table read at g^{-1}.w; a rebase then returns to ``F.base``.
    Output depth is ``F.depth + displacement_bound(g)``.
    """
    tree = F.tree
    out_depth = F.depth + g.displacement_bound
    src = g.inverse().cylinder_map(tree, F.depth, out_depth)
    moved = HoroFunction(tree, g(F.base), out_depth, F.n_min, F.values[src])
    return rebase(moved, F.base)


def dual_radon(F: HoroFunction, x: Vertex):
    """Average of F over the horocycles through x: int (F o Psi_x)(w, 0) d nu^x(w)."""
    x = tuple(x)
    G = rebase(F.refine(max(F.depth, len(x))), x)
    if not G.n_min <= 0 <= G.n_max:
        return Fraction(0) if G.is_exact else 0.0
    col = G.values[:, -G.n_min]
    if G.is_exact:
        nu = F.tree.nu_exact(G.depth, x)
        return sum((w * int(c) for w, c in zip(nu, col.tolist())), Fraction(0))
    return complex(np.dot(F.tree.nu_array(G.depth, x), col))
