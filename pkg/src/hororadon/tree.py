"""Geometry of the (q+1)-homogeneous tree.

Vertices are reduced words over the letters ``0..q`` (no letter repeated
twice in a row), i.e. elements of the free product of q+1 copies of Z/2.
The root ``o`` is the empty word, and the neighbours of ``w`` are its
parent and the words ``w + (a,)`` with ``a != w[-1]``.

Boundary points are never materialised. Everything that depends on a
boundary point only does so through a finite prefix of its ray from the
root, so boundary data lives on *cylinders* ``Omega(u)``: the set of ends
whose ray from ``o`` passes through ``u``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import InsufficientCylinderDepth

Vertex = tuple[int, ...]
ROOT: Vertex = ()


def reduce_word(letters: Iterable[int]) -> Vertex:
    """Cancel adjacent equal letters (each letter is an involution)."""
    out: list[int] = []
    for a in letters:
        if out and out[-1] == a:
            out.pop()
        else:
            out.append(a)
    return tuple(out)


def lcp_length(x: Sequence[int], y: Sequence[int]) -> int:
    n = 0
    for a, b in zip(x, y):
        if a != b:
            break
        n += 1
    return n


def q_half_power(q: int, n: int) -> float:
    """q**(n/2) as an exact integer power times sqrt(q) for odd n."""
    base = float(q) ** (n // 2)
    return base * math.sqrt(q) if n % 2 else base


@dataclass(frozen=True)
class Tree:
    """The homogeneous tree in which every vertex has ``q + 1`` neighbours."""

    q: int

    def __post_init__(self):
        if not isinstance(self.q, (int, np.integer)) or self.q < 2:
            raise ValueError(f"q must be an integer >= 2, got {self.q!r}")

    # -- constants -------------------------------------------------------

    @property
    def T(self) -> float:
        """Period of the frequency torus."""
        return 2 * math.pi / math.log(self.q)

    @property
    def c_q(self) -> Fraction:
        return Fraction(self.q, 2 * (self.q + 1))

    # -- vertices --------------------------------------------------------

    def is_vertex(self, word: Sequence[int]) -> bool:
        if any(not (0 <= a <= self.q) for a in word):
            return False
        return all(word[i] != word[i + 1] for i in range(len(word) - 1))

    def check_vertex(self, word: Sequence[int]) -> Vertex:
        w = tuple(int(a) for a in word)
        if not self.is_vertex(w):
            raise ValueError(f"{list(w)} is not a reduced word over 0..{self.q}")
        return w

    def children(self, x: Vertex) -> list[Vertex]:
        last = x[-1] if x else None
        return [x + (a,) for a in range(self.q + 1) if a != last]

    def neighbors(self, x: Vertex) -> list[Vertex]:
        nb = self.children(x)
        if x:
            nb.append(x[:-1])
        return nb

    @staticmethod
    def distance(x: Vertex, y: Vertex) -> int:
        return len(x) + len(y) - 2 * lcp_length(x, y)

    def ball(self, center: Vertex = ROOT, radius: int = 0) -> list[Vertex]:
        """All vertices within ``radius`` of ``center``, sorted by (length, word)."""
        if radius < 0:
            raise ValueError("radius must be >= 0")
        seen = {center}
        frontier = [center]
        for _ in range(radius):
            nxt = []
            for x in frontier:
                for y in self.neighbors(x):
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return sorted(seen, key=lambda w: (len(w), w))

    def sphere(self, center: Vertex = ROOT, m: int = 0) -> list[Vertex]:
        return [x for x in self.ball(center, m) if self.distance(center, x) == m]

    # -- cylinders -------------------------------------------------------

    def num_cylinders(self, depth: int) -> int:
        if depth == 0:
            return 1
        return (self.q + 1) * self.q ** (depth - 1)

    @lru_cache(maxsize=None)
    def words(self, depth: int) -> tuple[Vertex, ...]:
        """All reduced words of length ``depth`` in lexicographic order.

        These index the cylinders of that depth, which partition the boundary.
        """
        if depth < 0:
            raise ValueError("depth must be >= 0")
        level: list[Vertex] = [ROOT]
        for _ in range(depth):
            level = [c for w in level for c in self.children(w)]
        return tuple(level)

    @lru_cache(maxsize=None)
    def word_array(self, depth: int) -> np.ndarray:
        arr = np.array(self.words(depth), dtype=np.int64).reshape(-1, depth)
        arr.setflags(write=False)
        return arr

    @lru_cache(maxsize=None)
    def cylinder_index(self, depth: int) -> dict[Vertex, int]:
        return {w: i for i, w in enumerate(self.words(depth))}

    @lru_cache(maxsize=None)
    def parent_index(self, depth: int, finer: int) -> np.ndarray:
        """For each depth-``finer`` cylinder, the index of its depth-``depth`` ancestor."""
        if finer < depth:
            raise ValueError("finer depth must be >= depth")
        idx = self.cylinder_index(depth)
        out = np.array([idx[w[:depth]] for w in self.words(finer)], dtype=np.int64)
        out.setflags(write=False)
        return out

    def _require(self, depth: int, needed: int, what: str):
        if depth < needed:
            raise InsufficientCylinderDepth(needed, depth, what)

    # -- horocyclic index ------------------------------------------------

    def kappa_root_array(self, x: Vertex, depth: int) -> np.ndarray:
        """kappa_w(o, x) on every depth-``depth`` cylinder, as 2|lcp(x,u)| - |x|."""
        self._require(depth, len(x), "horocyclic index")
        if not x:
            return np.zeros(self.num_cylinders(depth), dtype=np.int64)
        W = self.word_array(depth)[:, : len(x)]
        lcp = np.cumprod(W == np.asarray(x), axis=1).sum(axis=1)
        return 2 * lcp - len(x)

    def kappa_array(self, v: Vertex, x: Vertex, depth: int) -> np.ndarray:
        """kappa_w(v, x) on every cylinder of the given depth."""
        return self.kappa_root_array(x, depth) - self.kappa_root_array(v, depth)

    def horocyclic_index(self, v: Vertex, x: Vertex, u: Vertex) -> int:
        """kappa_w(v, x) for any end w in the cylinder Omega(u)."""
        self._require(len(u), max(len(v), len(x)), "horocyclic index")
        def k_root(y):
            return 2 * lcp_length(y, u) - len(y)
        return k_root(x) - k_root(v)

    # -- boundary measures -----------------------------------------------

    def cylinder_measure_o(self, u: Vertex) -> Fraction:
        """nu^o(Omega(u)) = q / ((q+1) q^|u|)."""
        if not u:
            return Fraction(1)
        return Fraction(self.q, (self.q + 1) * self.q ** len(u))

    def nu_exact(self, depth: int, base: Vertex = ROOT) -> list[Fraction]:
        """nu^base of each depth-``depth`` cylinder, exactly."""
        m = self.cylinder_measure_o(self.words(depth)[0]) if depth else Fraction(1)
        k = self.kappa_root_array(base, depth)
        return [m * Fraction(self.q) ** int(kk) for kk in k]

    def nu_array(self, depth: int, base: Vertex = ROOT) -> np.ndarray:
        """nu^base of each depth-``depth`` cylinder, in floating point.

        Uses d nu^v = q^{kappa_w(o, v)} d nu^o.
        """
        m = 1.0 / self.num_cylinders(depth)
        k = self.kappa_root_array(base, depth)
        return m * np.power(float(self.q), k)

    def poisson_kernel(self, x: Vertex, u: Vertex, base: Vertex = ROOT) -> float:
        """p_base(x, w) = q^{kappa_w(base, x)} for w in Omega(u)."""
        return float(self.q) ** self.horocyclic_index(base, x, u)

    def integrate_boundary(self, F: "CylindricalFunction", base: Vertex = ROOT):
        """Integral of F against nu^base.

        Exact (a Fraction) when F holds integers or Fractions, complex otherwise.
        """
        self._require(F.depth, len(base), "integrate_boundary")
        if F.is_exact:
            nu = self.nu_exact(F.depth, base)
            return sum((Fraction(val) * w for val, w in zip(F.values.tolist(), nu)), Fraction(0))
        nu = self.nu_array(F.depth, base)
        return complex(np.dot(nu, F.values))

    # -- frequency grid --------------------------------------------------

    def grid(self, M: int) -> np.ndarray:
        """Uniform sample points t_k = k T / M, k = 0..M-1."""
        return np.arange(M) * (self.T / M)


@dataclass(frozen=True, eq=False)
class CylindricalFunction:
    """A function on the boundary that is constant on depth-``depth`` cylinders.

    ``values[i]`` is the value on the cylinder ``tree.words(depth)[i]``.
    """

    tree: Tree
    depth: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.shape != (self.tree.num_cylinders(self.depth),):
            raise ValueError(
                f"expected {self.tree.num_cylinders(self.depth)} values at depth "
                f"{self.depth}, got shape {vals.shape}")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_callable(cls, tree: Tree, depth: int, func: Callable[[Vertex], object],
                      dtype=None) -> "CylindricalFunction":
        vals = [func(u) for u in tree.words(depth)]
        return cls(tree, depth, np.array(vals, dtype=dtype))

    @classmethod
    def indicator(cls, tree: Tree, u: Vertex, depth: int | None = None) -> "CylindricalFunction":
        depth = len(u) if depth is None else depth
        if depth < len(u):
            raise InsufficientCylinderDepth(len(u), depth, "indicator")
        n = len(u)
        return cls.from_callable(tree, depth, lambda w: int(w[:n] == u), dtype=np.int64)

    @property
    def is_exact(self) -> bool:
        return self.values.dtype.kind in "iuO"

    def __call__(self, u: Vertex):
        """Value on the cylinder containing Omega(u) (``len(u) >= depth``)."""
        if len(u) < self.depth:
            raise InsufficientCylinderDepth(self.depth, len(u), "evaluate")
        return self.values[self.tree.cylinder_index(self.depth)[u[: self.depth]]]

    def refine(self, depth: int) -> "CylindricalFunction":
        if depth == self.depth:
            return self
        parent = self.tree.parent_index(self.depth, depth)
        return CylindricalFunction(self.tree, depth, self.values[parent])


# ---------------------------------------------------------------------------
# Isometries
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Translate:
    """Left multiplication by a reduced word."""

    word: Vertex

    @property
    def displacement(self) -> int:
        return len(self.word)

    def __call__(self, x: Vertex) -> Vertex:
        return reduce_word(self.word + tuple(x))

    def inverse(self) -> "Translate":
        return Translate(self.word[::-1])


@dataclass(frozen=True)
class RootedPerm:
    """A root-fixing automorphism given by letter permutations near the root.

    ``sigma[w]`` (for ``|w| < depth``) is a permutation of ``0..q`` written as
    a tuple; the child ``w + (a,)`` is sent to ``image(w) + (sigma[w][a],)``.
    Each ``sigma[w]`` must send ``w[-1]`` to ``image(w)[-1]``. Below ``depth``
    the permutation is the transposition of ``w[-1]`` and ``image(w)[-1]``.
    """

    depth: int
    sigma: dict = field(hash=False)

    displacement = 0

    def __hash__(self):
        return hash((self.depth, tuple(sorted(self.sigma.items()))))

    def _letter(self, prefix: Vertex, img: list[int], a: int) -> int:
        if len(prefix) < self.depth:
            return self.sigma[prefix][a]
        if not prefix:
            return a
        lw, li = prefix[-1], img[-1]
        if a == lw:
            return li
        if a == li:
            return lw
        return a

    def __call__(self, x: Vertex) -> Vertex:
        img: list[int] = []
        for i, a in enumerate(x):
            img.append(self._letter(x[:i], img, a))
        return tuple(img)

    def inverse(self) -> "RootedPerm":
        inv = {}
        for w, s in self.sigma.items():
            s_inv = [0] * len(s)
            for a, b in enumerate(s):
                s_inv[b] = a
            inv[self(w)] = tuple(s_inv)
        return RootedPerm(self.depth, inv)

    @classmethod
    def random(cls, tree: Tree, depth: int, rng: np.random.Generator) -> "RootedPerm":
        letters = list(range(tree.q + 1))
        sigma: dict[Vertex, tuple[int, ...]] = {}
        images: dict[Vertex, Vertex] = {ROOT: ROOT}
        for level in range(depth):
            for w in tree.words(level):
                img = images[w]
                if not w:
                    perm = tuple(int(b) for b in rng.permutation(letters))
                else:
                    src = [a for a in letters if a != w[-1]]
                    dst = [b for b in letters if b != img[-1]]
                    shuffled = [dst[i] for i in rng.permutation(len(dst))]
                    mapping = dict(zip(src, shuffled))
                    mapping[w[-1]] = img[-1]
                    perm = tuple(mapping[a] for a in letters)
                sigma[w] = perm
                for a in letters:
                    if not w or a != w[-1]:
                        images[w + (a,)] = img + (perm[a],)
        return cls(depth, sigma)


@dataclass(frozen=True)
class Isometry:
    """A composition of :class:`Translate` and :class:`RootedPerm` atoms.

    Atoms are applied in list order, so ``Isometry((a, b))(x) == b(a(x))``.
    """

    atoms: tuple = ()

    def __call__(self, x: Vertex) -> Vertex:
        for atom in self.atoms:
            x = atom(x)
        return x

    @property
    def displacement_bound(self) -> int:
        """Upper bound on how many letters of a word can be rewritten."""
        return sum(a.displacement for a in self.atoms)

    def inverse(self) -> "Isometry":
        return Isometry(tuple(a.inverse() for a in reversed(self.atoms)))

    def __matmul__(self, other: "Isometry") -> "Isometry":
        """``(g @ h)(x) == g(h(x))``."""
        return Isometry(tuple(other.atoms) + tuple(self.atoms))

    def boundary_prefix(self, u: Vertex, depth: int) -> Vertex:
        """Length-``depth`` prefix of g.w for every end w in Omega(u).

        Needs ``len(u) >= depth + displacement_bound``.
        """
        need = depth + self.displacement_bound
        if len(u) < need:
            raise InsufficientCylinderDepth(need, len(u), "boundary action")
        return self(u)[:depth]

    def cylinder_map(self, tree: Tree, depth: int, out_depth: int) -> np.ndarray:
        """Index array: depth-``out_depth`` cylinder -> depth-``depth`` cylinder of g.w."""
        idx = tree.cylinder_index(depth)
        return np.array([idx[self.boundary_prefix(u, depth)] for u in tree.words(out_depth)],
                        dtype=np.int64)

    @classmethod
    def random(cls, tree: Tree, rng: np.random.Generator, max_displacement: int = 2,
               max_atoms: int = 3, max_perm_depth: int = 2) -> "Isometry":
        """Seeded random isometry.

        Draws 1..max_atoms atoms; each is a translation by a random reduced
        word (total length capped by ``max_displacement``) or a rooted
        permutation of random depth 1..max_perm_depth.
        """
        atoms = []
        budget = max_displacement
        for _ in range(int(rng.integers(1, max_atoms + 1))):
            if budget > 0 and rng.random() < 0.5:
                length = int(rng.integers(1, budget + 1))
                word: list[int] = []
                for _ in range(length):
                    choices = [a for a in range(tree.q + 1) if not word or a != word[-1]]
                    word.append(int(rng.choice(choices)))
                atoms.append(Translate(tuple(word)))
                budget -= length
            else:
                depth = int(rng.integers(1, max_perm_depth + 1))
                atoms.append(RootedPerm.random(tree, depth, rng))
        return cls(tuple(atoms))


IDENTITY = Isometry(())


def act_boundary(g: Isometry, F: CylindricalFunction) -> CylindricalFunction:
    """Return w -> F(g^{-1}.w), refined to depth ``F.depth + displacement_bound(g)``."""
    g_inv = g.inverse()
    out_depth = F.depth + g.displacement_bound
    src = g_inv.cylinder_map(F.tree, F.depth, out_depth)
    return CylindricalFunction(F.tree, out_depth, F.values[src])
