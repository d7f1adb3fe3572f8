"""Radon, Abel and Helgason-Fourier transforms and the unitarized Radon transform.

Frequency data is kept in two forms. Everything that is a trigonometric
polynomial in t (Helgason-Fourier transforms, Fourier transforms of Abel
tables) is stored exactly as Laurent coefficients of ``q^{int}``. Anything
multiplied by the c-function symbol is sampled on the uniform grid
``t_k = k T / M``; since ``t_k log q = 2 pi k / M``, evaluating Laurent
coefficients on the grid is an inverse DFT.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .cfunction import multiplier_on_grid, weight_on_grid
from .errors import InsufficientCylinderDepth, ParameterMismatch
from .horocycle import HoroFunction, AbelTable, half_powers, psi_star, rebase
from .tree import ROOT, Isometry, Tree, Vertex

DEFAULT_M = 4096


class VertexFunction:
    """Finitely supported function on the vertices of the tree."""

    def __init__(self, tree: Tree, entries: Mapping[Vertex, object] | Iterable = ()):
        self.tree = tree
        items = entries.items() if isinstance(entries, Mapping) else entries
        clean: dict[Vertex, object] = {}
        for x, val in items:
            x = tree.check_vertex(x)
            if val != 0:
                clean[x] = clean.get(x, 0) + val
        self.entries = {x: v for x, v in clean.items() if v != 0}

    @classmethod
    def delta(cls, tree: Tree, x: Vertex = ROOT, value=1) -> "VertexFunction":
        return cls(tree, {tuple(x): value})

    @classmethod
    def random(cls, tree: Tree, radius: int, rng: np.random.Generator,
               low: int = -5, high: int = 5) -> "VertexFunction":
        """Integer entries drawn uniformly from [low, high] on ball(o, radius)."""
        ball = tree.ball(ROOT, radius)
        vals = rng.integers(low, high + 1, size=len(ball))
        return cls(tree, {x: int(v) for x, v in zip(ball, vals)})

    @property
    def is_integer(self) -> bool:
        return all(isinstance(v, (int, np.integer)) for v in self.entries.values())

    @property
    def support_radius(self) -> int:
        return max((len(x) for x in self.entries), default=0)

    def __call__(self, x: Vertex):
        return self.entries.get(tuple(x), 0)

    def __eq__(self, other):
        return (isinstance(other, VertexFunction) and self.tree == other.tree
                and self.entries == other.entries)

    def __repr__(self):
        return f"VertexFunction(q={self.tree.q}, {self.entries!r})"

    def __add__(self, other: "VertexFunction") -> "VertexFunction":
        out = dict(self.entries)
        for x, v in other.entries.items():
            out[x] = out.get(x, 0) + v
        return VertexFunction(self.tree, out)

    def scale(self, c) -> "VertexFunction":
        return VertexFunction(self.tree, {x: c * v for x, v in self.entries.items()})

    def norm_sq(self):
        """Squared l^2 norm; an exact int for integer entries."""
        if self.is_integer:
            return sum(int(v) ** 2 for v in self.entries.values())
        return float(sum(abs(v) ** 2 for v in self.entries.values()))

    def to_array(self, vertices: list[Vertex]) -> np.ndarray:
        return np.array([complex(self(x)) for x in vertices])


def pi_action(g: Isometry, f: VertexFunction) -> VertexFunction:
    """(pi(g) f)(x) = f(g^{-1}[x]), i.e. the value at x moves to g[x]."""
    return VertexFunction(f.tree, {g(x): v for x, v in f.entries.items()})


# ---------------------------------------------------------------------------
# Frequency-side data
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FreqFunction:
    """Function on (boundary cylinders) x (frequency torus) in the chart of ``base``.

    Holds Laurent coefficients (``coeffs[u, n - n_min]`` multiplies q^{int})
    and/or grid samples (``samples[u, k]`` at t_k = kT/M).
    """

    tree: Tree
    base: Vertex
    depth: int
    coeffs: np.ndarray | None = None
    n_min: int = 0
    samples: np.ndarray | None = None

    def __post_init__(self):
        if self.coeffs is None and self.samples is None:
            raise ValueError("FreqFunction needs coefficients or samples")
        if self.depth < len(self.base):
            raise InsufficientCylinderDepth(len(self.base), self.depth, "FreqFunction base")
        object.__setattr__(self, "base", tuple(self.base))
        ncyl = self.tree.num_cylinders(self.depth)
        for arr in (self.coeffs, self.samples):
            if arr is not None and (arr.ndim != 2 or arr.shape[0] != ncyl):
                raise ValueError(f"expected {ncyl} cylinder rows, got shape {arr.shape}")

    @property
    def n_max(self) -> int:
        if self.coeffs is None:
            raise ValueError("no Laurent coefficients")
        return self.n_min + self.coeffs.shape[1] - 1

    @property
    def M(self) -> int | None:
        return None if self.samples is None else self.samples.shape[1]

    @property
    def is_laurent(self) -> bool:
        return self.coeffs is not None

    def grid(self, M: int = DEFAULT_M) -> np.ndarray:
        """Samples at t_k = kT/M, k = 0..M-1, one row per cylinder."""
        if self.samples is not None and self.samples.shape[1] == M:
            return self.samples
        if self.coeffs is None:
            raise ParameterMismatch(f"function is sampled on M={self.M}, not M={M}")
        return laurent_to_grid(self.coeffs, self.n_min, M)

    def with_grid(self, M: int = DEFAULT_M) -> "FreqFunction":
        return FreqFunction(self.tree, self.base, self.depth, self.coeffs, self.n_min,
                            self.grid(M))

    def refine(self, depth: int) -> "FreqFunction":
        if depth == self.depth:
            return self
        p = self.tree.parent_index(self.depth, depth)
        return FreqFunction(self.tree, self.base, depth,
                            None if self.coeffs is None else self.coeffs[p], self.n_min,
                            None if self.samples is None else self.samples[p])

    def scale(self, c) -> "FreqFunction":
        return FreqFunction(self.tree, self.base, self.depth,
                            None if self.coeffs is None else self.coeffs * c, self.n_min,
                            None if self.samples is None else self.samples * c)


def laurent_to_grid(coeffs: np.ndarray, n_min: int, M: int) -> np.ndarray:
    """Evaluate sum_n c_n q^{i n t_k} = sum_n c_n e^{2 pi i n k / M} for every row."""
    ncyl, width = coeffs.shape
    spectrum = np.zeros((ncyl, M), dtype=complex)
    for j in range(width):
        spectrum[:, (n_min + j) % M] += coeffs[:, j]
    return np.fft.ifft(spectrum, axis=1) * M


def grid_to_laurent(samples: np.ndarray, n_min: int, n_max: int) -> np.ndarray:
    """Trapezoid-rule Fourier coefficients for n = n_min..n_max."""
    M = samples.shape[1]
    fc = np.fft.fft(samples, axis=1) / M
    return fc[:, np.arange(n_min, n_max + 1) % M]


def _common_depth(*fs: FreqFunction) -> int:
    return max(f.depth for f in fs)


def freq_inner(G1: FreqFunction, G2: FreqFunction, M: int = DEFAULT_M,
               weighted: bool = False) -> complex:
    """<G1, G2> in L^2(nu^v x dt), or the c-weighted space if ``weighted``."""
    if G1.base != G2.base or G1.tree != G2.tree:
        raise ParameterMismatch("inner product needs a common tree and base")
    depth = _common_depth(G1, G2)
    a = G1.refine(depth).grid(M)
    b = G2.refine(depth).grid(M)
    nu = G1.tree.nu_array(depth, G1.base)
    integrand = a * np.conj(b)
    if weighted:
        integrand = integrand * weight_on_grid(G1.tree.q, M)
    return complex(np.dot(nu, integrand.mean(axis=1)))


def freq_norm_sq(G: FreqFunction, M: int = DEFAULT_M, weighted: bool = False) -> float:
    """Squared norm by trapezoid quadrature (normalised dt)."""
    vals = np.abs(G.grid(M)) ** 2
    if weighted:
        vals = vals * weight_on_grid(G.tree.q, M)
    return float(np.dot(G.tree.nu_array(G.depth, G.base), vals.mean(axis=1)))


def laurent_norm_sq(G: FreqFunction) -> float:
    """Squared L^2(nu^v x dt) norm from coefficients (Parseval, no quadrature)."""
    return float(np.dot(G.tree.nu_array(G.depth, G.base),
                        np.sum(np.abs(G.coeffs) ** 2, axis=1)))


def base_change_factor(tree: Tree, depth: int, new_base: Vertex, old_base: Vertex,
                       M: int) -> np.ndarray:
    """p_u(v, w)^{1/2 + it_k} = q^{(1/2 + it_k) kappa_w(u, v)} on the grid."""
    k = tree.kappa_array(new_base, old_base, depth)
    amp = np.power(float(tree.q), k / 2.0)
    uniq, inv = np.unique(k, return_inverse=True)
    phase = np.exp(2j * np.pi * np.outer(uniq, np.arange(M)) / M)
    return amp[:, None] * phase[inv]


def change_base(G: FreqFunction, new_base: Vertex, M: int = DEFAULT_M) -> FreqFunction:
    """Phi_u F = p_u(v, .)^{1/2+it} Phi_v F, evaluated on the grid."""
    new_base = tuple(new_base)
    need = max(len(new_base), len(G.base))
    if G.depth < need:
        raise InsufficientCylinderDepth(need, G.depth, "change_base")
    fac = base_change_factor(G.tree, G.depth, new_base, G.base, M)
    return FreqFunction(G.tree, new_base, G.depth, samples=fac * G.grid(M))


# ---------------------------------------------------------------------------
# Transforms
# ---------------------------------------------------------------------------


def radon(f: VertexFunction, depth: int | None = None) -> HoroFunction:
    """Sum of f over each horocycle, in the chart of the root.

    Entry (u, n) is the sum of f(x) over x with kappa_w(o, x) = n for w in
    Omega(u). Depth defaults to the support radius R; the index window is
    [-R, R]. Integer input gives an exact integer table.
    """
    tree = f.tree
    R = f.support_radius
    depth = R if depth is None else max(depth, R)
    dtype = np.int64 if f.is_integer else complex
    out = np.zeros((tree.num_cylinders(depth), 2 * R + 1), dtype=dtype)
    rows = np.arange(out.shape[0])
    for x, val in f.entries.items():
        k = tree.kappa_root_array(x, depth)
        np.add.at(out, (rows, k + R), val)
    return HoroFunction(tree, ROOT, depth, -R, out)


def abel(f: VertexFunction, v: Vertex = ROOT) -> AbelTable:
    """q^{n/2} times the Radon transform of f in the chart of v."""
    v = tuple(v)
    F = radon(f, depth=max(f.support_radius, len(v)))
    return psi_star(rebase(F, v))


def fourier_z(A: AbelTable) -> FreqFunction:
    """Fourier series in n of an Abel table; the table entries are the coefficients."""
    return FreqFunction(A.tree, A.base, A.depth, coeffs=np.asarray(A.values, dtype=complex),
                        n_min=A.n_min)


def helgason_fourier(f: VertexFunction, v: Vertex = ROOT, depth: int | None = None
                     ) -> FreqFunction:
    """H_v f(w, t) = sum_x f(x) q^{(1/2 + it) kappa_w(v, x)} as Laurent coefficients.

    Computed directly from the horocyclic indices, without going through the
    Radon transform.
    """
    tree = f.tree
    v = tuple(v)
    R = f.support_radius
    depth = max(R, len(v), depth or 0)
    N = R + len(v)
    exact = f.is_integer
    acc = np.zeros((tree.num_cylinders(depth), 2 * N + 1),
                   dtype=np.int64 if exact else complex)
    rows = np.arange(acc.shape[0])
    kv = tree.kappa_root_array(v, depth)
    for x, val in f.entries.items():
        k = tree.kappa_root_array(x, depth) - kv
        np.add.at(acc, (rows, k + N), val)
    coeffs = acc * half_powers(tree.q, -N, N)
    return FreqFunction(tree, v, depth, coeffs=coeffs.astype(complex), n_min=-N)


def phi_v(F: HoroFunction, v: Vertex = ROOT) -> FreqFunction:
    """Fourier transform in n of q^{n/2} (F o Psi_v)."""
    v = tuple(v)
    if F.depth < len(v):
        raise InsufficientCylinderDepth(len(v), F.depth, "phi_v")
    return fourier_z(psi_star(rebase(F, v)))


def lambda_op(F: HoroFunction | FreqFunction, v: Vertex = ROOT, M: int = DEFAULT_M
              ) -> FreqFunction:
    """Phi_v(Lambda F) = m(t) Phi_v F, sampled on the grid.

    Accepts a horocycle function, or its frequency representation
    Phi_v F directly (in which case ``v`` is taken from it).
    """
    G = F if isinstance(F, FreqFunction) else phi_v(F, v)
    m = multiplier_on_grid(G.tree.q, M)
    return FreqFunction(G.tree, G.base, G.depth, samples=G.grid(M) * m)


def q_transform(f: VertexFunction, v: Vertex = ROOT, M: int = DEFAULT_M,
                depth: int | None = None) -> FreqFunction:
    """Phi_v(Q f) = m(t) H_v f on the grid."""
    H = helgason_fourier(f, v, depth)
    m = multiplier_on_grid(f.tree.q, M)
    return FreqFunction(H.tree, H.base, H.depth, samples=H.grid(M) * m)


def pihat_freq(g: Isometry, G: FreqFunction, M: int = DEFAULT_M) -> FreqFunction:
    """Frequency form of pi_hat(g) on Phi_v data.

    Phi_v(pi_hat(g) F)(w, t) = q^{(1/2 + it) kappa_w(v, g[v])} Phi_v F(g^{-1}.w, t).
    The output lives on cylinders ``displacement_bound(g)`` levels deeper.
    """
    tree, v = G.tree, G.base
    out_depth = G.depth + g.displacement_bound
    src = g.inverse().cylinder_map(tree, G.depth, out_depth)
    fac = base_change_factor(tree, out_depth, v, g(v), M)
    return FreqFunction(tree, v, out_depth, samples=fac * G.grid(M)[src])


def _pairing_inverse(G: FreqFunction, vertices: list[Vertex], M: int,
                     weight: np.ndarray) -> VertexFunction:
    tree, v = G.tree, G.base
    vertices = [tuple(x) for x in vertices]
    # kappa_w(v, x) must be constant on cylinders; refining keeps G the same function
    G = G.refine(max([G.depth] + [len(x) for x in vertices]))
    # mean_k G(u,k) W(k) e^{-2 pi i kappa k / M} is one FFT bin per cylinder.
    P = np.fft.fft(G.grid(M) * weight, axis=1) / M
    nu = tree.nu_array(G.depth, v)
    rows = np.arange(P.shape[0])
    out = {}
    for x in vertices:
        k = tree.kappa_array(v, x, G.depth)
        amp = np.power(float(tree.q), k / 2.0)
        out[x] = complex(np.dot(nu * amp, P[rows, k % M]))
    return VertexFunction(tree, out)


def hf_invert(G: FreqFunction, vertices: list[Vertex], M: int = DEFAULT_M) -> VertexFunction:
    """Recover f on ``vertices`` from G = H_v f via f(x) = <H_v f, H_v delta_x>_c.

    The pairing is in L^2 of c_q |c(1/2+it)|^{-2} d nu^v dt.
    """
    return _pairing_inverse(G, vertices, M, weight_on_grid(G.tree.q, M))


def q_invert(G: FreqFunction, vertices: list[Vertex], M: int = DEFAULT_M) -> VertexFunction:
    """Recover f from Phi_v(Q f) using f(x) = <Q f, Q delta_x> (Q is unitary)."""
    return _pairing_inverse(G, vertices, M, multiplier_on_grid(G.tree.q, M))


def plancherel_norm(f: VertexFunction, v: Vertex = ROOT, M: int = DEFAULT_M) -> float:
    """||f||^2 computed on the frequency side as the c-weighted norm of H_v f.

    Note this returns the *squared* norm.
    """
    if not f.entries:
        return 0.0
    return freq_norm_sq(helgason_fourier(f, v), M, weighted=True)
