"""Symmetry and range conditions, and the reducibility witness.

Each checker returns a :class:`ConditionReport` holding named residuals
(maximum absolute deviations) rather than a bare boolean, so that the
quadrature tolerance behind every verdict can be audited.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .cfunction import weight_on_grid
from .errors import InsufficientCylinderDepth, ZeroInput
from .horocycle import HoroFunction, rebase
from .transforms import (DEFAULT_M, FreqFunction, VertexFunction, base_change_factor,
                         change_base, helgason_fourier, phi_v)
from .tree import ROOT, IDENTITY, Isometry, Vertex, q_half_power


@dataclass
class ConditionReport:
    condition: str
    q: int
    tol: float
    residuals: dict[str, float]
    M: int | None = None
    seed: int | None = None
    tols: dict[str, float] = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values(), default=0.0)

    @property
    def passed(self) -> bool:
        return all(r <= self.tols.get(k, self.tol) for k, r in self.residuals.items())

    def to_dict(self) -> dict:
        d = {
            "condition": self.condition,
            "q": self.q,
            "tol": self.tol,
            "max_residual": self.max_residual,
            "pass": self.passed,
            "seed": self.seed,
            "M": self.M,
            "residuals": dict(self.residuals),
        }
        if self.tols:
            d["tols"] = dict(self.tols)
        if self.metadata:
            d["metadata"] = self.metadata
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, default=str)

    def summary(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] {self.condition}: max residual {self.max_residual:.3e} (tol {self.tol:.0e})"


def _reflect(a: np.ndarray) -> np.ndarray:
    """Samples at -t_k, i.e. index (M - k) mod M along the last axis."""
    M = a.shape[-1]
    return a[..., (-np.arange(M)) % M]


def sharp_residual(G: FreqFunction, x: Vertex, M: int, samples: np.ndarray | None = None
                   ) -> float:
    """max_t |int p_v(x,w)^{1/2-it} G(w,t) dnu^v - int p_v(x,w)^{1/2+it} G(w,-t) dnu^v|.

    ``samples`` may carry a precomputed ``G.grid(M)``.
    """
    tree, v = G.tree, G.base
    S = G.grid(M) if samples is None else samples
    kappa = tree.kappa_array(v, x, G.depth)  # kappa_w(v, x)
    nu = tree.nu_array(G.depth, v)
    # group cylinders by kappa: p^{1/2 +- it} only depends on it
    uniq, inv = np.unique(kappa, return_inverse=True)
    W = np.zeros((len(uniq), len(nu)))
    W[inv, np.arange(len(nu))] = nu * np.power(float(tree.q), kappa / 2.0)
    s = W @ S
    phase = np.exp(2j * np.pi * np.outer(uniq, np.arange(M)) / M)
    lhs = (s / phase).sum(axis=0)
    rhs = (_reflect(s) * phase).sum(axis=0)
    return float(np.abs(lhs - rhs).max())


def check_sharp(G: FreqFunction, v: Vertex | None = None, test_ball_radius: int = 2,
                M: int = DEFAULT_M, tol: float = 1e-10, seed: int | None = None
                ) -> ConditionReport:
    """Property sharp of G for every x in ball(v, radius), on the grid."""
    if v is not None and tuple(v) != G.base:
        G = change_base(G, v, M)
    v = G.base
    need = test_ball_radius + len(v)
    if G.depth < need:
        raise InsufficientCylinderDepth(need, G.depth, "check_sharp")
    res = {}
    worst = 0.0
    S = G.grid(M)
    for x in G.tree.ball(v, test_ball_radius):
        worst = max(worst, sharp_residual(G, x, M, S))
    res["sharp"] = worst
    return ConditionReport("sharp", G.tree.q, tol, res, M=M, seed=seed,
                           metadata={"base": list(v), "radius": test_ball_radius,
                                     "depth": G.depth})


def _flat_residual(Gv: FreqFunction, M: int) -> float:
    nu = Gv.tree.nu_array(Gv.depth, Gv.base)
    integral = nu @ Gv.grid(M)
    return float(np.abs(integral - _reflect(integral)).max())


def check_flat(F: HoroFunction | FreqFunction, vertices: list[Vertex] | None = None,
               M: int = DEFAULT_M, tol: float = 1e-10, seed: int | None = None
               ) -> ConditionReport:
    """Property flat: int Phi_v F(w, t) d nu^v(w) is even in t for each listed v.

    ``F`` may also be given by one frequency representation Phi_{v0} F (for
    example the output of :func:`lambda_op`); the other charts are then
    reached through the base-change law.  The one-vertex sharp route is
    evaluated as well and stored in the metadata.
    """
    tree = F.tree
    if vertices is None:
        vertices = [x for x in tree.ball(ROOT, 2) if len(x) <= F.depth]
    vertices = [tuple(v) for v in vertices]
    need = max(len(v) for v in vertices)
    if F.depth < need:
        raise InsufficientCylinderDepth(need, F.depth, "check_flat")

    def rep(v):
        if isinstance(F, FreqFunction):
            return change_base(F, v, M) if v != F.base else F
        return phi_v(F, v)

    worst = 0.0
    for v in vertices:
        worst = max(worst, _flat_residual(rep(v), M))

    # Sharp route through a single chart, over every x reachable at this depth.
    G0 = rep(F.base)
    radius = F.depth - len(G0.base)
    S0 = G0.grid(M)
    sharp = max(sharp_residual(G0, x, M, S0) for x in tree.ball(G0.base, radius))
    return ConditionReport("flat", tree.q, tol, {"flat": worst}, M=M, seed=seed,
                           metadata={"vertices": [list(v) for v in vertices],
                                     "sharp_route_residual": sharp,
                                     "sharp_route_pass": sharp <= tol})


def check_range_cc(F: HoroFunction, vertices: list[Vertex] | None = None,
                   tol: float = 0.0, seed: int | None = None) -> ConditionReport:
    """The two conditions characterising Radon transforms of finitely supported functions.

    1. sum_n (F o Psi_v)(w, n) does not depend on w;
    2. int q^{n/2} F_v(w, n) dnu^v = int q^{-n/2} F_v(w, -n) dnu^v for every n.

    Integer tables are checked in rational arithmetic, so a Radon transform
    gives residuals that are exactly zero.
    """
    tree, q = F.tree, F.tree.q
    exact = F.is_exact
    if vertices is None:
        vertices = [x for x in tree.ball(ROOT, 2) if len(x) <= F.depth]
    vertices = [tuple(v) for v in vertices]

    cols = F.values.sum(axis=1)
    r1 = float(np.abs(cols - cols[0]).max()) if cols.size else 0.0

    r2 = 0.0
    for v in vertices:
        G = rebase(F, v)
        N = max(abs(G.n_min), abs(G.n_max))
        G = G.pad(-N, N)
        if exact:
            nu = tree.nu_exact(G.depth, v)
            rows = G.values.tolist()
            a = [sum((w * int(r[j]) for w, r in zip(nu, rows)), Fraction(0))
                 for j in range(2 * N + 1)]
            for n in range(1, N + 1):
                # q^{n/2} a_n == q^{-n/2} a_{-n}  <=>  q^n a_n == a_{-n}
                diff = Fraction(q) ** n * a[N + n] - a[N - n]
                if diff:
                    r2 = max(r2, abs(float(diff)) * q_half_power(q, -n))
        else:
            nu = tree.nu_array(G.depth, v)
            a = nu @ G.values
            w = np.array([q_half_power(q, n) for n in range(-N, N + 1)])
            m = a * w
            r2 = max(r2, float(np.abs(m - m[::-1]).max()))
    return ConditionReport("range_cc", q, tol, {"column_sums": r1, "moment_symmetry": r2},
                           seed=seed, metadata={"vertices": [list(v) for v in vertices],
                                                "exact": exact})


def band_mask(M: int) -> np.ndarray:
    """Grid points of t in [-T/4, T/4] (both edges included)."""
    if M % 4:
        raise ValueError("M must be divisible by 4 so that +-T/4 are grid points")
    k = np.arange(M)
    return (k <= M // 4) | (k >= 3 * M // 4)


def reducibility_witness(f: VertexFunction, g_list: list[Isometry], v: Vertex = ROOT,
                         M: int = DEFAULT_M, tol: float = 1e-12, energy_tol: float = 1e-8,
                         seed: int | None = None) -> ConditionReport:
    """Matrix coefficients <h1, pi(g) h2> of a band split of f vanish for every g.

    h1, h2 have Helgason-Fourier transforms chi_A H_v f and chi_{A^c} H_v f
    with A = boundary x [-T/4, T/4]. Everything is evaluated on the
    frequency side using H_v(pi(g) h)(w,t) = q^{(1/2+it) kappa_w(v, g[v])} H_v h(g^{-1}.w, t).
    """
    if not f.entries:
        raise ZeroInput("the witness needs a nonzero function")
    tree, v = f.tree, tuple(v)
    H = helgason_fourier(f, v)
    S = H.grid(M)
    A = band_mask(M)
    W = weight_on_grid(tree.q, M)
    h1 = FreqFunction(tree, v, H.depth, samples=S * A)
    h2 = FreqFunction(tree, v, H.depth, samples=S * ~A)

    def inner(a: FreqFunction, b: FreqFunction) -> complex:
        depth = max(a.depth, b.depth)
        x, y = a.refine(depth).samples, b.refine(depth).samples
        nu = tree.nu_array(depth, v)
        return complex(nu @ (x * np.conj(y) * W).mean(axis=1))

    def act(g: Isometry, h: FreqFunction) -> FreqFunction:
        out_depth = h.depth + g.displacement_bound
        src = g.inverse().cylinder_map(tree, h.depth, out_depth)
        fac = base_change_factor(tree, out_depth, v, g(v), M)
        return FreqFunction(tree, v, out_depth, samples=fac * h.samples[src])

    coeff = 0.0
    for g in g_list:
        coeff = max(coeff, abs(inner(h1, act(g, h2))))

    n1 = inner(h1, h1).real
    n2 = inner(h2, h2).real
    energy = abs(n1 + n2 - float(f.norm_sq()))
    control = abs(inner(h1, act(IDENTITY, h1)))
    return ConditionReport(
        "reducibility_witness", tree.q, tol,
        {"coefficient": coeff, "band_energy": energy},
        M=M, seed=seed, tols={"coefficient": tol, "band_energy": energy_tol},
        metadata={"num_isometries": len(g_list), "h1_norm_sq": n1, "h2_norm_sq": n2,
                  "control_h1_h1": control, "f_norm_sq": float(f.norm_sq())})
