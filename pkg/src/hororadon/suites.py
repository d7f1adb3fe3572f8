"""Verification suites behind ``hororadon selftest``.

Every suite takes a :class:`SuiteConfig` and returns a list of
:class:`~hororadon.ranges.ConditionReport`. Random inputs come from one
seeded generator per suite so that reports are reproducible from the
config alone.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import oracles
from .cfunction import inverse_c_abs_sq, plancherel_weight, weight_on_grid
from .horocycle import max_abs_difference, pihat_action
from .ranges import (ConditionReport, check_flat, check_range_cc, check_sharp,
                     reducibility_witness)
from .transforms import (FreqFunction, VertexFunction, abel, change_base, fourier_z,
                         freq_norm_sq, helgason_fourier, hf_invert, lambda_op, phi_v,
                         pi_action, pihat_freq, q_transform, radon)
from .tree import (ROOT, CylindricalFunction, Isometry, Tree, act_boundary)

DEFAULT_TOLS = {
    "geometry": 0.0,
    "isometry": 0.0,
    "quasi_invariance": 1e-12,
    "fourier_slice": 1e-12,
    "plancherel_weight": 1e-10,
    "unitarity": 1e-8,
    "grid_doubling": 1e-9,
    "radon_intertwining": 0.0,
    "q_intertwining": 1e-8,
    "lambda_base_independence": 1e-10,
    "base_change": 1e-10,
    "inversion": 1e-6,
    "range_cc": 0.0,
    "flat": 1e-10,
    "sharp": 1e-10,
    "witness": 1e-12,
    "witness_energy": 1e-8,
}


@dataclass
class SuiteConfig:
    q: int = 2
    radius: int = 3
    M: int = 4096
    seed: int = 42
    n_functions: int = 10
    n_isometries: int = 10
    max_displacement: int = 2
    tols: dict = field(default_factory=dict)

    @property
    def tree(self) -> Tree:
        return Tree(self.q)

    def tol(self, name: str) -> float:
        return self.tols.get(name, DEFAULT_TOLS[name])

    def rng(self, salt: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, salt])


def _report(cfg: SuiteConfig, name: str, residuals: dict, tol_name: str | None = None,
            **meta) -> ConditionReport:
    return ConditionReport(name, cfg.q, cfg.tol(tol_name or name), residuals, M=cfg.M,
                           seed=cfg.seed, metadata=meta)


def geometry(cfg: SuiteConfig) -> list[ConditionReport]:
    tree = cfg.tree
    R = min(cfg.radius, 3)
    adj = oracles.adjacency(tree, R)
    ball = tree.ball(ROOT, R)
    dist_err = 0
    for x in ball:
        bfs = oracles.bfs_distances(adj, x)
        dist_err = max(dist_err, max(abs(tree.distance(x, y) - bfs[y]) for y in ball))
    kappa_err = 0
    for u in tree.words(R):
        _, parent = oracles.bfs_parents(adj, u)
        paths = {x: oracles.path_to(parent, x) for x in ball}
        for v, x in itertools.product(ball, repeat=2):
            oracle = oracles.confluence_kappa(paths[v], paths[x])
            kappa_err = max(kappa_err, abs(tree.horocyclic_index(v, x, u) - oracle))
    part_err = 0
    for L in range(1, 6):
        total = sum((tree.cylinder_measure_o(u) for u in tree.words(L)), Fraction(0))
        part_err = max(part_err, abs(total - 1))
    return [_report(cfg, "geometry", {"distance_vs_bfs": float(dist_err),
                                      "kappa_vs_paths": float(kappa_err),
                                      "partition": float(part_err)})]


def isometry_contract(cfg: SuiteConfig) -> list[ConditionReport]:
    tree = cfg.tree
    rng = cfg.rng(1)
    ball = tree.ball(ROOT, 4)
    bad_adj = bad_inv = 0
    for _ in range(cfg.n_isometries):
        g = Isometry.random(tree, rng, cfg.max_displacement)
        gi = g.inverse()
        for x in ball:
            gx = g(x)
            bad_inv += gi(gx) != x
            for y in tree.children(x):
                bad_adj += tree.distance(gx, g(y)) != 1
        images = {g(x) for x in ball}
        bad_inv += len(images) != len(ball)
    return [_report(cfg, "isometry", {"adjacency": float(bad_adj), "inverse": float(bad_inv)})]


def quasi_invariance(cfg: SuiteConfig) -> list[ConditionReport]:
    tree = cfg.tree
    rng = cfg.rng(2)
    F = CylindricalFunction.indicator(tree, (1,))
    worst = 0.0
    for _ in range(cfg.n_isometries):
        g = Isometry.random(tree, rng, cfg.max_displacement)
        lhs = tree.integrate_boundary(act_boundary(g, F))
        y = g.inverse()(ROOT)
        depth = max(F.depth, len(y))
        Fr = F.refine(depth)
        p = np.power(float(tree.q), tree.kappa_root_array(y, depth))
        rhs = np.dot(tree.nu_array(depth), Fr.values * p)
        worst = max(worst, abs(float(lhs) - rhs))
    return [_report(cfg, "quasi_invariance", {"boundary": worst})]


def fourier_slice(cfg: SuiteConfig) -> list[ConditionReport]:
    tree = cfg.tree
    rng = cfg.rng(3)
    bases = tree.ball(ROOT, 1)[:3] + tree.sphere(ROOT, 2)[:2]
    worst = 0.0
    for _ in range(cfg.n_functions):
        f = VertexFunction.random(tree, cfg.radius, rng)
        for v in bases:
            H = helgason_fourier(f, v)
            A = fourier_z(abel(f, v))
            worst = max(worst, _coeff_diff(A, H))
    return [_report(cfg, "fourier_slice", {"coefficients": worst})]


def _coeff_diff(A: FreqFunction, B: FreqFunction) -> float:
    depth = max(A.depth, B.depth)
    A, B = A.refine(depth), B.refine(depth)
    lo, hi = min(A.n_min, B.n_min), max(A.n_max, B.n_max)
    a = np.zeros((A.coeffs.shape[0], hi - lo + 1), complex)
    b = np.zeros_like(a)
    a[:, A.n_min - lo: A.n_max - lo + 1] = A.coeffs
    b[:, B.n_min - lo: B.n_max - lo + 1] = B.coeffs
    return float(np.abs(a - b).max())


def plancherel(cfg: SuiteConfig) -> list[ConditionReport]:
    tree = cfg.tree
    ident = abs(float(weight_on_grid(cfg.q, cfg.M).mean()) - 1.0)
    t = cfg.rng(4).uniform(0, tree.T, 1000)
    closed = float(np.abs(plancherel_weight(t, cfg.q) - inverse_c_abs_sq(t, cfg.q)).max())
    return [_report(cfg, "plancherel_weight", {"mean_identity": ident,
                                               "closed_form": closed})]


def unitarity(cfg: SuiteConfig) -> list[ConditionReport]:
    tree = cfg.tree
    rng = cfg.rng(5)
    worst = doubling = 0.0
    for _ in range(cfg.n_functions):
        f = VertexFunction.random(tree, cfg.radius, rng)
        H = helgason_fourier(f)
        lhs = freq_norm_sq(H, cfg.M, weighted=True)
        lhs2 = freq_norm_sq(H, 2 * cfg.M, weighted=True)
        worst = max(worst, abs(lhs - f.norm_sq()))
        doubling = max(doubling, abs(lhs2 - lhs))
    r = _report(cfg, "unitarity", {"norm": worst, "grid_doubling": doubling})
    r.tols = {"norm": cfg.tol("unitarity"), "grid_doubling": cfg.tol("grid_doubling")}
    return [r]


def intertwining(cfg: SuiteConfig) -> list[ConditionReport]:
    tree = cfg.tree
    rng = cfg.rng(6)
    radon_err = 0
    q_err = lam_err = 0.0
    for _ in range(cfg.n_isometries):
        f = VertexFunction.random(tree, cfg.radius, rng)
        g = Isometry.random(tree, rng, cfg.max_displacement)
        Rf = radon(f)
        radon_err = max(radon_err, max_abs_difference(radon(pi_action(g, f)),
                                                      pihat_action(g, Rf)))
        lhs = q_transform(pi_action(g, f), M=cfg.M)
        rhs = pihat_freq(g, q_transform(f, M=cfg.M), cfg.M)
        q_err = max(q_err, _grid_diff(lhs, rhs, cfg.M))
        via_lambda = lambda_op(pihat_action(g, Rf), M=cfg.M)
        lam_err = max(lam_err, _grid_diff(via_lambda, rhs, cfg.M))
    r1 = _report(cfg, "radon_intertwining", {"table": float(radon_err)})
    r2 = _report(cfg, "q_intertwining", {"grid": q_err, "lambda_route": lam_err})
    return [r1, r2]


def _grid_diff(A: FreqFunction, B: FreqFunction, M: int) -> float:
    if A.base != B.base:
        raise ValueError("grid comparison needs a common base")
    depth = max(A.depth, B.depth)
    return float(np.abs(A.refine(depth).grid(M) - B.refine(depth).grid(M)).max())


def base_independence(cfg: SuiteConfig) -> list[ConditionReport]:
    tree = cfg.tree
    rng = cfg.rng(7)
    f = VertexFunction.random(tree, cfg.radius, rng)
    F = radon(f, depth=max(cfg.radius, 2))
    lam = 0.0
    direct = lambda_op(F, ROOT, cfg.M)
    for v in tree.ball(ROOT, 2):
        other = change_base(lambda_op(F, v, cfg.M), ROOT, cfg.M)
        lam = max(lam, _grid_diff(direct, other, cfg.M))
    law = 0.0
    ball = tree.ball(ROOT, 2)
    for u, v in itertools.product(ball, repeat=2):
        law = max(law, _grid_diff(phi_v(F, u), change_base(phi_v(F, v), u, cfg.M), cfg.M))
    return [_report(cfg, "lambda_base_independence", {"grid": lam}),
            _report(cfg, "base_change", {"grid": law})]


def inversion(cfg: SuiteConfig) -> list[ConditionReport]:
    tree = cfg.tree
    rng = cfg.rng(8)
    ball = tree.ball(ROOT, cfg.radius)
    worst = 0.0
    for _ in range(cfg.n_functions):
        f = VertexFunction.random(tree, cfg.radius, rng)
        G = phi_v(radon(f))
        rec = hf_invert(G, ball, cfg.M)
        a, b = f.to_array(ball), rec.to_array(ball)
        worst = max(worst, float(np.linalg.norm(a - b) / np.linalg.norm(a)))
    return [_report(cfg, "inversion", {"relative_l2": worst})]


def ranges(cfg: SuiteConfig) -> list[ConditionReport]:
    tree = cfg.tree
    rng = cfg.rng(9)
    cc = flat = sharp = 0.0
    for _ in range(max(1, cfg.n_functions // 2)):
        f = VertexFunction.random(tree, cfg.radius, rng)
        F = radon(f, depth=max(cfg.radius, 2))
        cc = max(cc, check_range_cc(F).max_residual)
        flat = max(flat, check_flat(F, M=cfg.M).max_residual)
        sharp = max(sharp, check_sharp(helgason_fourier(f, depth=cfg.radius + 1), ROOT,
                                       cfg.radius + 1, cfg.M).max_residual)
    return [_report(cfg, "range_cc", {"radon": cc}),
            _report(cfg, "flat", {"radon": flat}),
            _report(cfg, "sharp", {"helgason_fourier": sharp})]


def witness(cfg: SuiteConfig) -> list[ConditionReport]:
    tree = cfg.tree
    rng = cfg.rng(10)
    f = VertexFunction.random(tree, cfg.radius, rng)
    gs = [Isometry.random(tree, rng, cfg.max_displacement) for _ in range(cfg.n_isometries)]
    return [reducibility_witness(f, gs, M=cfg.M, tol=cfg.tol("witness"),
                                 energy_tol=cfg.tol("witness_energy"), seed=cfg.seed)]


# unitarity precedes the weight identity it generalizes, so an under-resolved
# grid is reported against unitarity first
SUITES = [geometry, isometry_contract, quasi_invariance, fourier_slice, unitarity,
          plancherel, intertwining, base_independence, inversion, ranges, witness]


def run_all(cfg: SuiteConfig) -> list[ConditionReport]:
    reports = []
    for suite in SUITES:
        reports.extend(suite(cfg))
    return reports
