"""Acceptance gate: one test per criterion, q in {2, 3}, M = 4096.

Each test records a one-line verdict that the terminal summary prints
(see ``conftest.pytest_terminal_summary``); the line is also printed
directly, which shows up under ``pytest -s``.
"""

import itertools
from fractions import Fraction

import numpy as np

from hororadon import (ROOT, FreqFunction, HoroFunction, Isometry, Tree, VertexFunction,
                       abel, check_flat, check_range_cc, check_sharp, fourier_z,
                       helgason_fourier, hf_invert, lambda_op, phi_v, pi_action,
                       q_transform, radon, reducibility_witness)
from hororadon import oracles
from hororadon.cfunction import inverse_c_abs_sq
from hororadon.horocycle import max_abs_difference, pihat_action
from hororadon.transforms import change_base, freq_norm_sq, pihat_freq

M = 4096
QS = (2, 3)
SEED = 2024
VERDICTS: list[str] = []


def record(number: int, name: str, ok: bool, detail: str) -> None:
    line = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {name}: {detail}"
    VERDICTS.append(line)
    print(line)


def rng_for(q: int, salt: int) -> np.random.Generator:
    return np.random.default_rng([SEED, q, salt])


def grid_diff(A: FreqFunction, B: FreqFunction) -> float:
    d = max(A.depth, B.depth)
    return float(np.abs(A.refine(d).grid(M) - B.refine(d).grid(M)).max())


def coeff_diff(A: FreqFunction, B: FreqFunction) -> float:
    d = max(A.depth, B.depth)
    A, B = A.refine(d), B.refine(d)
    lo, hi = min(A.n_min, B.n_min), max(A.n_max, B.n_max)
    a = np.zeros((A.coeffs.shape[0], hi - lo + 1), complex)
    b = np.zeros_like(a)
    a[:, A.n_min - lo:A.n_max - lo + 1] = A.coeffs
    b[:, B.n_min - lo:B.n_max - lo + 1] = B.coeffs
    return float(np.abs(a - b).max())


def test_criterion_1_fourier_slice():
    worst = 0.0
    for q in QS:
        tree, rng = Tree(q), rng_for(q, 1)
        bases = [ROOT, (0,), (1,), (0, 1), (2, 0)]
        for _ in range(50):
            f = VertexFunction.random(tree, 3, rng)
            for v in bases:
                worst = max(worst, coeff_diff(fourier_z(abel(f, v)), helgason_fourier(f, v)))
    ok = worst <= 1e-12
    record(1, "Fourier slice I", ok, f"max coefficient deviation {worst:.2e} (tol 1e-12)")
    assert ok


def test_criterion_2_unitarity():
    worst = doubling = 0.0
    for q in QS:
        tree, rng = Tree(q), rng_for(q, 2)
        for i in range(50):
            f = VertexFunction.random(tree, 1 + i % 4, rng)  # radii 1..4
            G = q_transform(f, M=M)
            lhs = freq_norm_sq(G, M)
            worst = max(worst, abs(lhs - f.norm_sq()))
            doubling = max(doubling, abs(freq_norm_sq(q_transform(f, M=2 * M), 2 * M) - lhs))
    ok = worst <= 1e-8 and doubling <= 1e-9
    record(2, "unitarity of Q", ok,
           f"|‖Qf‖²-‖f‖²| {worst:.2e} (tol 1e-8), grid doubling {doubling:.2e} (tol 1e-9)")
    assert ok


def test_criterion_3_plancherel_identity():
    worst = 0.0
    for q in QS:
        tree = Tree(q)
        t = tree.grid(M)
        # direct |c|^{-2} evaluation; t = 0 is the removable zero of the weight
        vals = np.concatenate([[0.0], inverse_c_abs_sq(t[1:], q)])
        worst = max(worst, abs(float(tree.c_q) * vals.mean() - 1.0))
        worst = max(worst, abs(freq_norm_sq(q_transform(VertexFunction.delta(tree), M=M), M)
                               - 1.0))
    ok = worst <= 1e-10
    record(3, "Plancherel weight identity", ok, f"deviation {worst:.2e} (tol 1e-10)")
    assert ok


def test_criterion_4_intertwining():
    q_err = 0.0
    radon_err = 0
    for q in QS:
        tree, rng = Tree(q), rng_for(q, 4)
        f = VertexFunction.random(tree, 3, rng)
        Qf, Rf = q_transform(f, M=M), radon(f)
        for _ in range(20):
            g = Isometry.random(tree, rng)
            gf = pi_action(g, f)
            q_err = max(q_err, grid_diff(q_transform(gf, M=M), pihat_freq(g, Qf, M)))
            radon_err = max(radon_err, max_abs_difference(radon(gf), pihat_action(g, Rf)))
    ok = q_err <= 1e-8 and radon_err == 0
    record(4, "intertwining", ok,
           f"Q grid deviation {q_err:.2e} (tol 1e-8), Radon table deviation {radon_err} (exact)")
    assert ok


def test_criterion_5_base_independence():
    lam = law = 0.0
    for q in QS:
        tree, rng = Tree(q), rng_for(q, 5)
        F = radon(VertexFunction.random(tree, 3, rng))
        ball = tree.ball(ROOT, 2)
        ref = lambda_op(F, ROOT, M)
        phis = {v: phi_v(F, v) for v in ball}
        for v in ball:
            lam = max(lam, grid_diff(change_base(lambda_op(F, v, M), ROOT, M), ref))
        for u, v in itertools.product(ball, repeat=2):
            law = max(law, grid_diff(phis[u], change_base(phis[v], u, M)))
    ok = lam <= 1e-10 and law <= 1e-10
    record(5, "base independence of Λ", ok,
           f"two-base deviation {lam:.2e}, base-change law {law:.2e} (tol 1e-10)")
    assert ok


def test_criterion_6_inversion():
    worst = 0.0
    for q in QS:
        tree, rng = Tree(q), rng_for(q, 6)
        ball = tree.ball(ROOT, 3)
        for _ in range(20):
            f = VertexFunction.random(tree, 3, rng)
            rec = hf_invert(phi_v(radon(f)), ball, M)
            a, b = f.to_array(ball), rec.to_array(ball)
            worst = max(worst, float(np.linalg.norm(a - b) / np.linalg.norm(a)))
    ok = worst <= 1e-6
    record(6, "inversion round trip", ok, f"relative l2 error {worst:.2e} (tol 1e-6)")
    assert ok


def test_criterion_7_range_and_symmetry():
    cc = flat = sharp = 0.0
    neg = {}
    for q in QS:
        tree, rng = Tree(q), rng_for(q, 7)
        for _ in range(5):
            f = VertexFunction.random(tree, 3, rng)
            F = radon(f)
            r = check_range_cc(F)
            assert r.metadata["exact"]
            cc = max(cc, r.max_residual)
            flat = max(flat, check_flat(F, M=M).max_residual)
            for v in (ROOT, (1,)):
                sharp = max(sharp, check_sharp(helgason_fourier(f, v, depth=4), v, 3,
                                               M).max_residual)
        # negative fixtures
        vals = F.values.copy()
        vals[0, 0] += 1
        neg.setdefault("range_cc", []).append(
            check_range_cc(HoroFunction(tree, ROOT, F.depth, F.n_min, vals)).max_residual)
        slot = np.zeros((tree.num_cylinders(1), 1), dtype=np.int64)
        slot[0, 0] = 1
        neg.setdefault("flat", []).append(
            check_flat(HoroFunction(tree, ROOT, 1, 1, slot), M=M).max_residual)
        k = np.arange(M)
        odd = FreqFunction(tree, ROOT, 0, samples=((k > 0) & (k < M // 2))[None, :] * 1.0)
        neg.setdefault("sharp", []).append(check_sharp(odd, test_ball_radius=0, M=M).max_residual)
    pos_ok = cc == 0 and flat <= 1e-10 and sharp <= 1e-10
    tols = {"range_cc": 0.0, "flat": 1e-10, "sharp": 1e-10}
    neg_ok = all(min(rs) > 0 and min(rs) >= 10 * tols[name] for name, rs in neg.items())
    ok = pos_ok and neg_ok
    negs = ", ".join(f"{k} {min(v):.2e}" for k, v in neg.items())
    record(7, "range and symmetry", ok,
           f"range_cc {cc:.0e} (exact), flat {flat:.2e}, sharp {sharp:.2e} (tol 1e-10); "
           f"negative fixtures min residual {negs}")
    assert ok


def test_criterion_8_reducibility_witness():
    coeff = energy = 0.0
    for q in QS:
        tree, rng = Tree(q), rng_for(q, 8)
        f = VertexFunction.random(tree, 3, rng)
        gs = [Isometry.random(tree, rng) for _ in range(20)]
        r = reducibility_witness(f, gs, M=M)
        coeff = max(coeff, r.residuals["coefficient"])
        energy = max(energy, r.residuals["band_energy"])
        assert r.metadata["h1_norm_sq"] > 0 and r.metadata["h2_norm_sq"] > 0
    ok = coeff <= 1e-12 and energy <= 1e-8
    record(8, "reducibility witness", ok,
           f"|<h1, pi(g)h2>| {coeff:.2e} (tol 1e-12), energy split {energy:.2e} (tol 1e-8)")
    assert ok


def test_criterion_9_geometry_oracles():
    dist_bad = kappa_bad = 0
    part = Fraction(0)
    for q in QS:
        tree = Tree(q)
        adj = oracles.adjacency(tree, 3)
        ball = tree.ball(ROOT, 3)
        for x in ball:
            bfs = oracles.bfs_distances(adj, x)
            dist_bad += sum(tree.distance(x, y) != bfs[y] for y in ball)
        for u in tree.words(3):
            _, parent = oracles.bfs_parents(adj, u)
            paths = {x: oracles.path_to(parent, x) for x in ball}
            for v, x in itertools.product(ball, repeat=2):
                kappa_bad += (tree.horocyclic_index(v, x, u)
                              != oracles.confluence_kappa(paths[v], paths[x]))
        for L in range(1, 6):
            part = max(part, abs(sum(tree.nu_exact(L)) - 1))
            part = max(part, abs(sum((tree.cylinder_measure_o(u) for u in tree.words(L)),
                                     Fraction(0)) - 1))
    ok = dist_bad == 0 and kappa_bad == 0 and part == 0
    record(9, "geometry oracles", ok,
           f"distance mismatches {dist_bad}, kappa mismatches {kappa_bad}, "
           f"partition defect {part} (exact)")
    assert ok
