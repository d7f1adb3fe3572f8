"""Harish-Chandra c-function of the tree and the unitarizing multiplier.

The Plancherel density on the frequency torus is ``c_q |c(1/2 + it)|^{-2}``.
Writing ``theta = t log q`` it simplifies to

    w(t) = (q^{1/2} + q^{-1/2})^2 * 4 sin^2(theta) / (q + 1/q - 2 cos(2 theta)),

which vanishes at t = 0 and t = T/2, is even and T-periodic, and has mean
``1 / c_q`` over a period.
"""

from __future__ import annotations

import math

import numpy as np


def c_function(z, q: int):
    """c(z) = (q^{1-z} - q^{z-1}) / ((q^{1/2} + q^{-1/2})(q^{1/2-z} - q^{z-1/2}))."""
    z = np.asarray(z, dtype=complex)
    lq = math.log(q)
    num = np.exp((1 - z) * lq) - np.exp((z - 1) * lq)
    den = np.exp((0.5 - z) * lq) - np.exp((z - 0.5) * lq)
    with np.errstate(divide="ignore", invalid="ignore"):
        return num / ((math.sqrt(q) + 1 / math.sqrt(q)) * den)


def inverse_c_abs_sq(t, q: int):
    """|c(1/2 + it)|^{-2} evaluated from the complex definition.

    Works with 1/c directly so the pole of c at t = 0 becomes a zero.
    """
    z = 0.5 + 1j * np.asarray(t, dtype=float)
    lq = math.log(q)
    inv = ((math.sqrt(q) + 1 / math.sqrt(q))
           * (np.exp((0.5 - z) * lq) - np.exp((z - 0.5) * lq))
           / (np.exp((1 - z) * lq) - np.exp((z - 1) * lq)))
    return np.abs(inv) ** 2


def plancherel_weight(t, q: int):
    """Closed form of |c(1/2 + it)|^{-2}."""
    theta = np.asarray(t, dtype=float) * math.log(q)
    s = np.sin(theta)
    pref = (math.sqrt(q) + 1 / math.sqrt(q)) ** 2
    return pref * 4 * s * s / (q + 1 / q - 2 * np.cos(2 * theta))


def multiplier(t, q: int):
    """sqrt(c_q) / |c(1/2 + it)|, the symbol of the unitarizing operator."""
    c_q = q / (2 * (q + 1))
    return np.sqrt(c_q * plancherel_weight(t, q))


def weight_on_grid(q: int, M: int) -> np.ndarray:
    """c_q w(t_k) at t_k = k T / M; the measure weight for the c-weighted norm."""
    theta = 2 * np.pi * np.arange(M) / M
    c_q = q / (2 * (q + 1))
    return c_q * plancherel_weight(theta / math.log(q), q)


def multiplier_on_grid(q: int, M: int) -> np.ndarray:
    return np.sqrt(weight_on_grid(q, M))


def multiplier_kernel(q: int, N: int, M: int = 4096) -> np.ndarray:
    """Fourier coefficients of the multiplier for |n| <= N (diagnostics only).

    Entry ``N + n`` is the coefficient of q^{int}. Because m(t) has a corner
    (|sin|) at t = 0 and T/2 the coefficients only decay like 1/n^2, so any
    truncation leaves a tail of relative size O(1/N).
    """
    if M <= 2 * N:
        raise ValueError("grid too coarse for the requested number of coefficients")
    coef = np.fft.fft(multiplier_on_grid(q, M)) / M
    idx = np.arange(-N, N + 1) % M
    return coef[idx].real
