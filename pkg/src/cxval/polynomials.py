"""Polynomial root analysis and the delta-domain coefficient transform."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

# Relative residual accepted from the root finder, and the band around
# modulus 1 reported as marginal instead of silently tie-broken.
ROOT_TOLERANCE = 1e-8
MARGINAL_BAND = 1e-8
DEGREE_CAP = 32


@dataclass(frozen=True)
class Polynomial:
    """Real coefficients in descending powers; leading coefficient nonzero.

    Leading zeros (a quantized coefficient may collapse to 0) are stripped on
    construction and the count recorded, since stripping changes the order.
    """

    coeffs: tuple[float, ...]
    stripped_leading: int = 0

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[float]) -> "Polynomial":
        vals = [float(c) for c in coeffs]
        if not vals:
            raise ValueError("empty polynomial")
        stripped = 0
        while vals and vals[0] == 0.0:
            vals.pop(0)
            stripped += 1
        if not vals:
            raise ValueError("zero polynomial")
        if len(vals) - 1 > DEGREE_CAP:
            raise ValueError(f"polynomial order {len(vals) - 1} exceeds cap {DEGREE_CAP}")
        return cls(tuple(vals), stripped)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def evaluate(self, z: complex) -> complex:
        acc = 0j
        for c in self.coeffs:
            acc = acc * z + c
        return acc


@dataclass(frozen=True)
class RootSet:
    """All roots of a polynomial (with multiplicity) plus summary figures."""

    roots: tuple[complex, ...]
    max_modulus: float
    max_residual: float = 0.0

    @property
    def marginal(self) -> bool:
        return abs(self.max_modulus - 1.0) <= MARGINAL_BAND

    def __len__(self) -> int:
        return len(self.roots)


def roots_of(p: Polynomial | Sequence[float]) -> RootSet:
    """All ``order`` roots via companion-matrix eigenvalues.

    Order-0 polynomials have no roots; the all-zero vector is rejected by
    Polynomial construction.
    """
    if not isinstance(p, Polynomial):
        p = Polynomial.from_coeffs(p)
    if p.order == 0:
        return RootSet((), 0.0, 0.0)
    roots = tuple(complex(r) for r in np.roots(np.asarray(p.coeffs, dtype=float)))
    norm = max(abs(c) for c in p.coeffs)
    residual = max(abs(p.evaluate(r)) for r in roots) / norm
    return RootSet(roots, max(abs(r) for r in roots), residual)


def max_root_modulus(p: Polynomial | Sequence[float]) -> float:
    """Largest root modulus; 0 for constant polynomials."""
    return roots_of(p).max_modulus


def delta_transform(p: Polynomial | Sequence[float], delta: float) -> Polynomial:
    """Coefficients of p(1 + delta*q) in powers of q, divided by delta**order.

    Roots map back through z = 1 + delta*q; the normalization keeps the
    coefficients O(1) and leaves the roots untouched.
    """
    if not isinstance(p, Polynomial):
        p = Polynomial.from_coeffs(p)
    if delta <= 0:
        raise ValueError("invalid delta")
    d = Fraction(delta)
    order = p.order
    # exact binomial expansion of each power (1 + d*q)**m, accumulated in q
    out = [Fraction(0)] * (order + 1)  # out[i] multiplies q**(order - i)
    for i, c in enumerate(p.coeffs):
        m = order - i  # power of z this coefficient multiplies
        cf = Fraction(c)
        for j in range(m + 1):
            out[order - j] += cf * math.comb(m, j) * d**j
    scale = d**order
    return Polynomial(tuple(float(v / scale) for v in out), p.stripped_leading)


def map_delta_roots(roots: Sequence[complex], delta: float) -> tuple[complex, ...]:
    """Map delta-domain roots back to the z-plane: z = 1 + delta*q."""
    return tuple(1.0 + delta * q for q in roots)
