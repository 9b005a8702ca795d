"""Legendre-Gauss-Lobatto reference element: nodes, weights, derivatives."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import Legendre


def lgl_nodes_weights(degree: int) -> tuple[np.ndarray, np.ndarray]:
    """LGL nodes (roots of (1-x^2) P'_p) and quadrature weights on [-1, 1]."""
    if degree < 1:
        raise ValueError("degree must be >= 1")
    legendre_p = Legendre.basis(degree)
    interior = legendre_p.deriv().roots() if degree >= 2 else np.array([])
    nodes = np.concatenate(([-1.0], np.sort(np.real(interior)), [1.0]))
    # symmetrize to kill last-ulp asymmetry from the root finder
    nodes = 0.5 * (nodes - nodes[::-1])
    lp = legendre_p(nodes)
    weights = 2.0 / (degree * (degree + 1) * lp * lp)
    return nodes, weights


def differentiation_matrix(nodes: np.ndarray) -> np.ndarray:
    """Lagrange differentiation matrix via barycentric weights."""
    n = len(nodes)
    bary = np.ones(n)
    for i in range(n):
        for j in range(n):
            if i != j:
                bary[i] /= nodes[i] - nodes[j]
    d = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i != j:
                d[i, j] = (bary[j] / bary[i]) / (nodes[i] - nodes[j])
        d[i, i] = -d[i].sum()
    return d


@dataclass(frozen=True)
class ReferenceElement:
    """Collocation data on [-1, 1]: nodes, weights, strong and weak derivatives."""

    degree: int
    nodes: np.ndarray
    weights: np.ndarray
    diff: np.ndarray        # strong-form differentiation matrix D
    diff_weak: np.ndarray   # M^{-1} Q^T with Q = M D

    @classmethod
    def lgl(cls, degree: int) -> "ReferenceElement":
        nodes, weights = lgl_nodes_weights(degree)
        d = differentiation_matrix(nodes)
        weak = (d * weights[:, None]).T / weights[:, None]
        el = cls(degree=degree, nodes=nodes, weights=weights, diff=d, diff_weak=weak)
        el._check()
        return el

    def _check(self):
        assert abs(self.weights.sum() - 2.0) < 1e-13
        assert np.max(np.abs(self.nodes + self.nodes[::-1])) < 1e-14
        assert np.max(np.abs(self.diff @ np.ones_like(self.nodes))) < 1e-12

    @property
    def n_nodes(self) -> int:
        return self.degree + 1
