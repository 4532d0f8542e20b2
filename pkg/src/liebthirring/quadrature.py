"""Product quadrature on S^2, S^3 and SO(3); Monte Carlo on higher spheres.

Rules carry their measure: weights sum to the geometric volume or to 1 for
the normalized measure. No node lies on a coordinate singularity, since the
Gauss-Legendre abscissae are interior to (-1, 1).

* S^2: Gauss-Legendre in ``cos(theta)`` x uniform ``phi``.
* S^3: Hopf coordinates ``(cos eta e^{i xi1}, sin eta e^{i xi2})``, where
  the surface measure is ``du dxi1 dxi2 / 4`` with ``u = cos(2 eta)``;
  Gauss-Legendre in ``u`` x uniform ``xi1`` x uniform ``xi2``.
* SO(3): Gauss-Legendre in ``cos(theta)`` x uniform ``phi`` x uniform ``psi``
  (z-y-z Euler angles, Haar density ``sin(theta)``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .spectra import ManifoldId, _sphere_area

MAX_DEGREE = 512


@dataclass(frozen=True)
class QuadratureRule:
    manifold: ManifoldId
    nodes: np.ndarray
    weights: np.ndarray
    exactness_degree: int

    @property
    def size(self) -> int:
        return len(self.weights)


def _uniform_angles(n):
    return 2 * np.pi * np.arange(n) / n


def build_rule(manifold: ManifoldId, degree: int) -> QuadratureRule:
    """Rule exact for polynomials (band-limited functions) up to ``degree``."""
    if degree < 1 or int(degree) != degree:
        raise DomainError("degree must be a positive integer")
    if degree > MAX_DEGREE:
        raise DomainError(f"degree {degree} exceeds the supported maximum {MAX_DEGREE}")
    degree = int(degree)
    model = manifold.spectral_model
    nphi = degree + 1
    k = degree // 2 + 1
    t, wt = np.polynomial.legendre.leggauss(k)
    ang = _uniform_angles(nphi)
    dang = 2 * np.pi / nphi

    if manifold.kind == "so3":
        T, PHI, PSI = np.meshgrid(t, ang, ang, indexing="ij")
        W = np.broadcast_to(wt[:, None, None] * dang * dang, T.shape)
        nodes = np.stack([PHI.ravel(), np.arccos(T).ravel(), PSI.ravel()], axis=-1)
        weights = W.ravel() / (8 * np.pi**2) * manifold.volume
    elif model.m == 3:
        T, PHI = np.meshgrid(t, ang, indexing="ij")
        s = np.sqrt(1 - T**2)
        nodes = np.stack([s * np.cos(PHI), s * np.sin(PHI), T], axis=-1).reshape(-1, 3)
        W = np.broadcast_to(wt[:, None] * dang, T.shape)
        weights = W.ravel() * (manifold.volume / (4 * np.pi))
    elif model.m == 4:
        U, X1, X2 = np.meshgrid(t, ang, ang, indexing="ij")
        c = np.sqrt((1 + U) / 2)
        s = np.sqrt((1 - U) / 2)
        nodes = np.stack(
            [c * np.cos(X1), c * np.sin(X1), s * np.cos(X2), s * np.sin(X2)], axis=-1
        ).reshape(-1, 4)
        W = np.broadcast_to(wt[:, None, None] * dang * dang / 4, U.shape)
        weights = W.ravel() * (manifold.volume / (2 * np.pi**2))
    else:
        raise DomainError(
            f"no product rule for {manifold.label}; use monte_carlo_sphere for m >= 5"
        )
    return QuadratureRule(manifold, nodes, np.ascontiguousarray(weights), degree)


def integrate(rule: QuadratureRule, f):
    """``sum_i w_i f(node_i)``; ``f`` maps the ``(P, d)`` node array to ``(P,)`` values."""
    vals = np.asarray(f(rule.nodes))
    if vals.shape != rule.weights.shape:
        raise DomainError(f"f returned shape {vals.shape}, expected {rule.weights.shape}")
    bad = ~np.isfinite(vals)
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise DomainError(f"non-finite integrand {vals[i]} at node {i}: {rule.nodes[i]}")
    # numpy's sum is pairwise, so the result does not depend on chunking
    return np.sum(rule.weights * vals)


def sample_sphere(m: int, samples: int, seed: int) -> np.ndarray:
    """Uniform points on S^{m-1} from normalized Gaussians (Philox stream)."""
    rng = np.random.Generator(np.random.Philox(seed))
    x = rng.standard_normal((samples, m))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def monte_carlo_sphere(m: int, samples: int, seed: int, f, chunk: int = 200_000):
    """Estimate ``int_{S^{m-1}} f`` and its standard error.

    Samples are drawn from a counter-based Philox generator keyed by
    ``seed``, so results are bit-reproducible.
    """
    if m < 2:
        raise DomainError("m must be >= 2")
    if samples < 1000:
        raise DomainError("Monte Carlo needs at least 1000 samples")
    rng = np.random.Generator(np.random.Philox(seed))
    total = total_sq = 0.0
    done = 0
    while done < samples:
        n = min(chunk, samples - done)
        x = rng.standard_normal((n, m))
        x /= np.linalg.norm(x, axis=1, keepdims=True)
        v = np.asarray(f(x), dtype=float)
        if not np.all(np.isfinite(v)):
            raise DomainError("non-finite Monte Carlo integrand")
        total += float(np.sum(v))
        total_sq += float(np.sum(v * v))
        done += n
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0) * samples / (samples - 1)
    area = _sphere_area(m)
    return area * mean, area * math.sqrt(var / samples)
