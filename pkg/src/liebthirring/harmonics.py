"""Eigenfunctions of the Laplacian on spheres and SO(3).

Conventions
-----------
* Points on S^{m-1} are Cartesian unit vectors, arrays of shape ``(..., m)``.
* Points on SO(3) are z-y-z Euler angles ``(phi, theta, psi)``, shape ``(..., 3)``.
* Real orthonormal spherical harmonics on S^2 are indexed by degree ``n`` and
  ``ell = 1..2n+1``; ``ell - n - 1`` is the azimuthal order, negative orders
  carry ``sin``, positive orders ``cos``.
* ``D^l_{ij}(phi, theta, psi) = exp(-1j*i*phi) d^l_{ij}(theta) exp(-1j*j*psi)``
  with ``d^l_{ij}(theta) = <l i| exp(-1j*theta*J_y) |l j>``.

Bases built by :func:`eigenbasis` are orthonormal for the manifold's own
measure (surface measure or normalized).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import lpmv

from .errors import DomainError
from .spectra import ManifoldId, Measure, level_eigenvalue, sphere_multiplicity, _sphere_area

_RECURRENCE_LIMIT = 10_000


# ---------------------------------------------------------------------------
# orthogonal polynomials
# ---------------------------------------------------------------------------


def gegenbauer(alpha: float, n: int, t):
    """Gegenbauer polynomial ``C_n^{(alpha)}(t)`` by the three-term recurrence."""
    if alpha <= -0.5:
        raise DomainError("alpha must exceed -1/2")
    if n < 0:
        raise DomainError("n must be nonnegative")
    if n > _RECURRENCE_LIMIT:
        warnings.warn(f"Gegenbauer recurrence at n={n} may be inaccurate", RuntimeWarning)
    t = np.asarray(t, dtype=float)
    prev = np.ones_like(t)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = 2 * alpha * t
    for k in range(2, n + 1):
        prev, cur = cur, (2 * t * (k + alpha - 1) * cur - (k + 2 * alpha - 2) * prev) / k
    return cur if cur.ndim else float(cur)


def jacobi(k: int, a: float, b: float, x):
    """Jacobi polynomial ``P_k^{(a,b)}(x)`` by the three-term recurrence."""
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if k == 0:
        return prev
    cur = (a + 1) + (a + b + 2) * (x - 1) / 2
    for n in range(2, k + 1):
        s = 2 * n + a + b
        c1 = 2 * n * (n + a + b) * (s - 2)
        c2 = (s - 1) * (s * (s - 2) * x + a * a - b * b)
        c3 = 2 * (n + a - 1) * (n + b - 1) * s
        prev, cur = cur, (c2 * cur - c3 * prev) / c1
    return cur


# ---------------------------------------------------------------------------
# zonal kernels
# ---------------------------------------------------------------------------


def zonal_kernel(m: int, n: int, x, y):
    """Reproducing kernel of the degree-n eigenspace of S^{m-1}.

    ``Z_n(x, y) = (k_{mn}/sigma_m) C_n^{((m-2)/2)}(x.y) / C_n^{((m-2)/2)}(1)``;
    on the diagonal this is ``k_{mn}/sigma_m``. The circle (m = 2) uses
    ``cos(n angle)/pi``.
    """
    if m < 2 or n < 1:
        raise DomainError("zonal_kernel needs m >= 2 and n >= 1")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    t = np.clip(np.sum(x * y, axis=-1), -1.0, 1.0)
    if m == 2:
        return np.cos(n * np.arccos(t)) / math.pi
    alpha = (m - 2) / 2
    norm = sphere_multiplicity(m, n) / _sphere_area(m)
    return norm * gegenbauer(alpha, n, t) / gegenbauer(alpha, n, 1.0)


# ---------------------------------------------------------------------------
# S^2 and S^3 bases
# ---------------------------------------------------------------------------


def _real_sh(n, order, theta, phi):
    am = abs(order)
    norm = math.sqrt(
        (2 * n + 1) / (4 * math.pi) * math.exp(math.lgamma(n - am + 1) - math.lgamma(n + am + 1))
    )
    leg = lpmv(am, n, np.cos(theta))
    if order == 0:
        return norm * leg
    if order > 0:
        return math.sqrt(2) * norm * leg * np.cos(am * phi)
    return math.sqrt(2) * norm * leg * np.sin(am * phi)


def sphere_basis_S2(n: int, ell: int, x):
    """Real orthonormal spherical harmonic of degree ``n`` (surface measure)."""
    if n < 0 or not 1 <= ell <= 2 * n + 1:
        raise DomainError(f"need n >= 0 and 1 <= ell <= {2 * n + 1}")
    x = np.asarray(x, dtype=float)
    theta = np.arccos(np.clip(x[..., 2], -1.0, 1.0))
    phi = np.arctan2(x[..., 1], x[..., 0])
    return _real_sh(n, ell - n - 1, theta, phi)


def _s3_norm(n, l):
    # 1 / int_0^pi sin^{2l+2} chi [C_{n-l}^{(l+1)}(cos chi)]^2 d chi
    k = n - l
    return math.sqrt(
        2 ** (2 * l + 1)
        * (n + 1)
        * math.exp(math.lgamma(k + 1) + 2 * math.lgamma(l + 1) - math.lgamma(n + l + 2))
        / math.pi
    )


def sphere_basis_S3(n: int, l: int, order: int, x):
    """Hyperspherical harmonic on S^3 with quantum numbers ``0 <= l <= n``, ``|order| <= l``.

    ``x = (sin chi sin theta cos phi, sin chi sin theta sin phi, sin chi cos theta, cos chi)``.
    Orthonormal for the surface measure (total 2 pi^2), eigenvalue ``n(n+2)``.
    """
    if not (0 <= l <= n and abs(order) <= l):
        raise DomainError("need 0 <= l <= n and |order| <= l")
    x = np.asarray(x, dtype=float)
    r = np.sqrt(x[..., 0] ** 2 + x[..., 1] ** 2 + x[..., 2] ** 2)
    safe = np.where(r > 0, r, 1.0)
    theta = np.arccos(np.clip(x[..., 2] / safe, -1.0, 1.0))
    phi = np.arctan2(x[..., 1], x[..., 0])
    radial = r**l * gegenbauer(l + 1, n - l, np.clip(x[..., 3], -1.0, 1.0))
    return _s3_norm(n, l) * radial * _real_sh(l, order, theta, phi)


# ---------------------------------------------------------------------------
# Wigner functions
# ---------------------------------------------------------------------------


def wigner_small_d(ell: int, i: int, j: int, theta):
    """``d^l_{ij}(theta)`` from the Jacobi-polynomial recurrence."""
    if ell < 0 or abs(i) > ell or abs(j) > ell:
        raise DomainError("need |i|, |j| <= ell")
    theta = np.asarray(theta, dtype=float)
    mp, m = i, j
    k = min(ell + m, ell - m, ell + mp, ell - mp)
    if k == ell + m:
        a, lam = mp - m, mp - m
    elif k == ell - m:
        a, lam = m - mp, 0
    elif k == ell + mp:
        a, lam = m - mp, 0
    else:
        a, lam = mp - m, mp - m
    b = 2 * ell - 2 * k - a
    coef = (-1) ** lam * math.sqrt(math.comb(2 * ell - k, k + a) / math.comb(k + b, b))
    half = theta / 2
    return coef * np.sin(half) ** a * np.cos(half) ** b * jacobi(k, a, b, np.cos(theta))


def wigner_D(ell: int, i: int, j: int, g):
    """Matrix coefficient ``D^l_{ij}`` at Euler angles ``g = (phi, theta, psi)``."""
    g = np.asarray(g, dtype=float)
    phi, theta, psi = g[..., 0], g[..., 1], g[..., 2]
    return np.exp(-1j * i * phi) * wigner_small_d(ell, i, j, theta) * np.exp(-1j * j * psi)


def wigner_D_matrix(ell: int, g) -> np.ndarray:
    """Full ``(2l+1) x (2l+1)`` matrix; entry ``[i+l, j+l]`` is ``D^l_{ij}``."""
    g = np.asarray(g, dtype=float)
    out = np.empty(g.shape[:-1] + (2 * ell + 1, 2 * ell + 1), dtype=complex)
    for i in range(-ell, ell + 1):
        for j in range(-ell, ell + 1):
            out[..., i + ell, j + ell] = wigner_D(ell, i, j, g)
    return out


# ---------------------------------------------------------------------------
# orthonormal eigenbases
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EigenBasis:
    """Finite orthonormal set of Laplace eigenfunctions.

    ``labels[b]`` identifies function ``b``; ``eigenvalues[b]`` is its
    eigenvalue. :meth:`evaluate` returns an array of shape ``(B, P)``.
    """

    manifold: ManifoldId
    levels: tuple[int, ...]
    labels: tuple[tuple, ...]
    eigenvalues: np.ndarray
    factor: float = 1.0
    frames: tuple = field(default=(), repr=False)

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def is_complex(self) -> bool:
        return self.manifold.kind == "so3"

    def level_slices(self) -> dict[int, slice]:
        out, start = {}, 0
        for lev in self.levels:
            cnt = sum(1 for lab in self.labels if lab[0] == lev)
            out[lev] = slice(start, start + cnt)
            start += cnt
        return out

    def evaluate(self, points) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        kind = self._basis_kind()
        if kind == "s2":
            rows = [sphere_basis_S2(n, ell, points) for n, ell in self.labels]
        elif kind == "s3":
            rows = [sphere_basis_S3(n, l, o, points) for n, l, o in self.labels]
        elif kind == "so3":
            rows = [
                math.sqrt(2 * ell + 1) * wigner_D(ell, i, j, points) for ell, i, j in self.labels
            ]
        else:
            rows = []
            m = self.manifold.spectral_model.m
            for n, poles, W in self.frames:
                Z = zonal_kernel(m, n, poles[:, None, :], points[None, :, :])
                rows.extend(W @ Z)
        return self.factor * np.array(rows)

    def _basis_kind(self):
        if self.frames:
            return "zonal"
        if self.manifold.kind == "so3":
            return "so3"
        m = self.manifold.spectral_model.m
        return "s2" if m == 3 else "s3"


def _zonal_frame(m, n, rng):
    k = sphere_multiplicity(m, n)
    poles = rng.standard_normal((k, m))
    poles /= np.linalg.norm(poles, axis=1, keepdims=True)
    G = zonal_kernel(m, n, poles[:, None, :], poles[None, :, :])
    w, V = np.linalg.eigh(G)
    if w.min() <= 1e-10 * w.max():
        raise DomainError(f"degenerate pole set for level {n} on S^{m - 1}")
    return poles, (V / np.sqrt(w)) @ V.T


def eigenbasis(manifold: ManifoldId, levels, seed: int = 0, zonal: bool | None = None) -> EigenBasis:
    """Orthonormal eigenfunctions spanning the given levels.

    S^2, S^3 (and SU(2)) and SO(3) get explicit bases. Higher spheres, or any
    sphere with ``zonal=True``, use zonal functions at ``k_{mn}`` seeded
    random poles, whitened by their exact Gram matrix ``Z_n(p_a, p_b)``.
    """
    levels = tuple(sorted(set(int(n) for n in levels)))
    if not levels or levels[0] < 1:
        raise DomainError("levels must be positive integers")
    model = manifold.spectral_model
    labels, frames = [], []
    if manifold.kind == "so3":
        nat_volume = 1.0
        for ell in levels:
            labels += [(ell, i, j) for i in range(-ell, ell + 1) for j in range(-ell, ell + 1)]
    else:
        m = model.m
        if m < 3:
            raise DomainError("eigenbases are provided for m >= 3")
        nat_volume = manifold.geometric_volume
        if zonal is None:
            zonal = m >= 5
        if zonal:
            rng = np.random.Generator(np.random.Philox(seed))
            for n in levels:
                poles, W = _zonal_frame(m, n, rng)
                frames.append((n, poles, W))
                labels += [(n, a) for a in range(len(poles))]
        elif m == 3:
            for n in levels:
                labels += [(n, ell) for ell in range(1, 2 * n + 2)]
        else:
            for n in levels:
                labels += [(n, l, o) for l in range(n + 1) for o in range(-l, l + 1)]
    eig = np.array([level_eigenvalue(manifold, lab[0]) for lab in labels], dtype=float)
    factor = math.sqrt(nat_volume / manifold.volume)
    return EigenBasis(manifold, levels, tuple(labels), eig, factor, tuple(frames))


def zonal_basis(manifold: ManifoldId, n: int, poles) -> EigenBasis:
    """Orthonormalised zonal harmonics ``Z_n(., p)`` at the given poles."""
    model = manifold.spectral_model
    if manifold.kind == "so3" or model.m < 3:
        raise DomainError("zonal bases exist on spheres with m >= 3")
    m = model.m
    poles = np.atleast_2d(np.asarray(poles, dtype=float))
    poles = poles / np.linalg.norm(poles, axis=1, keepdims=True)
    G = zonal_kernel(m, n, poles[:, None, :], poles[None, :, :])
    w, V = np.linalg.eigh(np.atleast_2d(G))
    if w.min() <= 1e-10 * w.max():
        raise DomainError("zonal functions at these poles are linearly dependent")
    W = (V / np.sqrt(w)) @ V.T
    labels = tuple((n, a) for a in range(len(poles)))
    eig = np.full(len(labels), float(level_eigenvalue(manifold, n)))
    factor = math.sqrt(manifold.geometric_volume / manifold.volume)
    return EigenBasis(manifold, (n,), labels, eig, factor, ((n, poles, W),))


def gradient_energy(family) -> float:
    """``sum_j ||grad psi_j||^2 = sum_j sum_b lambda_b |c_jb|^2`` for an orthonormal basis."""
    C = np.asarray(family.coefficients)
    lam = np.asarray(family.basis.eigenvalues, dtype=float)
    return float(np.sum(np.abs(C) ** 2 * lam[None, :]))
