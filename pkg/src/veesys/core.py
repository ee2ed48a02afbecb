"""Core value types: covector configurations and the canonical bilinear form.

A configuration is a labelled list of n covectors spanning an r-dimensional
space, stored as the columns of an r x n matrix.  The canonical form is

    G(x, y) = sum_alpha  alpha(x) * alpha(y),

i.e. G = A A^T for the column matrix A.  It identifies the space with its
dual; the dual of a covector alpha is  alpha_dual = G^{-1} alpha, and the
induced scalar product of two covectors is  alpha^T G^{-1} beta.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegeneratePlane, SingularForm
from .tolerances import resolve


def _as_readonly(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class CovectorConfiguration:
    """A labelled, ordered set of covectors (columns of ``matrix``).

    Invariants enforced at construction: the covectors span the full
    r-dimensional space, none is zero, and no two are proportional.
    """

    matrix: np.ndarray  # r x n, covectors as columns
    labels: tuple = ()

    def __post_init__(self):
        matrix = _as_readonly(np.atleast_2d(self.matrix))
        object.__setattr__(self, "matrix", matrix)
        r, n = matrix.shape
        if n < r:
            raise ValueError(f"need at least r={r} covectors, got {n}")
        labels = tuple(self.labels) if self.labels else tuple(
            str(i + 1) for i in range(n)
        )
        if len(labels) != n:
            raise ValueError(f"{len(labels)} labels for {n} covectors")
        if len(set(labels)) != n:
            raise ValueError("labels must be distinct")
        object.__setattr__(self, "labels", labels)

        norms = np.linalg.norm(matrix, axis=0)
        if np.any(norms == 0.0):
            zero = [labels[i] for i in np.flatnonzero(norms == 0.0)]
            raise ValueError(f"zero covector(s) at label(s) {zero}")

        if np.linalg.matrix_rank(matrix) < r:
            raise ValueError("covectors do not span the ambient space")

        # Reject proportional pairs via normalized 2x2 minors.  For unit
        # covectors the largest minor of the pair (u, v) shrinks with the
        # angle between them, so it suffices to test the pair with the
        # largest |cos|.
        unit = matrix / norms
        gramlike = np.abs(unit.T @ unit)
        np.fill_diagonal(gramlike, 0.0)
        i, j = np.unravel_index(np.argmax(gramlike), gramlike.shape)
        if i != j:  # argmax hits the diagonal only when all pairs are orthogonal
            minors = (
                np.outer(unit[:, i], unit[:, j]) - np.outer(unit[:, j], unit[:, i])
            )
            if np.abs(minors).max() < resolve(None):
                raise ValueError(
                    f"covectors {labels[i]} and {labels[j]} are proportional"
                )

    @property
    def dimension(self):
        return self.matrix.shape[0]

    @property
    def n(self):
        return self.matrix.shape[1]

    def covector(self, index):
        """The covector at 0-based ``index`` as a 1-d array."""
        return self.matrix[:, index]

    def index_of(self, label):
        return self.labels.index(str(label))

    def sublabels(self, indices):
        return tuple(self.labels[i] for i in indices)

    def take(self, indices, labels=None):
        """Sub-configuration of the covectors at the given 0-based indices."""
        indices = list(indices)
        return CovectorConfiguration(
            self.matrix[:, indices],
            labels or tuple(self.labels[i] for i in indices),
        )

    def transformed(self, linear_map):
        """Apply an invertible linear map to every covector."""
        return CovectorConfiguration(np.asarray(linear_map) @ self.matrix,
                                     self.labels)

    def scaled(self, factors):
        """Scale covector i by factors[i] (scalar broadcast allowed)."""
        return CovectorConfiguration(self.matrix * np.asarray(factors),
                                     self.labels)


@dataclass(frozen=True)
class CanonicalForm:
    """The form G = sum alpha alpha^T, its inverse, and its condition number."""

    gram: np.ndarray
    gram_inverse: np.ndarray
    condition_number: float

    def __post_init__(self):
        object.__setattr__(self, "gram", _as_readonly(self.gram))
        object.__setattr__(self, "gram_inverse", _as_readonly(self.gram_inverse))


@dataclass(frozen=True)
class PlaneForm:
    """Restrictions of G and of the plane form G^Pi to a 2-flat's dual plane.

    Both 2x2 matrices are expressed in the basis (alpha_dual, beta_dual) of
    the first two member covectors of the flat.
    """

    plane_index: object
    restricted_gram: np.ndarray
    restricted_plane_gram: np.ndarray
    basis: np.ndarray  # r x 2, the two dual vectors as columns

    def __post_init__(self):
        object.__setattr__(self, "restricted_gram",
                           _as_readonly(self.restricted_gram))
        object.__setattr__(self, "restricted_plane_gram",
                           _as_readonly(self.restricted_plane_gram))
        object.__setattr__(self, "basis", _as_readonly(self.basis))


def canonical_form(config):
    """Compute the canonical form G of a configuration.

    Raises SingularForm when the covectors fail to span (should not happen
    for configurations built through CovectorConfiguration, which enforces
    the span invariant, but loaded/constructed matrices are re-checked here).
    """
    A = config.matrix
    r = config.dimension
    G = A @ A.T
    G = 0.5 * (G + G.T)  # symmetrize against round-off
    eigvals = np.linalg.eigvalsh(G)
    smallest, largest = eigvals[0], eigvals[-1]
    if largest <= 0 or smallest <= largest * 1e-13:
        rank = int(np.sum(eigvals > largest * 1e-13))
        raise SingularForm(rank, r)
    G_inv = np.linalg.inv(G)
    G_inv = 0.5 * (G_inv + G_inv.T)
    return CanonicalForm(G, G_inv, float(largest / smallest))


def dual(config, form, index):
    """The dual vector G^{-1} alpha of covector ``index`` (0-based)."""
    return form.gram_inverse @ config.covector(index)


def pairing(config, form, i, j):
    """The canonical scalar product alpha_i^T G^{-1} alpha_j."""
    return float(config.covector(i) @ form.gram_inverse @ config.covector(j))


def pairing_matrix(config, form):
    """All pairwise canonical products as an n x n symmetric matrix."""
    M = config.matrix.T @ form.gram_inverse @ config.matrix
    return 0.5 * (M + M.T)


def restrict_forms(config, form, flat, rtol=None):
    """Restrict G and the plane form G^Pi of a flat to the flat's dual plane.

    The basis is (alpha_dual, beta_dual) for the flat's first two members.
    Raises DegeneratePlane if those two members are numerically proportional.
    """
    members = list(flat.members) if hasattr(flat, "members") else list(flat)
    i, j = members[0], members[1]
    u = dual(config, form, i)
    v = dual(config, form, j)
    nu_ = np.linalg.norm(u)
    nv_ = np.linalg.norm(v)
    tol = resolve(rtol)
    if np.linalg.norm(np.outer(u, v) - np.outer(v, u)) < tol * nu_ * nv_:
        raise DegeneratePlane(
            f"flat members {config.labels[i]}, {config.labels[j]} are proportional"
        )
    # G(x, y) evaluated on dual vectors equals the canonical pairing.
    g = np.array(
        [
            [pairing(config, form, i, i), pairing(config, form, i, j)],
            [pairing(config, form, i, j), pairing(config, form, j, j)],
        ]
    )
    # G^Pi(x, y) = sum over flat members gamma of gamma(x) gamma(y).
    vals_u = np.array([config.covector(k) @ u for k in members])
    vals_v = np.array([config.covector(k) @ v for k in members])
    gp = np.array(
        [
            [vals_u @ vals_u, vals_u @ vals_v],
            [vals_u @ vals_v, vals_v @ vals_v],
        ]
    )
    return PlaneForm(getattr(flat, "members", tuple(members)), g, gp,
                     np.column_stack([u, v]))
