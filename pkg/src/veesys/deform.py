"""Linearised scaling deformations.

A scaling deformation multiplies each covector alpha by mu_alpha(t) with
mu_alpha(0) = 1; its velocity vector xi_alpha = mu'_alpha(0) enters the
symmetric form X = sum_alpha xi_alpha alpha (x) alpha.  First-order
preservation of the plane conditions is linear in xi:

  * pair flat {i, j}:  X(alpha_i_dual, alpha_j_dual) = 0;
  * multi flat Pi:     (X^Pi - nu X) restricted to the dual plane is
        proportional to the restriction of G ("freeNu" mode: the nu-velocity
        is free and eliminated by cross-multiplication) or zero ("fixedNu"
        mode: the nu-function is frozen).

The uniform vector xi = 1 (global scaling, X = G) always lies in the kernel,
so the corank is at least 1; corank 1 certifies an isolated system.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import pairing_matrix
from .errors import NotAVeeSystem, Reducible
from .tolerances import RANK_RTOL, resolve
from .verify import check_vee

FREE_NU = "freeNu"
FIXED_NU = "fixedNu"


@dataclass(frozen=True)
class DeformationSystem:
    mode: str
    matrix: np.ndarray  # m x n in the unknowns xi
    rank: int
    corank: int
    kernel_basis: np.ndarray  # corank x n, orthonormal rows
    singular_values: np.ndarray  # descending
    spectral_gap: float  # smallest kept / largest dropped singular value


def _assemble_rows(config, report):
    """Rows of both modes: returns (pair_rows, multi_row_triples).

    Each multi flat contributes the three entry functions (M11, M12, M22) of
    (X^Pi - nu X) restricted to its dual plane, along with the restricted
    entries (g11, g12, g22) of G, from which either mode's equations follow.
    """
    decomp = report.decomposition
    P = pairing_matrix(config, report.form)
    n = decomp.n

    pair_rows = []
    for k in decomp.pair_flats:
        i, j = decomp.flats[k].members
        pair_rows.append(P[:, i] * P[:, j])

    multi_rows = []
    for k in decomp.multi_flats:
        f = decomp.flats[k]
        i, j = f.members[0], f.members[1]
        labels = config.sublabels(f.members)
        nu = report.nu_function[labels]
        member_mask = np.zeros(n)
        member_mask[list(f.members)] = 1.0
        weight = member_mask - nu  # coefficient of xi_a in (X^Pi - nu X)
        m11 = weight * P[:, i] * P[:, i]
        m12 = weight * P[:, i] * P[:, j]
        m22 = weight * P[:, j] * P[:, j]
        g = (P[i, i], P[i, j], P[j, j])
        multi_rows.append(((m11, m12, m22), g))
    return pair_rows, multi_rows


def build_system(config, mode=FREE_NU, rtol=None, report=None):
    """Assemble the linearised system in the unknowns xi and analyse it."""
    if mode not in (FREE_NU, FIXED_NU):
        raise ValueError(f"unknown mode {mode!r}")
    tol = resolve(rtol)
    report = report or check_vee(config, rtol=tol)
    if not report.is_vee_system:
        raise NotAVeeSystem(
            f"max residual {report.max_residual:.3e} exceeds tolerance {tol:.1e}"
        )

    pair_rows, multi_rows = _assemble_rows(config, report)
    rows = list(pair_rows)
    for (m11, m12, m22), (g11, g12, g22) in multi_rows:
        if mode == FREE_NU:
            # proportionality to (g11, g12, g22), free factor eliminated
            rows.append(m11 * g12 - m12 * g11)
            rows.append(m11 * g22 - m22 * g11)
        else:
            rows.extend((m11, m12, m22))

    matrix = np.array(rows)
    # Rows that vanish to round-off carry no information; normalizing them
    # would inject noise, so drop them before scaling rows to unit norm.
    norms = np.linalg.norm(matrix, axis=1)
    keep = norms > norms.max() * 1e-9
    matrix = matrix[keep] / norms[keep, None]

    n = config.n
    _, svals, vt = np.linalg.svd(matrix)
    threshold = svals[0] * RANK_RTOL * max(matrix.shape)
    rank = int(np.sum(svals > threshold))
    corank = n - rank
    kernel = vt[rank:]
    if 0 < rank < len(svals):
        gap = float(svals[rank - 1] / svals[rank])
    else:
        gap = float("inf")
    return DeformationSystem(mode, matrix, rank, corank, kernel, svals, gap)


def deformation_dimension(config, rtol=None):
    """Corank of the freeNu system; 1 means only global scaling survives."""
    return build_system(config, FREE_NU, rtol=rtol).corank


def _is_connected_through_multi_flats(decomp):
    if decomp.n == 0:
        return True
    adjacency = [set() for _ in range(decomp.n)]
    for k in decomp.multi_flats:
        members = decomp.flats[k].members
        for a in members:
            adjacency[a].update(members)
    seen = {0}
    stack = [0]
    while stack:
        a = stack.pop()
        for b in adjacency[a]:
            if b not in seen:
                seen.add(b)
                stack.append(b)
    return len(seen) == decomp.n


def rigidity_test(config, rtol=None, report=None):
    """Fixed-nu rigidity check for an irreducible configuration.

    Returns {"corank", "scalingOnly", "onesResidual", "spectralGap"}.
    Raises Reducible when the covectors fall apart into components that
    share no multi flat (direct sums deform componentwise).
    """
    tol = resolve(rtol)
    report = report or check_vee(config, rtol=tol)
    if not _is_connected_through_multi_flats(report.decomposition):
        raise Reducible("configuration is disconnected across multi flats")
    system = build_system(config, FIXED_NU, rtol=tol, report=report)
    ones = np.ones(config.n) / np.sqrt(config.n)
    residual = float(np.linalg.norm(system.matrix @ ones))
    return {
        "corank": system.corank,
        "scalingOnly": system.corank == 1,
        "onesResidual": residual,
        "spectralGap": system.spectral_gap,
    }


def scan_family(family_id, grid=None, rtol=None):
    """Coranks of both modes over a parameter grid of a catalogue family.

    ``grid`` is a list of parameter dicts; defaults to the family's shipped
    grid.  Constructor failures are collected per point, not raised.
    """
    from . import catalogue  # local import: catalogue depends on this package

    entry = catalogue.entry(family_id)
    rows = []
    for params in grid if grid is not None else entry.default_grid:
        row = {"parameters": dict(params)}
        try:
            config = catalogue.construct(family_id, params)
            row["freeNuCorank"] = build_system(config, FREE_NU, rtol=rtol).corank
            row["fixedNuCorank"] = build_system(config, FIXED_NU, rtol=rtol).corank
        except Exception as exc:  # collected, not fatal
            row["error"] = f"{type(exc).__name__}: {exc}"
        rows.append(row)
    return rows
