"""Orthogonality/proportionality verification, the nu-function, weights,
harmonic ranges and extension checks.

A configuration passes verification when on every rank-2 flat:

  * pair flat {alpha, beta}:   alpha^T G^{-1} beta = 0;
  * multi flat Pi:             the plane form restricted to the dual plane is
                               proportional to the restriction of G, with
                               factor nu(Pi).

The factor satisfies nu(Pi) = 1/2 * sum over flat members of |alpha|^2
(squared canonical norm), which is what ``nu_trace`` computes and what all
reports display; the least-squares factor from the proportionality fit is
kept internal and must agree with the trace value.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import matroid
from .core import canonical_form, pairing, pairing_matrix, restrict_forms
from .errors import BadEmbedding, NotMultiFlat
from .projective import ProjectivePoint, cross_ratio
from .tolerances import resolve


@dataclass(frozen=True)
class FlatVerdict:
    flat: tuple  # member labels
    kind: str  # "pair" | "multi"
    residual: float
    nu: float = None  # present exactly for multi flats


@dataclass(frozen=True)
class VeeReport:
    is_vee_system: bool
    per_flat: tuple
    max_residual: float
    nu_function: dict  # member-label tuple -> nu (multi flats only)
    decomposition: object
    form: object
    rtol: float


@dataclass(frozen=True)
class WeightSolution:
    status: str  # "feasible" | "infeasible" | "underdetermined"
    weights: dict = None  # member-label tuple -> weight, when feasible
    universal_value: float = None
    residual: float = None


@dataclass(frozen=True)
class HarmonicRecord:
    flat: tuple  # member labels
    cross_ratio: float  # None when no orthogonal pair exists
    orthogonal_pair: tuple  # labels, None when missing
    verdict: bool
    note: str = ""


@dataclass(frozen=True)
class ExtensionReport:
    is_extension: bool
    nu_ratio: float  # common inner/outer ratio, None when not common
    per_flat_ratios: dict = field(default_factory=dict)


def check_vee(config, rtol=None, decomposition=None):
    """Verify the plane-by-plane conditions; returns a VeeReport.

    Pair-flat residual: |<alpha, beta>| normalized by the canonical norms.
    Multi-flat residual: relative deviation of the plane form from
    nu * (restricted G), with nu the least-squares factor.
    """
    tol = resolve(rtol)
    form = canonical_form(config)
    decomp = decomposition or matroid.decompose(config)
    P = pairing_matrix(config, form)

    verdicts = []
    nu_function = {}
    max_residual = 0.0
    for f in decomp.flats:
        labels = config.sublabels(f.members)
        if f.is_pair:
            i, j = f.members
            residual = abs(P[i, j]) / np.sqrt(P[i, i] * P[j, j])
            verdicts.append(FlatVerdict(labels, "pair", float(residual)))
        else:
            pf = restrict_forms(config, form, f, rtol=tol)
            g, gp = pf.restricted_gram, pf.restricted_plane_gram
            nu_lsq = float(np.tensordot(gp, g) / np.tensordot(g, g))
            residual = float(
                np.linalg.norm(gp - nu_lsq * g) / np.linalg.norm(gp)
            )
            nu = nu_trace(config, f, form=form)
            nu_function[labels] = nu
            verdicts.append(FlatVerdict(labels, "multi", residual, nu))
        max_residual = max(max_residual, residual)

    return VeeReport(
        is_vee_system=bool(max_residual < tol),
        per_flat=tuple(verdicts),
        max_residual=float(max_residual),
        nu_function=nu_function,
        decomposition=decomp,
        form=form,
        rtol=tol,
    )


def nu_trace(config, flat, form=None):
    """nu of a multi flat via the trace formula 1/2 sum |alpha|^2."""
    members = list(flat.members) if hasattr(flat, "members") else list(flat)
    if len(members) < 3:
        raise NotMultiFlat(f"flat {members} has fewer than three members")
    form = form or canonical_form(config)
    return 0.5 * sum(pairing(config, form, k, k) for k in members)


def solve_weights(config, rtol=None, report=None):
    """Solve the admissibility system: per covector, the weights of the
    multi flats through it must sum to 1.

    A covector lying in no multi flat makes the system infeasible (its row
    reads 0 = 1).  When the solution space has positive dimension the
    minimum-norm solution is returned with status "underdetermined".
    """
    tol = resolve(rtol)
    report = report or check_vee(config, rtol=tol)
    decomp = report.decomposition
    multi = [decomp.flats[k] for k in decomp.multi_flats]
    n = decomp.n
    M = np.zeros((n, len(multi)))
    for col, f in enumerate(multi):
        for i in f.members:
            M[i, col] = 1.0
    ones = np.ones(n)
    if len(multi) == 0:
        return WeightSolution("infeasible", residual=1.0)
    x, *_ = np.linalg.lstsq(M, ones, rcond=None)
    residual = float(np.abs(M @ x - ones).max())
    if residual >= 1e-9:
        return WeightSolution("infeasible", residual=residual)
    rank = np.linalg.matrix_rank(M, tol=1e-9)
    status = "underdetermined" if rank < len(multi) else "feasible"
    weights = {
        config.sublabels(f.members): float(x[col]) for col, f in enumerate(multi)
    }
    nus = np.array([report.nu_function[config.sublabels(f.members)] for f in multi])
    return WeightSolution(status, weights, float(x @ nus), residual)


def orthogonal_pairs(config, form, members, rtol=None):
    """Member pairs (0-based index pairs) with vanishing canonical product."""
    tol = max(resolve(rtol), 1e-9)
    found = []
    for i, j in itertools.combinations(members, 2):
        val = abs(pairing(config, form, i, j))
        scale = np.sqrt(
            pairing(config, form, i, i) * pairing(config, form, j, j)
        )
        if val / scale < tol * 10:
            found.append((i, j))
    return found


def check_harmonic(config, rtol=None, report=None):
    """Cross-ratio check on every 4-member flat.

    For each 4-flat, locate the orthogonal pair(s) and evaluate the
    cross-ratio with the orthogonal pair in the last two slots; the expected
    value is -1 (harmonic range).  One record per (flat, orthogonal pair).
    In a harmonic range one orthogonal pair forces the complementary pair to
    be orthogonal as well, so quads normally carry two orthogonal pairs
    ("two orthogonals"); the count is noted, the verdict only requires the
    cross-ratio.
    """
    tol = resolve(rtol)
    report = report or check_vee(config, rtol=tol)
    decomp, form = report.decomposition, report.form
    records = []
    for f in decomp.flats:
        if f.size != 4:
            continue
        labels = config.sublabels(f.members)
        pairs = orthogonal_pairs(config, form, f.members, rtol=tol)
        if not pairs:
            records.append(
                HarmonicRecord(labels, None, None, False, "NoOrthogonalPair")
            )
            continue
        for i, j in pairs:
            rest = [m for m in f.members if m not in (i, j)]
            pts = [ProjectivePoint(config.covector(m)) for m in rest + [i, j]]
            value = cross_ratio(*pts)
            ok = abs(value + 1.0) < max(tol, 1e-8) * 10
            note = "" if len(pairs) == 1 else f"{len(pairs)}OrthogonalPairs"
            records.append(
                HarmonicRecord(
                    labels,
                    float(value),
                    (config.labels[i], config.labels[j]),
                    bool(ok),
                    note,
                )
            )
    return records


def check_extension(inner, outer, embedding, rtol=None):
    """Check that ``inner`` embeds into ``outer`` covector-by-covector.

    ``embedding`` maps each inner covector index (0-based) to an outer
    index.  The embedding qualifies when every inner covector is
    proportional to its outer image.  When it does, the ratio
    nu_inner(flat) / nu_outer(corresponding outer flat) is computed for
    every inner multi flat.  ``nu_ratio`` is the common value over the
    inner flats whose outer flat lies entirely inside the embedded image
    (an inner flat carved out of a larger outer flat compares nu values
    of planes with different member sets, so it is reported in
    ``per_flat_ratios`` but excluded from the common value); None when
    the retained ratios disagree or none remain.
    """
    tol = resolve(rtol)
    emb = list(embedding)
    if len(emb) != inner.n:
        raise BadEmbedding(f"embedding has {len(emb)} entries for {inner.n} covectors")
    if len(set(emb)) != len(emb):
        raise BadEmbedding("embedding is not injective")
    if any(not (0 <= k < outer.n) for k in emb):
        raise BadEmbedding("embedding maps outside the outer configuration")

    for i, k in enumerate(emb):
        u = inner.covector(i)
        v = outer.covector(k)
        u = u / np.linalg.norm(u)
        v = v / np.linalg.norm(v)
        minors = np.outer(u, v) - np.outer(v, u)
        if np.abs(minors).max() > max(tol, 1e-9) * 100:
            return ExtensionReport(False, None)

    inner_report = check_vee(inner, rtol=tol)
    outer_report = check_vee(outer, rtol=tol)
    in_dec, out_dec = inner_report.decomposition, outer_report.decomposition

    image = set(emb)
    ratios = {}
    values = []
    for k in in_dec.multi_flats:
        f = in_dec.flats[k]
        labels = inner.sublabels(f.members)
        nu_in = inner_report.nu_function[labels]
        i0, i1 = emb[f.members[0]], emb[f.members[1]]
        outer_flat = out_dec.flat_of_pair(i0, i1)
        nu_out = outer_report.nu_function[outer.sublabels(outer_flat.members)]
        ratios[labels] = nu_in / nu_out
        if set(outer_flat.members) <= image:
            values.append(ratios[labels])

    if values and (max(values) - min(values)) < max(tol, 1e-8) * abs(values[0]) * 10:
        common = float(np.mean(values))
    else:
        common = None
    return ExtensionReport(True, common, ratios)
