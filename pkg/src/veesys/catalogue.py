"""Catalogue of the 17 known rank-3 systems with oracle data and relations.

All data (matrices as expression strings, expected Gram matrices, flat
lists, nu-values, extension/degeneration relations) lives in the shipped
``data/catalogue.yaml`` file; this module loads it, constructs
configurations at given parameters, and verifies entries and relations
against the stored oracles.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

import numpy as np
import yaml

from . import matroid
from .core import CovectorConfiguration, canonical_form
from .errors import InadmissibleParameters, VeesysError
from .expressions import evaluate
from .tolerances import resolve
from .verify import check_extension, check_vee, nu_trace

ORACLE_RTOL = 1e-8  # relative tolerance for gram/nu comparisons against oracles


class CatalogueDataError(VeesysError):
    pass


@dataclass(frozen=True)
class CatalogueEntry:
    id: str
    name: str
    parameters: tuple
    admissible: str  # boolean expression in the parameters ("True" if free)
    default_grid: tuple  # parameter dicts
    constants: dict  # name -> expression (may use parameters)
    matrix: tuple  # r rows of n expression strings
    gram: tuple  # r rows of r expression strings
    flats: tuple  # records {"members": [labels], "nu": expression or None}
    notes: tuple = ()

    @property
    def n(self):
        return len(self.matrix[0])

    def names(self, params):
        values = dict(params)
        for key, expr in self.constants.items():
            values[key] = evaluate(expr, values)
        return values

    def check_admissible(self, params):
        missing = [p for p in self.parameters if p not in params]
        if missing:
            raise InadmissibleParameters(self.id, f"missing parameters {missing}", params)
        if not evaluate(self.admissible, dict(params)):
            raise InadmissibleParameters(self.id, self.admissible, params)

    def matrix_at(self, params, check=True):
        if check:
            self.check_admissible(params)
        names = self.names(params)
        return np.array(
            [[evaluate(e, names) for e in row] for row in self.matrix]
        )

    def gram_at(self, params):
        names = self.names(params)
        return np.array([[evaluate(e, names) for e in row] for row in self.gram])

    def flat_label_sets(self):
        return set(frozenset(str(m) for m in f["members"]) for f in self.flats)

    def nu_by_members(self, params):
        names = self.names(params)
        return {
            tuple(str(m) for m in f["members"]): evaluate(f["nu"], names)
            for f in self.flats
            if f.get("nu") is not None
        }


@dataclass(frozen=True)
class RelationEntry:
    kind: str  # "extension" | "degeneration"
    description: str
    source: str
    source_params: dict
    target: str
    target_params: dict
    covectors: tuple  # added (extension) or vanishing (degeneration) labels
    printed_covectors: tuple  # as published, when it differs
    path: dict = None  # degenerations: parameter expressions in eps
    scale: str = "1"  # overall factor applied along the path
    exact_limit: bool = False
    flagged: bool = False
    note: str = ""
    nu_ratio: float = None  # expected common nu-ratio, when published


@dataclass
class CheckReport:
    subject: str
    passed: bool
    failures: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    details: dict = field(default_factory=dict)


def _data_text():
    return (
        resources.files("veesys").joinpath("data/catalogue.yaml").read_text("utf-8")
    )


def data_checksum(text=None):
    """Checksum of the catalogue data with its own checksum line blanked."""
    text = text if text is not None else _data_text()
    body = "\n".join(
        line for line in text.splitlines() if not line.startswith("checksum:")
    )
    return hashlib.sha256(body.encode("utf-8")).hexdigest()


@lru_cache(maxsize=1)
def _load():
    text = _data_text()
    data = yaml.safe_load(text)
    if data.get("format") != "veesys-catalogue/1":
        raise CatalogueDataError(f"unsupported data format {data.get('format')!r}")
    recorded = data.get("checksum")
    actual = data_checksum(text)
    if recorded != actual:
        raise CatalogueDataError(
            f"catalogue data checksum mismatch: recorded {recorded}, actual {actual}"
        )

    entries = {}
    for raw in data["entries"]:
        entry = CatalogueEntry(
            id=raw["id"],
            name=raw.get("name", raw["id"]),
            parameters=tuple(raw.get("parameters", ())),
            admissible=str(raw.get("admissible", "True")),
            default_grid=tuple(raw.get("default_grid", ({},))),
            constants=dict(raw.get("constants", {})),
            matrix=tuple(tuple(row) for row in raw["matrix"]),
            gram=tuple(tuple(row) for row in raw["gram"]),
            flats=tuple(raw["flats"]),
            notes=tuple(raw.get("notes", ())),
        )
        entries[entry.id] = entry

    auxiliary = {}
    for raw in data.get("auxiliary", []):
        auxiliary[raw["id"]] = np.array(raw["matrix"], dtype=float)

    relations = []
    for raw in data.get("relations", []):
        relations.append(
            RelationEntry(
                kind=raw["kind"],
                description=raw["description"],
                source=raw["source"],
                source_params=dict(raw.get("source_params", {})),
                target=raw["target"],
                target_params=dict(raw.get("target_params", {})),
                covectors=tuple(str(c) for c in raw["covectors"]),
                printed_covectors=tuple(
                    str(c) for c in raw.get("printed_covectors", raw["covectors"])
                ),
                path={k: str(v) for k, v in raw.get("path", {}).items()} or None,
                scale=str(raw.get("scale", "1")),
                exact_limit=bool(raw.get("exact_limit", False)),
                flagged=bool(raw.get("flagged", False)),
                note=raw.get("note", ""),
                nu_ratio=raw.get("nu_ratio"),
            )
        )
    return entries, auxiliary, relations


def ids():
    return list(_load()[0])


def entry(entry_id):
    entries = _load()[0]
    if entry_id not in entries:
        raise KeyError(f"unknown catalogue id {entry_id!r}; known: {sorted(entries)}")
    return entries[entry_id]


def relations(kind=None):
    rels = _load()[2]
    return [r for r in rels if kind is None or r.kind == kind]


def auxiliary_configuration(aux_id):
    aux = _load()[1]
    if aux_id not in aux:
        raise KeyError(f"unknown auxiliary configuration {aux_id!r}")
    return CovectorConfiguration(aux[aux_id])


def construct(entry_id, params=None):
    """Build the configuration of a catalogue entry at given parameters."""
    ent = entry(entry_id)
    params = dict(params or {})
    return CovectorConfiguration(ent.matrix_at(params))


def verify_entry(entry_id, params=None, rtol=None):
    """Verify one entry against its stored oracle data.

    Checks: plane conditions pass; Gram matrix matches (relative 1e-8 on the
    largest entry); flat lists match exactly as label sets; nu-values match
    the stored formulas (relative 1e-8); trace formula agrees with the
    least-squares proportionality factor.
    """
    ent = entry(entry_id)
    params = dict(params or {})
    report = CheckReport(subject=f"{entry_id} {params}" if params else entry_id,
                         passed=True)
    report.notes.extend(ent.notes)
    try:
        config = construct(entry_id, params)
    except Exception as exc:
        report.passed = False
        report.failures.append(f"construction failed: {exc}")
        return report

    form = canonical_form(config)
    expected_gram = ent.gram_at(params)
    scale = np.abs(expected_gram).max()
    gram_err = np.abs(form.gram - expected_gram).max() / scale
    report.details["gramError"] = float(gram_err)
    if gram_err > ORACLE_RTOL:
        report.passed = False
        report.failures.append(f"gram mismatch, relative error {gram_err:.3e}")

    vee = check_vee(config, rtol=rtol)
    report.details["maxResidual"] = vee.max_residual
    if not vee.is_vee_system:
        report.passed = False
        report.failures.append(
            f"plane conditions fail, max residual {vee.max_residual:.3e}"
        )

    computed_flats = set(
        frozenset(config.labels[i] for i in f.members)
        for f in vee.decomposition.flats
    )
    oracle_flats = ent.flat_label_sets()
    if computed_flats != oracle_flats:
        report.passed = False
        missing = [sorted(s, key=int) for s in oracle_flats - computed_flats]
        extra = [sorted(s, key=int) for s in computed_flats - oracle_flats]
        report.failures.append(f"flat lists differ: missing {missing}, extra {extra}")

    oracle_nu = ent.nu_by_members(params)
    for members, expected in oracle_nu.items():
        got = vee.nu_function.get(tuple(sorted(members, key=int)))
        # nu_function keys are sorted member tuples; oracle keys keep print order
        if got is None:
            continue  # flat mismatch already reported
        if abs(got - expected) > ORACLE_RTOL * max(1.0, abs(expected)):
            report.passed = False
            report.failures.append(
                f"nu mismatch on flat {members}: computed {got!r}, oracle {expected!r}"
            )
    report.details["nuValues"] = {
        "/".join(k): v for k, v in sorted(vee.nu_function.items())
    }
    return report


def _fingerprints_match(config_a, config_b):
    fa = matroid.fingerprint(matroid.decompose(config_a))
    fb = matroid.fingerprint(matroid.decompose(config_b))
    return (
        fa.flat_size_multiset == fb.flat_size_multiset
        and fa.canonical_profile == fb.canonical_profile
    )


def _verify_extension(rel, rtol):
    report = CheckReport(subject=rel.description, passed=True)
    if rel.note:
        report.notes.append(rel.note)
    outer = construct(rel.target, rel.target_params)
    added = set(rel.covectors)
    unknown = added - set(outer.labels)
    if unknown:
        report.passed = False
        report.failures.append(f"added labels {sorted(unknown)} not in {rel.target}")
        return report
    inner_indices = [i for i, lab in enumerate(outer.labels) if lab not in added]
    inner = outer.take(inner_indices)

    ext = check_extension(inner, outer, inner_indices, rtol=rtol)
    report.details["nuRatio"] = ext.nu_ratio
    report.details["perFlatRatios"] = {
        "/".join(k): v for k, v in sorted(ext.per_flat_ratios.items())
    }
    if not ext.is_extension:
        report.passed = False
        report.failures.append("inner covectors not proportional to outer images")
    if ext.nu_ratio is None:
        report.passed = False
        report.failures.append(
            f"nu-ratios not common: {sorted(set(round(v, 6) for v in ext.per_flat_ratios.values()))}"
        )
    elif rel.nu_ratio is not None and abs(ext.nu_ratio - rel.nu_ratio) > 1e-8 * rel.nu_ratio:
        report.passed = False
        report.failures.append(
            f"nu-ratio {ext.nu_ratio!r} differs from published {rel.nu_ratio!r}"
        )

    reference = construct(rel.source, rel.source_params)
    if reference.n != inner.n:
        report.passed = False
        report.failures.append(
            f"sub-configuration has {inner.n} covectors, {rel.source} has {reference.n}"
        )
    else:
        verdict = matroid.same_matroid(
            matroid.decompose(inner), matroid.decompose(reference)
        )
        report.details["matroidVerdict"] = verdict
        if verdict == matroid.NO:
            report.passed = False
            report.failures.append(
                f"sub-configuration matroid differs from {rel.source}"
            )
    inner_vee = check_vee(inner, rtol=rtol)
    if not inner_vee.is_vee_system:
        report.passed = False
        report.failures.append(
            f"sub-configuration fails plane conditions ({inner_vee.max_residual:.3e})"
        )
    return report


def _source_at(rel, eps):
    params = {k: evaluate(v, {"eps": eps}) for k, v in rel.path.items()}
    ent = entry(rel.source)
    return evaluate(rel.scale, {"eps": eps}) * ent.matrix_at(params, check=False)


def _verify_degeneration(rel, rtol, epsilons=(1e-3, 1e-4)):
    report = CheckReport(subject=rel.description, passed=True)
    if rel.note:
        report.notes.append(rel.note)
    if tuple(rel.printed_covectors) != tuple(rel.covectors):
        report.notes.append(
            f"published vanishing set {sorted(rel.printed_covectors, key=int)} "
            f"corrected to {sorted(rel.covectors, key=int)}"
        )
    ent = entry(rel.source)
    labels = tuple(str(i + 1) for i in range(ent.n))
    vanish_idx = [labels.index(c) for c in rel.covectors]
    survive_idx = [i for i in range(ent.n) if labels[i] not in rel.covectors]
    target = construct(rel.target, rel.target_params)
    target_vee = check_vee(target, rtol=rtol)
    target_nus = sorted(target_vee.nu_function.values())

    # finite-offset checks: vanishing-norm decay and survivor residual decay
    decay_norms = []
    residuals = []
    nu_errors = []
    for eps in sorted(epsilons, reverse=True):
        A = _source_at(rel, eps)
        norms = np.linalg.norm(A, axis=0)
        rel_norms = norms / norms.max()
        decay_norms.append(rel_norms[vanish_idx].max())
        survivors = CovectorConfiguration(A[:, survive_idx],
                                          tuple(labels[i] for i in survive_idx))
        vee = check_vee(survivors, rtol=rtol)
        residuals.append(vee.max_residual)
        if not _fingerprints_match(survivors, target):
            report.passed = False
            report.failures.append(
                f"survivor matroid at eps={eps} differs from {rel.target}"
            )
        nus = sorted(vee.nu_function.values())
        if len(nus) == len(target_nus):
            nu_errors.append(max(abs(a - b) for a, b in zip(nus, target_nus)))
        else:
            report.passed = False
            report.failures.append("survivor flat structure differs from target")

    ratio = math.log(decay_norms[0] / decay_norms[1]) / math.log(
        max(epsilons) / min(epsilons)
    )
    report.details["vanishingNormExponent"] = ratio
    report.details["survivorResiduals"] = residuals
    report.details["nuErrors"] = nu_errors
    if ratio < 0.45:
        report.passed = False
        report.failures.append(f"vanishing norms decay too slowly (exponent {ratio:.3f})")
    if residuals[1] > 1e-2 or not (
        residuals[1] < 1e-9 or residuals[1] < residuals[0] / 3
    ):
        report.passed = False
        report.failures.append(
            f"survivor residuals do not vanish in the limit: {residuals}"
        )
    if nu_errors and nu_errors[-1] > 1e-6 and not rel.exact_limit:
        report.passed = False
        report.failures.append(f"nu-values do not approach target: {nu_errors}")

    # exact limit, when the path reaches it inside the parameter domain
    if rel.exact_limit:
        A = _source_at(rel, 0.0)
        survivors = CovectorConfiguration(A[:, survive_idx],
                                          tuple(labels[i] for i in survive_idx))
        vanished = np.linalg.norm(A[:, vanish_idx], axis=0).max()
        # sqrt-type paths leave O(sqrt(machine eps)) at the float limit point
        if vanished > 1e-7 * np.linalg.norm(A):
            report.passed = False
            report.failures.append(
                f"covectors {rel.covectors} do not vanish at the limit"
            )
        vee = check_vee(survivors, rtol=rtol)
        report.details["limitResidual"] = vee.max_residual
        if not vee.is_vee_system:
            report.passed = False
            report.failures.append(
                f"limit configuration fails plane conditions ({vee.max_residual:.3e})"
            )
        if not _fingerprints_match(survivors, target):
            report.passed = False
            report.failures.append(f"limit matroid differs from {rel.target}")
        nus = sorted(vee.nu_function.values())
        if len(nus) != len(target_nus) or any(
            abs(a - b) > ORACLE_RTOL for a, b in zip(nus, target_nus)
        ):
            report.passed = False
            report.failures.append(
                f"limit nu-values {nus} differ from target {target_nus}"
            )
    return report


def verify_relation(rel, rtol=None):
    """Verify one extension/degeneration relation; returns a CheckReport."""
    tol = resolve(rtol)
    if rel.kind == "extension":
        return _verify_extension(rel, tol)
    if rel.kind == "degeneration":
        return _verify_degeneration(rel, tol)
    raise ValueError(f"unknown relation kind {rel.kind!r}")


# Shipped reconstruction scripts: script name -> (config source, basis labels).
# "entry:ID" constructs a catalogue entry (isolated ones need no parameters);
# "aux:ID" loads an auxiliary reference configuration.
SCRIPT_REFERENCES = {
    "a3": ("entry:A3", {"c1": 1, "c2": 1, "c3": 1}, ("1", "2", "5", "6")),
    "b3": ("aux:B3-roots", {}, ("1", "2", "3", "4")),
    "h3": ("entry:H3", {}, ("4", "5", "6", "7")),
    "h4a1": ("entry:H4A1", {}, ("6", "25", "27", "30")),
}


def script_reference(name):
    """The reference configuration and basis labels for a shipped script."""
    source, params, basis = SCRIPT_REFERENCES[name]
    kind, _, ident = source.partition(":")
    if kind == "entry":
        config = construct(ident, params)
    else:
        config = auxiliary_configuration(ident)
    return config, basis


def script_path(name):
    return resources.files("veesys").joinpath(f"data/scripts/{name}.script")
