"""Projective-plane primitives and rigidity reconstruction scripts.

Points live in RP^2 as sign-normalized unit 3-vectors.  A reconstruction
script rebuilds a configuration projectively from four basis points by
repeated meets  target = line(l1, l2) ^ line(l3, l4),  optionally with one
branch step placing a point on a line via a prescribed cross-ratio that
satisfies a quadratic equation (two projectively inequivalent branches).

Script file grammar (one record per line, '#' comments allowed)::

    basis: L1 L2 L3 L4
    T = (A B) ^ (C D)
    branch: x^2-x-1 ; T on (P Q) at ratio (A B : T D)

Records execute in file order; every label on the right-hand side of a
record must already be defined when the record runs.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import (
    BranchRequired,
    CoincidentLines,
    DuplicatePoints,
    NotCollinear,
    ScriptFormatError,
    StepDegenerate,
)
from .tolerances import resolve


class ProjectivePoint:
    """A point of RP^2: nonzero 3-vector, unit norm, sign-normalized so the
    first coordinate of modulus > 1e-12 is positive."""

    __slots__ = ("coordinates",)

    def __init__(self, coordinates):
        v = np.array(coordinates, dtype=float).reshape(3)
        norm = np.linalg.norm(v)
        if norm == 0.0:
            raise ValueError("projective point needs a nonzero vector")
        v = v / norm
        for x in v:
            if abs(x) > 1e-12:
                if x < 0:
                    v = -v
                break
        v.setflags(write=False)
        self.coordinates = v

    def same_as(self, other, rtol=None):
        tol = max(resolve(rtol), 1e-12)
        d = abs(float(self.coordinates @ other.coordinates))
        return d > 1.0 - tol

    def angular_error(self, other):
        """sin of the angle between the two lines (sign-insensitive).

        Computed as the cross-product norm: sqrt(1 - dot^2) bottoms out at
        sqrt(machine epsilon) for nearly equal directions, the cross product
        stays accurate down to zero.
        """
        return float(
            np.linalg.norm(np.cross(self.coordinates, other.coordinates))
        )

    def __repr__(self):
        return f"ProjectivePoint({np.array2string(self.coordinates, precision=6)})"


def to_projective(config):
    """Projectivize every covector of a configuration, keyed by label."""
    return {
        label: ProjectivePoint(config.covector(i))
        for i, label in enumerate(config.labels)
    }


def _line(p, q, rtol):
    ell = np.cross(p.coordinates, q.coordinates)
    norm = np.linalg.norm(ell)
    if norm < max(resolve(rtol), 1e-12) * 10:
        raise CoincidentLines("points defining a line are proportional")
    return ell / norm


def meet(p1, p2, q1, q2, rtol=None):
    """Intersection of line(p1, p2) with line(q1, q2)."""
    l1 = _line(p1, p2, rtol)
    l2 = _line(q1, q2, rtol)
    point = np.cross(l1, l2)
    if np.linalg.norm(point) < max(resolve(rtol), 1e-12) * 10:
        raise CoincidentLines("the two lines coincide")
    return ProjectivePoint(point)


def _line_coordinates(points, rtol):
    """2-d homogeneous coordinates of collinear points in a basis of two of
    them; raises NotCollinear / DuplicatePoints as appropriate."""
    tol = max(resolve(rtol), 1e-12)
    for a, b in ((0, 1), (0, 2), (0, 3), (1, 2)):
        if points[a].angular_error(points[b]) > 1e-8:
            basis = np.column_stack(
                [points[a].coordinates, points[b].coordinates]
            )
            break
    else:
        raise DuplicatePoints("all points coincide")
    coords = []
    for p in points:
        c, res, *_ = np.linalg.lstsq(basis, p.coordinates, rcond=None)
        err = np.linalg.norm(basis @ c - p.coordinates)
        if err > max(tol * 1000, 1e-8):
            raise NotCollinear(f"point off the common line by {err:.2e}")
        coords.append(c)
    return coords


def cross_ratio(p1, p2, p3, p4, rtol=None):
    """Cross-ratio (p1, p2; p3, p4) of four collinear points.

    In affine line coordinates z the value is
    (z1 - z3)(z2 - z4) / ((z1 - z4)(z2 - z3)); computed here from 2-d
    homogeneous coordinates so points at infinity need no special casing.
    The result itself may be infinite (encoded as math.inf).
    """
    points = [p1, p2, p3, p4]
    for a in range(4):
        for b in range(a + 1, 4):
            if points[a].angular_error(points[b]) < 1e-12:
                raise DuplicatePoints(f"points {a + 1} and {b + 1} coincide")
    (x1, y1), (x2, y2), (x3, y3), (x4, y4) = _line_coordinates(points, rtol)
    num = (x1 * y3 - x3 * y1) * (x2 * y4 - x4 * y2)
    den = (x1 * y4 - x4 * y1) * (x2 * y3 - x3 * y2)
    if abs(den) < 1e-14 * max(1.0, abs(num)):
        return math.inf
    return float(num / den)


@dataclass(frozen=True)
class Step:
    target: str
    left: tuple  # two labels
    right: tuple  # two labels

    def __str__(self):
        return (
            f"{self.target} = ({self.left[0]} {self.left[1]})"
            f" ^ ({self.right[0]} {self.right[1]})"
        )


@dataclass(frozen=True)
class BranchStep:
    """Places ``target`` on line(line_pair) so that the cross-ratio of
    ``ratio_order`` (which contains target) equals a root of
    x^2 + p x + q = 0."""

    target: str
    line_pair: tuple
    ratio_order: tuple  # four labels, target among them
    p: float
    q: float

    def roots(self):
        disc = self.p * self.p - 4.0 * self.q
        if disc < 0:
            raise ValueError("branch equation has no real roots")
        s = math.sqrt(disc)
        return ((-self.p + s) / 2.0, (-self.p - s) / 2.0)

    def __str__(self):
        return (
            f"branch {self.target} on ({self.line_pair[0]} {self.line_pair[1]})"
        )


@dataclass(frozen=True)
class ReconstructionScript:
    basis_labels: tuple
    items: tuple  # Steps and at most one BranchStep, in execution order

    @property
    def steps(self):
        return tuple(s for s in self.items if isinstance(s, Step))

    @property
    def branch_step(self):
        for s in self.items:
            if isinstance(s, BranchStep):
                return s
        return None

    def validate(self):
        defined = set(self.basis_labels)
        for item in self.items:
            if isinstance(item, Step):
                sources = (*item.left, *item.right)
            else:
                sources = (
                    *item.line_pair,
                    *(l for l in item.ratio_order if l != item.target),
                )
            for label in sources:
                if label not in defined:
                    raise ScriptFormatError(
                        f"step '{item}' uses undefined label {label}"
                    )
            if item.target in defined:
                raise ScriptFormatError(f"label {item.target} defined twice")
            defined.add(item.target)
        return self


_STEP_RE = re.compile(
    r"^(\S+)\s*=\s*\(\s*(\S+)\s+(\S+)\s*\)\s*\^\s*\(\s*(\S+)\s+(\S+)\s*\)$"
)
_BRANCH_RE = re.compile(
    r"^branch:\s*(?P<eq>[^;]+);\s*(?P<target>\S+)\s+on\s+"
    r"\(\s*(?P<l1>\S+)\s+(?P<l2>\S+)\s*\)\s+at\s+ratio\s+"
    r"\(\s*(?P<a>\S+)\s+(?P<b>\S+)\s*:\s*(?P<c>\S+)\s+(?P<d>\S+)\s*\)$"
)
def _parse_quadratic(text):
    """Parse 'x^2 + p x + q' written like 'x^2-x-1'; returns (p, q)."""
    s = text.replace(" ", "")
    m = re.match(r"^x\^2(?:(?P<p>[+-](?:\d+(?:\.\d+)?)?)\*?x)?(?P<q>[+-]\d+(?:\.\d+)?)?$", s)
    if not m:
        raise ScriptFormatError(f"cannot parse quadratic '{text}'")
    p_txt = m.group("p")
    if p_txt is None:
        p = 0.0
    elif p_txt in ("+", "-"):
        p = float(p_txt + "1")
    else:
        p = float(p_txt)
    q = float(m.group("q") or 0.0)
    return p, q


def parse_script(text):
    """Parse the script grammar described in the module docstring."""
    basis = None
    items = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("basis:"):
            if basis is not None:
                raise ScriptFormatError(f"line {lineno}: duplicate basis record")
            basis = tuple(line[len("basis:"):].split())
            if len(basis) != 4:
                raise ScriptFormatError(f"line {lineno}: basis needs 4 labels")
            continue
        m = _BRANCH_RE.match(line)
        if m:
            p, q = _parse_quadratic(m.group("eq").strip())
            items.append(
                BranchStep(
                    m.group("target"),
                    (m.group("l1"), m.group("l2")),
                    (m.group("a"), m.group("b"), m.group("c"), m.group("d")),
                    p,
                    q,
                )
            )
            continue
        m = _STEP_RE.match(line)
        if m:
            items.append(
                Step(m.group(1), (m.group(2), m.group(3)), (m.group(4), m.group(5)))
            )
            continue
        raise ScriptFormatError(f"line {lineno}: cannot parse '{raw.strip()}'")
    if basis is None:
        raise ScriptFormatError("script has no basis record")
    return ReconstructionScript(basis, tuple(items)).validate()


def load_script(path):
    with open(path, "r", encoding="utf-8") as handle:
        return parse_script(handle.read())


def _place_by_ratio(step, env, branch_root, rtol):
    """Solve the branch step: point on line(P, Q) with prescribed ratio."""
    P = env[step.line_pair[0]]
    Q = env[step.line_pair[1]]
    basis = np.column_stack([P.coordinates, Q.coordinates])

    def coords(label):
        c, *_ = np.linalg.lstsq(basis, env[label].coordinates, rcond=None)
        return c

    a, b, c, d = step.ratio_order
    if c != step.target:
        raise ScriptFormatError(
            "branch ratio must carry the target in its third slot"
        )
    xa, ya = coords(a)
    xb, yb = coords(b)
    xd, yd = coords(d)
    x = branch_root
    # cross_ratio(a, b; target, d) = x with target = P + s*Q, i.e. (1, s):
    #   (xa*s - ya) * (xb*yd - xd*yb) = x * (xa*yd - xd*ya) * (xb*s - yb)
    k1 = xb * yd - xd * yb
    k2 = xa * yd - xd * ya
    denom = xa * k1 - x * k2 * xb
    if abs(denom) < 1e-14:
        raise StepDegenerate(str(step), "ratio equation degenerate")
    s = (ya * k1 - x * k2 * yb) / denom
    return ProjectivePoint(P.coordinates + s * Q.coordinates)


def run_reconstruction(script, basis_points, branch=None, rtol=None):
    """Execute a reconstruction script from four basis points.

    ``branch`` selects the root of the branch equation when one is present:
    "plus"/"minus" or an explicit numeric root.  Returns a dict label ->
    ProjectivePoint covering basis and all reconstructed points.
    """
    if len(basis_points) != 4:
        raise ValueError("need exactly 4 basis points")
    pts = [
        p if isinstance(p, ProjectivePoint) else ProjectivePoint(p)
        for p in basis_points
    ]
    for skip in range(4):
        triple = [p.coordinates for i, p in enumerate(pts) if i != skip]
        if abs(np.linalg.det(np.column_stack(triple))) < 1e-10:
            raise ValueError("basis points contain a collinear triple")

    env = dict(zip(script.basis_labels, pts))
    for item in script.items:
        if isinstance(item, Step):
            try:
                env[item.target] = meet(
                    env[item.left[0]],
                    env[item.left[1]],
                    env[item.right[0]],
                    env[item.right[1]],
                    rtol=rtol,
                )
            except CoincidentLines as exc:
                raise StepDegenerate(str(item), str(exc)) from exc
        else:
            if branch is None:
                raise BranchRequired(
                    f"script has branch equation x^2{item.p:+g}x{item.q:+g}; "
                    "choose a branch"
                )
            plus, minus = item.roots()
            if branch == "plus":
                root = plus
            elif branch == "minus":
                root = minus
            else:
                root = float(branch)
            env[item.target] = _place_by_ratio(item, env, root, rtol)
    return env
