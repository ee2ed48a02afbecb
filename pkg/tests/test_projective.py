import math

import numpy as np
import pytest

from veesys import (
    ProjectivePoint,
    catalogue,
    cross_ratio,
    decompose,
    load_script,
    meet,
    parse_script,
    run_reconstruction,
    same_matroid,
    to_projective,
)
from veesys import CovectorConfiguration, matroid
from veesys.errors import (
    BranchRequired,
    CoincidentLines,
    DuplicatePoints,
    NotCollinear,
    ScriptFormatError,
)


def _affine(z):
    return ProjectivePoint([z, 1.0, 0.0])


def test_cross_ratio_affine_oracle():
    assert cross_ratio(*map(_affine, (0, 1, 2, 3))) == pytest.approx(4 / 3)


def test_cross_ratio_harmonic_oracle():
    value = cross_ratio(
        _affine(1), _affine(-1), _affine(0), ProjectivePoint([1, 0, 0])
    )
    assert value == pytest.approx(-1.0)


def test_cross_ratio_swap_last_pair_inverts():
    value = cross_ratio(*map(_affine, (0, 1, 2, 3)))
    swapped = cross_ratio(*map(_affine, (0, 1, 3, 2)))
    assert value * swapped == pytest.approx(1.0)


def test_cross_ratio_rejects_bad_input():
    with pytest.raises(DuplicatePoints):
        cross_ratio(_affine(0), _affine(0), _affine(1), _affine(2))
    with pytest.raises(NotCollinear):
        cross_ratio(
            _affine(0), _affine(1), _affine(2), ProjectivePoint([0, 0, 1])
        )


def test_meet_basic():
    p = meet(
        ProjectivePoint([0, 0, 1]),
        ProjectivePoint([1, 0, 1]),  # the line y = 0
        ProjectivePoint([0, 0, 1]),
        ProjectivePoint([0, 1, 1]),  # the line x = 0
    )
    assert p.angular_error(ProjectivePoint([0, 0, 1])) < 1e-14


def test_meet_rejects_coincident_lines():
    with pytest.raises(CoincidentLines):
        meet(_affine(0), _affine(1), _affine(2), _affine(3))


def test_projective_point_normalization():
    p = ProjectivePoint([-2.0, 4.0, 0.0])
    assert p.coordinates[0] > 0
    assert np.linalg.norm(p.coordinates) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        ProjectivePoint([0, 0, 0])


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("5 = (1 2) ^ (3 4)", "no basis"),
        ("basis: 1 2 3\n", "4 labels"),
        ("basis: 1 2 3 4\nbasis: 1 2 3 4\n", "duplicate basis"),
        ("basis: 1 2 3 4\n5 = (1 9) ^ (2 3)", "undefined label 9"),
        ("basis: 1 2 3 4\n1 = (2 3) ^ (2 4)", "defined twice"),
        ("basis: 1 2 3 4\n5 = meet(1 2, 3 4)", "cannot parse"),
        ("basis: 1 2 3 4\nbranch: x^3-1 ; 5 on (1 2) at ratio (1 2 : 5 3)",
         "quadratic"),
    ],
)
def test_script_parse_errors(text, fragment):
    with pytest.raises(ScriptFormatError) as info:
        parse_script(text)
    assert fragment in str(info.value)


def test_script_comments_and_roots():
    script = parse_script(
        "# comment\nbasis: a b c d\n"
        "branch: x^2-x-1 ; e on (a b) at ratio (a b : e c)\n"
    )
    plus, minus = script.branch_step.roots()
    assert plus == pytest.approx((1 + math.sqrt(5)) / 2)
    assert minus == pytest.approx((1 - math.sqrt(5)) / 2)


def test_branch_required():
    script = load_script(catalogue.script_path("h3"))
    config, basis = catalogue.script_reference("h3")
    proj = to_projective(config)
    with pytest.raises(BranchRequired):
        run_reconstruction(script, [proj[l] for l in basis])


def test_basis_must_be_in_general_position():
    script = load_script(catalogue.script_path("b3"))
    pts = [_affine(z) for z in (0, 1, 2)] + [ProjectivePoint([0, 0, 1])]
    with pytest.raises(ValueError, match="collinear"):
        run_reconstruction(script, pts)


@pytest.mark.parametrize("name", ["a3", "b3"])
def test_reconstruction_exact(name):
    config, basis = catalogue.script_reference(name)
    script = load_script(catalogue.script_path(name))
    proj = to_projective(config)
    env = run_reconstruction(script, [proj[l] for l in basis])
    for label in config.labels:
        assert env[label].angular_error(proj[label]) < 1e-12


def test_h3_two_branches_same_matroid():
    config, basis = catalogue.script_reference("h3")
    script = load_script(catalogue.script_path("h3"))
    proj = to_projective(config)
    decomps = []
    for branch in ("plus", "minus"):
        env = run_reconstruction(script, [proj[l] for l in basis], branch=branch)
        points = np.column_stack(
            [env[l].coordinates for l in config.labels]
        )
        decomps.append(decompose(CovectorConfiguration(points, config.labels)))
    assert same_matroid(*decomps) == matroid.YES
    # the minus branch is the catalogue realisation
    env = run_reconstruction(script, [proj[l] for l in basis], branch="minus")
    assert max(env[l].angular_error(proj[l]) for l in config.labels) < 1e-12


def test_reconstruction_accepts_numeric_branch():
    config, basis = catalogue.script_reference("h3")
    script = load_script(catalogue.script_path("h3"))
    proj = to_projective(config)
    root = (1 - math.sqrt(5)) / 2
    env = run_reconstruction(script, [proj[l] for l in basis], branch=root)
    assert env["9"].angular_error(proj["9"]) < 1e-12
