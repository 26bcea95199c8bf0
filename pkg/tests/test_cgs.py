from fractions import Fraction

import numpy as np
import pytest
from oracles import certified_real_empty, same_ideal_as_direct

from cgsik.algebra import (
    DegeneratePointError,
    ParametricPoly,
    Poly,
    RationalFunction,
    ResourceCaps,
    ResourceLimitExceeded,
    block,
    cgs,
    find_segment,
    lex,
    parse_poly,
    sample_segment_point,
    specialize,
)
from cgsik.iksolver.systems import build_parallel_special_system, build_vertical_system

AX = block(("x",), ("a",))


def test_invertible_coefficient_splits_in_two():
    X, A = Poly.gens(AX)
    segs = cgs([A * X - 1], ["a"], AX)
    assert len(segs) == 2
    generic = find_segment(segs, {"a": Fraction(3)})
    assert [str(g) for g in generic.specialize({"a": Fraction(3)})] == ["3*x - 1"]
    zero = find_segment(segs, {"a": Fraction(0)})
    assert zero.is_unit()


def test_specialize_rational_coefficient():
    ring = lex("x", "a", "b")
    pp = ParametricPoly.from_block(parse_poly("a*x", ring), ("x",))
    q = ParametricPoly(pp.order, pp.params, {(1,): RationalFunction(parse_poly("a", pp.params), parse_poly("b", pp.params))})
    assert str(specialize(q, {"a": Fraction(2), "b": Fraction(4)})) == "1/2*x"
    with pytest.raises(DegeneratePointError):
        specialize(q, {"a": Fraction(2), "b": Fraction(0)})


def test_rational_function_normal_form():
    r = lex("a", "b")
    f = RationalFunction(parse_poly("2*a^2 - 2*b^2", r), parse_poly("-4*a + 4*b", r))
    assert str(f) == "-1/2*a - 1/2*b"


def test_segment_constraints_use_parameters_only(template):
    for segs in template.segments.values():
        for seg in segs:
            split = seg.order.split
            for c in (*seg.equations, *seg.inequations):
                assert all(not any(e[:split]) for e in c.terms)


def test_cap_is_reported_not_swallowed(geom):
    fs = build_parallel_special_system(geom, parametric=True)
    with pytest.raises(ResourceLimitExceeded):
        cgs(fs, ("n1", "n2", "p1", "p2", "p3"), fs[0].order, caps=ResourceCaps(max_pairs=1))


def test_coplanar_system_cover_matches_direct_bases(geom):
    fs = build_parallel_special_system(geom, parametric=True)
    n1, n2 = Poly.var(fs[0].order, "n1"), Poly.var(fs[0].order, "n2")
    segs = cgs(fs, ("n1", "n2", "p1", "p2", "p3"), fs[0].order, equations=[n1 * n1 + n2 * n2 - 1])
    assert 1 <= len(segs) <= 12
    rng = np.random.default_rng(3)
    for seg in segs:
        for _ in range(15):
            pt = sample_segment_point(seg, rng)
            if pt is None:
                assert certified_real_empty(seg)
                break
            assert same_ideal_as_direct(seg, fs, pt)


def test_vertical_cover_is_complete_on_a_grid(geom):
    """Every parameter point of a coarse grid lands in exactly one segment."""
    fs = build_vertical_system(geom, 1, parametric=True)
    segs = cgs(fs, ("p1", "p2", "p3"), fs[0].order)
    vals = [Fraction(v) for v in (-65, -13, 0, 5, 65)]
    for a in vals:
        for b in vals:
            pt = {"p1": a, "p2": b, "p3": Fraction(7)}
            assert sum(seg.contains(pt) for seg in segs) == 1


def test_bundled_segments_agree_with_direct_bases(geom, template):
    from cgsik.iksolver.systems import build_nonparallel_special_system

    systems = {
        "parallel": build_parallel_special_system(geom, parametric=True),
        "nonparallel-n2": build_nonparallel_special_system(geom, parametric=True, n2_zero=False),
        "nonparallel-n2zero": build_nonparallel_special_system(geom, parametric=True, n2_zero=True),
        "vertical+": build_vertical_system(geom, 1, parametric=True),
    }
    rng = np.random.default_rng(11)
    for name, fs in systems.items():
        for seg in template.segments[name]:
            pts = [p for p in (sample_segment_point(seg, rng) for _ in range(5)) if p is not None]
            if not pts:
                assert certified_real_empty(seg), name
            for pt in pts:
                assert same_ideal_as_direct(seg, fs, pt), (name, pt)
