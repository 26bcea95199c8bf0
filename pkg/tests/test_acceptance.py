"""End-to-end acceptance checks at full size.

Each test reports one PASS/FAIL line (collected in the terminal summary)
before asserting.  The round-trip run is shared by criteria 1 to 3.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from cgsik.algebra import (
    Poly,
    ResourceCaps,
    ResourceLimitExceeded,
    buchberger,
    grevlex,
    is_groebner,
    isolate_real_roots,
    lex,
    normal_form,
    sample_segment_point,
    sturm_count,
)
from cgsik.bench import run_random_pose, run_roundtrip, sample_random_joints
from cgsik.iksolver import SolverOptions, build_nonparallel_special_system, build_parallel_special_system, solve_ik
from cgsik.iksolver.template import SolverTemplate
from cgsik.kinematics import forward_kinematics

from oracles import approach, certified_real_empty, horizontal_q, random_q, same_ideal_as_direct

pytestmark = pytest.mark.slow

TEMPLATE = SolverOptions(mode="template")
SINCOS = SolverOptions(mode="groebner-sincos")
DIRECT = SolverOptions(mode="direct")
GB_CAPS = ResourceCaps(max_pairs=3000, max_degree=24, max_seconds=10.0)


@pytest.fixture(scope="module")
def roundtrip(geom, template):
    return run_roundtrip(geom, template, 10, 1000, mode="template", seed=2024, timer=None)


def test_round_trip_success(roundtrip, criterion):
    rate = roundtrip.success_rate
    per_test = [r.success for r in roundtrip.rows]
    ok = criterion(1, rate >= 0.99, f"round-trip success {rate:.4f} (>= 0.99); per test {per_test}")
    assert ok


def test_solution_multiplicity(roundtrip, criterion):
    avg = roundtrip.avg_solutions
    ok = criterion(2, 5.0 <= avg <= 7.0, f"average solutions {avg:.4f} (in [5, 7])")
    assert ok


def test_error_distribution(roundtrip, criterion):
    frac = roundtrip.error_fraction(1e-6)
    ok = criterion(3, frac >= 0.90, f"share with E < 1e-6: {frac:.4f} (>= 0.90)")
    assert ok


def test_template_speedup(geom, template, criterion):
    assert template.fallbacks() == [], "bundled template should be complete"
    direct = SolverTemplate.direct(geom)
    rng = np.random.default_rng(404)
    poses = [forward_kinematics(geom, random_q(geom, rng)) for _ in range(1000)]
    for pose in poses[:10]:
        solve_ik(template, geom, pose, TEMPLATE)
        solve_ik(direct, geom, pose, SINCOS)

    def mean_time(tpl, opts):
        t0 = time.perf_counter()
        for pose in poses:
            solve_ik(tpl, geom, pose, opts)
        return (time.perf_counter() - t0) / len(poses)

    fast = mean_time(template, TEMPLATE)
    slow = mean_time(direct, SINCOS)
    ratio = slow / fast
    ok = criterion(4, ratio >= 2.0, f"template {fast * 1e3:.2f} ms vs per-solve basis {slow * 1e3:.2f} ms: "
                                    f"{ratio:.2f}x (>= 2x)")
    assert ok


def test_random_pose_reachability(geom, template, criterion):
    rep = run_random_pose(geom, template, 10, 1000, rng_seed=2024, timer=None)
    frac = rep.success_rate
    ok = criterion(5, 0.25 <= frac <= 0.50, f"random-pose success {frac:.4f} (in [0.25, 0.50])")
    assert ok


# -- criterion 6: algebra properties


def _random_system(rng, ring):
    """One to three generators, each with up to three terms of total degree <= 2."""
    out = []
    for _ in range(int(rng.integers(1, 4))):
        terms = {}
        for _ in range(int(rng.integers(1, 4))):
            e = tuple(int(v) for v in rng.integers(0, 3, size=3))
            if sum(e) <= 2:
                terms[e] = Fraction(int(rng.choice([-3, -2, -1, 1, 2, 3])))
        if terms:
            out.append(Poly(ring, terms))
    return out


def _factor_product(rng):
    """An integer polynomial with a known number of distinct real roots."""
    roots = sorted({Fraction(int(rng.integers(-20, 21)), int(rng.integers(1, 6))) for _ in range(int(rng.integers(0, 6)))})
    p = [Fraction(1)]

    def mul(p, q):
        out = [Fraction(0)] * (len(p) + len(q) - 1)
        for i, a in enumerate(p):
            for j, b in enumerate(q):
                out[i + j] += a * b
        return out

    for r in roots:  # at most five roots, each once or twice
        for _ in range(int(rng.integers(1, 3))):
            p = mul(p, [-r, Fraction(1)])
    while len(p) <= 11 and rng.uniform() < 0.5:  # keeps the degree <= 12
        p = mul(p, [Fraction(int(rng.integers(1, 30))), Fraction(0), Fraction(1)])  # x^2 + c, no real root
    den = math.lcm(*(c.denominator for c in p))
    return [int(c * den) for c in p], len(roots)


def test_algebra_properties(geom, template, criterion):
    rng = np.random.default_rng(6)
    orders = (lex("x", "y", "z"), grevlex("x", "y", "z"))
    other = lex("z", "y", "x")
    gb_ok = gb_total = capped = 0
    while gb_total < 200:
        gens = _random_system(rng, orders[gb_total % 2])
        if not gens:
            continue
        try:
            G = buchberger(gens, caps=GB_CAPS)
            H = buchberger([g.reorder(other) for g in gens], caps=GB_CAPS)
        except ResourceLimitExceeded:
            capped += 1
            continue
        gb_total += 1
        basis = list(G)
        gb_ok += (is_groebner(basis)
                  and all(normal_form(f, basis).is_zero() for f in gens)
                  and all(H.contains(g.reorder(other)) for g in basis)
                  and all(G.contains(h.reorder(G.order)) for h in H))

    systems = {
        "parallel": build_parallel_special_system(geom, parametric=True),
        "nonparallel-n2": build_nonparallel_special_system(geom, parametric=True, n2_zero=False),
        "nonparallel-n2zero": build_nonparallel_special_system(geom, parametric=True, n2_zero=True),
    }
    seg_notes = []
    cgs_ok = True
    for name, fs in systems.items():
        for i, seg in enumerate(template.segments[name]):
            checked = tries = 0
            while checked < 100 and tries < 400:
                tries += 1
                pt = sample_segment_point(seg, rng)
                if pt is None:
                    continue
                checked += 1
                cgs_ok &= same_ideal_as_direct(seg, fs, pt)
            if checked < 100:
                empty = certified_real_empty(seg)
                cgs_ok &= empty
                seg_notes.append(f"{name}[{i}] {'certified empty' if empty else f'only {checked} points'}")

    sturm_ok = 0
    for _ in range(500):
        coeffs, expected = _factor_product(rng)
        if len(coeffs) == 1:
            coeffs, expected = [1, 1], 1  # a constant has nothing to count; use x + 1
        got = isolate_real_roots(coeffs)
        sturm_ok += len(got) == sturm_count(coeffs) == expected

    passed = gb_ok == gb_total and cgs_ok and sturm_ok == 500
    detail = (f"Groebner {gb_ok}/{gb_total} ({capped} redrawn at the cap); CGS specialization over 100 points per segment "
              f"{'ok' if cgs_ok else 'MISMATCH'}{' (' + '; '.join(seg_notes) + ')' if seg_notes else ''}; "
              f"root counts {sturm_ok}/500")
    assert criterion(6, passed, detail)


# -- criterion 7: each solver branch


def _base_aligned(geom, q):
    """Rotate the base so the horizontal approach becomes exactly +x (n2 = 0)."""
    n = approach(geom, q)
    q = np.array(q)
    q[0] -= math.atan2(n[1], n[0])
    return q


def test_branch_coverage(geom, template, criterion):
    rng = np.random.default_rng(77)
    tally = {}

    def record(name, ok):
        good, total = tally.get(name, (0, 0))
        tally[name] = (good + bool(ok), total + 1)

    for _ in range(20):
        q = random_q(geom, rng)
        sols = solve_ik(template, geom, forward_kinematics(geom, q), TEMPLATE)
        record("generic", sols.contains(q, 1e-6) and {c.branch.system for c in sols} == {"generic"})

        q = horizontal_q(geom, random_q(geom, rng), 3)
        sols = solve_ik(template, geom, forward_kinematics(geom, q), TEMPLATE)
        hit = [c for c in sols if c.branch.case == "coplanar" and c.branch.system == "parallel"]
        record("coplanar", sols.contains(q, 1e-6) and hit and hit[0].branch.path == "template:parallel")

        # joint 5 at +-90 degrees: the non-coplanar systems, with and without n2
        for name, q in (("non-coplanar n2 != 0", horizontal_q(geom, random_q(geom, rng), 4)),
                        ("non-coplanar n2 == 0", _base_aligned(geom, horizontal_q(geom, random_q(geom, rng), 4)))):
            pose = forward_kinematics(geom, q)
            sols = solve_ik(template, geom, pose, TEMPLATE)
            want = "circle-sample:n2zero" if name.endswith("== 0") else "circle-sample:n2"
            hit = [c for c in sols if c.branch.system == "nonparallel" and c.branch.path == want]
            record(name, hit and all(c.residual.position_mm < 0.1 for c in sols) and "self-motion" in sols.flags)

    passed = all(good == total for good, total in tally.values()) and len(tally) == 4
    detail = "; ".join(f"{k} {g}/{t}" for k, (g, t) in tally.items())
    assert criterion(7, passed, detail)


def test_mode_equivalence(geom, criterion):
    direct = SolverTemplate.direct(geom)
    same = 0
    for k in range(100):
        q = sample_random_joints(geom, [8, k])
        pose = forward_kinematics(geom, q)
        a = solve_ik(direct, geom, pose, DIRECT)
        b = solve_ik(direct, geom, pose, SINCOS)
        same += len(a) == len(b) and len(a) > 0 and all(b.contains(t, 1e-6) for t in a.thetas) \
            and all(a.contains(t, 1e-6) for t in b.thetas)
    assert criterion(8, same == 100, f"closed form and sine/cosine basis agree on {same}/100 poses")
