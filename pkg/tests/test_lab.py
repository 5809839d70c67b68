from fractions import Fraction

import pytest

from hyperball.errors import SizeCapExceeded
from hyperball.lab import (
    BoxUnion,
    CenterNotInA,
    DimTooSmall,
    FiniteBallFamily,
    LinfBallFamily,
    NotAdmissible,
    check_admissible,
    external_witness,
    four_to_n_consistency,
    graph_n_helly_bruteforce,
    helly_counterexample,
    helly_order_check,
    hyperconvex_witness,
    pad_family,
    refute_search,
    uniform_local_external_sample,
    verify_refutation,
    weakly_external_witness,
)
from hyperball.linf import Ball, Box, linf_dist
from hyperball.lp import box_to_polyhedron, halfspace, lp_feasible
from hyperball.metric import GraphInstance, graph_metric
from hyperball.sets import FiniteSubset

from conftest import F, pt

UNION = BoxUnion((Box(pt(0, 0), pt(1, 1)), Box(pt(3, 0), pt(4, 1))))
DIAG = halfspace([1, 1], -1)


def test_admissible_examples():
    fam = LinfBallFamily((Ball(pt(0, 0), F(2)), Ball(pt(4, 0), F(2))))
    assert check_admissible(fam)
    bad = LinfBallFamily((Ball(pt(0, 0), F(1)), Ball(pt(4, 0), F(2))))
    result = check_admissible(bad)
    assert not result and result.kind == "pairwise" and result.indices == (0, 1)


def test_admissible_external_violation():
    fam = LinfBallFamily((Ball(pt(1, -1), F(1, 4)),), DIAG)
    result = check_admissible(fam)
    assert not result and result.kind == "external"  # d(x, A) = 1/2 > 1/4


def test_hyperconvex_witness_linf():
    fam = LinfBallFamily((Ball(pt(0, 0), F(2)), Ball(pt(4, 0), F(2))))
    result = hyperconvex_witness(fam)
    assert result.feasible and result.witness == pt(2, -2)
    single = LinfBallFamily((Ball(pt(3, 5), F(0)),))
    assert hyperconvex_witness(single).witness == pt(3, 5)


def test_hyperconvex_witness_requires_admissibility():
    fam = LinfBallFamily((Ball(pt(0, 0), F(1)), Ball(pt(4, 0), F(2))))
    with pytest.raises(NotAdmissible):
        hyperconvex_witness(fam)


def test_hyperconvex_witness_never_empty_on_linf_backend():
    from hyperball.rng import SplitMix64

    for seed in range(300):
        rng = SplitMix64(seed)
        dim = rng.randint(1, 4)
        anchor = tuple(Fraction(rng.randint(-8, 8), 2) for _ in range(dim))
        balls = []
        for _ in range(rng.randint(1, 5)):
            c = tuple(Fraction(rng.randint(-16, 16), 2) for _ in range(dim))
            balls.append(Ball(c, linf_dist(c, anchor) + Fraction(rng.randint(0, 4), 4)))
        result = hyperconvex_witness(LinfBallFamily(tuple(balls)))
        assert result.feasible


def test_finite_backend_witness(c5):
    fam = FiniteBallFamily(c5, ((0, F(1)), (2, F(1))))
    result = hyperconvex_witness(fam)
    assert result.feasible and result.witness == 1


def test_external_witness_box_always_found():
    from hyperball.rng import SplitMix64

    box = Box(pt(0, 0), pt(1, 1))
    for seed in range(200):
        rng = SplitMix64(seed ^ 0xBEEF)
        balls = []
        for _ in range(rng.randint(1, 4)):
            c = (Fraction(rng.randint(-12, 12), 2), Fraction(rng.randint(-12, 12), 2))
            slack = Fraction(rng.randint(0, 6), 2)
            balls.append(Ball(c, box.dist(c) + slack))
        fam = LinfBallFamily(tuple(balls))
        if not check_admissible(LinfBallFamily(fam.balls, box)):
            continue
        assert external_witness(box, fam).feasible


def test_external_witness_zero_balls_at_member():
    box = Box(pt(0, 0), pt(2, 2))
    fam = LinfBallFamily((Ball(pt(1, 1), F(0)), Ball(pt(1, 1), F(0))))
    result = external_witness(box, fam)
    assert result.witness == pt(1, 1)


def test_external_witness_diag_halfspace():
    inst = helly_counterexample(2)
    a3 = inst.halfspaces[2]  # x1 + x2 <= -1
    fam = LinfBallFamily((Ball(pt(0, 0), F(1, 2)), Ball(pt(-2, -2), F(3, 2))))
    result = external_witness(a3, fam)
    assert result.feasible
    w = result.witness
    assert w[0] + w[1] <= -1


def test_weakly_external_witness_example():
    inner = LinfBallFamily((Ball(pt(-1, 0), F(1)),))
    result = weakly_external_witness(DIAG, pt(0, 0), F(1, 2), inner)
    assert result.feasible
    w = result.witness
    assert w[0] + w[1] <= -1
    assert linf_dist(w, pt(0, 0)) <= F(1, 2)
    assert linf_dist(w, pt(-1, 0)) <= 1
    # the canonical solution satisfies the same constraints
    cand = pt(F(-1, 2), F(-1, 2))
    assert cand[0] + cand[1] <= -1
    assert linf_dist(cand, pt(0, 0)) <= F(1, 2)
    assert linf_dist(cand, pt(-1, 0)) <= 1


def test_weakly_external_rejects_outside_center():
    inner = LinfBallFamily((Ball(pt(5, 5), F(1)),))
    with pytest.raises(CenterNotInA):
        weakly_external_witness(DIAG, pt(0, 0), F(1, 2), inner)


def test_refute_budget_zero():
    report = refute_search(Box(pt(0, 0), pt(1, 1)), 2, 0, seed=1)
    assert report.verdict == "inconclusive" and report.budget_used == 0


def test_refute_box_inconclusive():
    report = refute_search(Box(pt(0, 0), pt(1, 1)), 2, 10_000, seed=5)
    assert report.verdict == "inconclusive"
    assert report.budget_used == 10_000


def test_refute_union_found_and_reverifies():
    report = refute_search(UNION, 2, 1000, seed=7)
    assert report.refuted
    balls = report.certificate["balls"]
    assert verify_refutation(UNION, balls)
    assert len(balls) == 2


def test_refuter_scalar_vector_agreement():
    subsets = [UNION, Box(pt(0, 0), pt(1, 1)), DIAG]
    for subset in subsets:
        for level in (2, 4):
            fast = refute_search(subset, level, 250, seed=11, fast=True)
            slow = refute_search(subset, level, 250, seed=11, fast=False)
            assert fast.verdict == slow.verdict
            assert fast.budget_used == slow.budget_used
            if fast.refuted:
                assert fast.certificate["balls"] == slow.certificate["balls"]


def test_refuter_worker_split_invariance():
    one = refute_search(UNION, 2, 1000, seed=7, workers=1)
    four = refute_search(UNION, 2, 1000, seed=7, workers=4)
    assert one.budget_used == four.budget_used
    assert one.certificate["balls"] == four.certificate["balls"]


def test_refuter_workers_env_var(monkeypatch):
    monkeypatch.setenv("HYPERBALL_THREADS", "3")
    report = refute_search(UNION, 2, 1000, seed=7)
    assert report.budget_used == refute_search(UNION, 2, 1000, seed=7, workers=1).budget_used


def test_antipodal_c6_family_not_admissible():
    g = GraphInstance(6, tuple((i, (i + 1) % 6) for i in range(6)))
    space = graph_metric(g)
    fam = FiniteBallFamily(space, ((0, F(1)), (3, F(1))))  # d = 3 > 1 + 1
    result = check_admissible(fam)
    assert not result and result.kind == "pairwise"


def test_refuter_center_in_subset_modes():
    # boxes stay safe under the center-in-subset variants as well
    box = Box(pt(0, 0), pt(2, 2))
    for mode in ("hyperconvex", "weakly-external"):
        report = refute_search(box, 2, 60, seed=3, mode=mode)
        assert report.verdict == "inconclusive"
    hit = refute_search(UNION, 2, 300, seed=3, mode="hyperconvex")
    if hit.refuted:
        assert verify_refutation(UNION, hit.certificate["balls"])


def test_four_to_n_flags_big_only_refutations(monkeypatch):
    """The inconsistency flag fires exactly when every verified refutation
    needs more than four balls; exercised with a stubbed search."""
    import hyperball.lab as lab

    big_family = tuple(Ball(pt(F(i), F(0)), F(1)) for i in range(5))

    def fake_search(subset, level, budget, seed, mode="external", **kwargs):
        from hyperball.reports import INCONCLUSIVE, REFUTED, PropertyReport

        if level >= 5:
            return PropertyReport(
                REFUTED, certificate={"balls": big_family}, seed=seed, budget_used=1
            )
        return PropertyReport(INCONCLUSIVE, seed=seed, budget_used=budget)

    monkeypatch.setattr(lab, "refute_search", fake_search)
    report = lab.four_to_n_consistency(Box(pt(0, 0), pt(1, 1)), 6, 100, seed=0)
    assert report.refuted
    assert report.certificate["flag"] == "THEOREM-INCONSISTENT"


def test_refuter_general_polyhedron_falls_back_to_lp():
    wedge = box_to_polyhedron(Box(pt(0, 0), pt(4, 4)))
    report = refute_search(wedge, 2, 40, seed=3)
    assert report.verdict == "inconclusive"


def test_refute_finite_backend(c5):
    subset = FiniteSubset(c5, (0, 1, 2, 3, 4))
    report = refute_search(subset, 2, 200, seed=2)
    assert report.verdict in ("inconclusive", "refuted")


def test_ladder_padding_preserves_refutation():
    report = refute_search(UNION, 2, 1000, seed=7)
    balls = report.certificate["balls"]
    padded = pad_family(LinfBallFamily(balls, UNION), 5)
    assert check_admissible(padded)
    assert verify_refutation(UNION, padded.balls)


def test_helly_counterexample_small_dims():
    inst = helly_counterexample(2)
    assert [hs.rows for hs in inst.halfspaces] == [
        (((F(0), F(-1)), F(0)),),
        (((F(-1), F(1)), F(0)),),
        (((F(1), F(1)), F(-1)),),
    ]
    assert inst.witnesses == (pt(0, -5), pt(-5, 0), pt(0, 0))
    with pytest.raises(DimTooSmall):
        helly_counterexample(1)


@pytest.mark.parametrize("n", range(2, 7))
def test_helly_counterexample_verifies(n):
    inst = helly_counterexample(n)
    # witness j in every set except (possibly) j — enforced by the type,
    # checked here explicitly against the raw rows
    for j, w in enumerate(inst.witnesses):
        for i, hs in enumerate(inst.halfspaces):
            if i != j:
                assert hs.contains(w)
    total_rows = tuple(r for hs in inst.halfspaces for r in hs.rows)
    from hyperball.lp import HPolyhedron

    assert not lp_feasible(HPolyhedron(n, total_rows)).feasible
    assert helly_order_check(inst.halfspaces, n).refuted
    assert helly_order_check(inst.halfspaces, n + 1).holds


def test_helly_order_boxes_hold():
    boxes = [
        box_to_polyhedron(Box(pt(0, 0), pt(2, 2))),
        box_to_polyhedron(Box(pt(1, 1), pt(3, 3))),
        box_to_polyhedron(Box(pt(0, 1), pt(2, 3))),
    ]
    report = helly_order_check(boxes, 2)
    assert report.holds and "total_witness" in report.certificate


def test_graph_helly_k4_holds():
    edges = tuple((i, j) for i in range(4) for j in range(i + 1, 4))
    report = graph_n_helly_bruteforce(GraphInstance(4, edges), 3)
    assert report.holds


def test_graph_helly_c4_exhaustive():
    g = GraphInstance(4, ((0, 1), (1, 2), (2, 3), (3, 0)))
    report = graph_n_helly_bruteforce(g, 3)
    assert report.holds  # C4 is a product of paths; integer balls share vertices


def test_graph_helly_c6_refuted():
    g = GraphInstance(6, tuple((i, (i + 1) % 6) for i in range(6)))
    report = graph_n_helly_bruteforce(g, 3)
    assert report.refuted
    centers, radii = report.certificate["centers"], report.certificate["radii"]
    space = graph_metric(g)
    for i in range(3):
        for j in range(i + 1, 3):
            assert space.d(centers[i], centers[j]) <= radii[i] + radii[j]
    assert not any(
        all(space.d(v, centers[i]) <= radii[i] for i in range(3))
        for v in range(6)
    )


def test_graph_helly_cap():
    edges = tuple((i, (i + 1) % 12) for i in range(12))
    with pytest.raises(SizeCapExceeded):
        graph_n_helly_bruteforce(GraphInstance(12, edges), 6, cap=1000)


def test_four_to_n_box_consistent():
    report = four_to_n_consistency(Box(pt(0, 0), pt(1, 1)), 6, 500, seed=9)
    assert report.holds
    assert all(v["verdict"] == "inconclusive" for v in report.certificate["outcomes"].values())


def test_four_to_n_union_consistent_via_small_refutation():
    report = four_to_n_consistency(UNION, 6, 500, seed=9)
    assert report.holds
    sizes = [v.get("family_size") for v in report.certificate["outcomes"].values()]
    assert any(s is not None and s <= 4 for s in sizes)


def test_four_to_n_budget_zero():
    report = four_to_n_consistency(UNION, 6, 0, seed=9)
    assert report.verdict == "inconclusive"


def test_uniform_local_sample_on_box():
    box = Box(pt(0, 0), pt(4, 4))
    report = uniform_local_external_sample(
        box, F(1), (pt(1, 1), pt(3, 3)), budget=100, seed=4
    )
    assert report.verdict == "inconclusive"  # no local refutation on a box
