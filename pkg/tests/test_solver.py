"""Residual stacking, LM refinement, multistart search, and classification."""

import numpy as np
import pytest

import oracles as orc
from liemaxwell import lie_algebra as la
from liemaxwell import maxwell, solver
from liemaxwell.forms import two_form


def cand_2a2(a5=2.0, a12=1.0, a34=np.sqrt(3)):
    return solver.Candidate("2A2", {}, {"a1": 0, "a2": 0, "a3": 0, "a4": 0, "a5": a5},
                            two_form(e12=a12, e34=a34))


def test_residual_vector_zero_at_family_points():
    assert np.abs(solver.residual_vector(cand_2a2())).max() <= 1e-12
    c49 = solver.Candidate("A49half", {}, {"a1": 1.0, "a2": 0, "a3": 0, "a4": 0},
                           two_form(e13=np.sqrt(2.5), e24=1.0))
    assert np.abs(solver.residual_vector(c49)).max() <= 1e-12


def test_residual_vector_nonzero_matches_oracle():
    c = solver.Candidate("2A2", {}, {"a1": 0, "a2": 0, "a3": 0, "a4": 0, "a5": 3.0},
                         two_form(e34=1.0))
    vec = solver.residual_vector(c)
    assert len(vec) == 18
    # independent assembly: orthonormal-frame Ricci + direct stress + Leibniz d
    L = la.instantiate(la.entry_by_name("2A2"), {})
    cmat = np.asarray(L.c, dtype=float)
    g = np.diag([1.0, 1.0, 3.0, 1.0])
    ric = orc.ricci_orthonormal(cmat, g)
    gi = np.linalg.inv(g)
    s = np.einsum("ik,ik->", gi, ric)
    em = ric - s / 4 * g + orc.stress_direct(g, c.f_coeffs)
    want = np.concatenate([
        [em[i, j] for i in range(4) for j in range(i, 4)],
        orc.d_two_form_leibniz(cmat, c.f_coeffs),
        orc.d_two_form_leibniz(cmat, orc.hodge_star_solve(g, c.f_coeffs)),
    ])
    assert np.abs(vec - want).max() < 1e-10
    assert np.abs(vec).max() == pytest.approx(0.5, abs=1e-12)  # frozen from the oracle


def test_residual_vector_rejects_constraint_violation():
    bad = solver.Candidate("2A2", {}, {"a1": 0, "a2": 0, "a3": 0, "a4": 0, "a5": -1.0},
                           two_form(e34=1.0))
    with pytest.raises(solver.CandidateError):
        solver.residual_vector(bad)


def test_context_agrees_with_residual_vector():
    rng = np.random.default_rng(40)
    for entry in la.catalog():
        ap = solver.sample_algebra_params(entry, rng)
        ctx = solver.ResidualContext(entry, ap, mode="free_F")
        mp = solver.sample_metric_params(entry, rng)
        x = ctx.pack(mp, rng.uniform(-1, 1, ctx.kernel.shape[1]))
        got = ctx.residual(x)
        want = solver.residual_vector(ctx.candidate(x))
        scale = max(1.0, np.abs(want).max())
        assert np.abs(got - want).max() < 1e-12 * scale, entry.name


def test_refine_to_family_point():
    # With everything frozen except f34 the unique root is a34 = sqrt(3),
    # cross-checked by bisecting (1 + a34^2)/(1 + a12^2) - a5.
    start = cand_2a2(a34=1.8)
    res = solver.refine(start, frozen=("a1", "a2", "a3", "a4", "a5", "f12", "f13"))
    assert res.converged
    root = orc.bisect(lambda t: (1 + t * t) / 2 - 2, 0.1, 5.0)
    assert res.candidate.f_coeffs[5] == pytest.approx(root, abs=1e-9)
    assert res.candidate.f_coeffs[5] == pytest.approx(np.sqrt(3), abs=1e-9)


def test_refine_fixed_point():
    res = solver.refine(cand_2a2())
    assert res.converged and res.iterations == 0
    assert np.abs(res.candidate.f_coeffs - cand_2a2().f_coeffs).max() == 0


def test_refine_a44_unit_norm_fails():
    entry = la.entry_by_name("A4,4")
    rng = np.random.default_rng(5)
    mp = solver.sample_metric_params(entry, rng)
    ctx = solver.ResidualContext(entry, {}, mode="unit_F")
    f6 = ctx.kernel @ np.array([1.0, 0.5, -0.3])
    c = solver.Candidate("A4,4", {}, mp, f6)
    res = solver.refine(c, unit_norm=True, max_iter=40)
    assert not res.converged
    assert res.reason in ("stalled", "constraint-trapped", "iteration cap", "slow progress")


def test_refine_rejects_nonclosed_f():
    c = solver.Candidate("2A2", {}, {"a1": 0, "a2": 0, "a3": 0, "a4": 0, "a5": 2.0},
                         two_form(e14=1.0))
    with pytest.raises(solver.CandidateError, match="closed"):
        solver.refine(c)


def test_refine_unknown_frozen_name():
    with pytest.raises(ValueError, match="frozen"):
        solver.refine(cand_2a2(), frozen=("zz",))


def test_jacobian_matches_forward_differences():
    rng = np.random.default_rng(6)
    entry = la.entry_by_name("2A2")
    ctx = solver.ResidualContext(entry, {}, mode="unit_F")
    mp = solver.sample_metric_params(entry, rng)
    x = ctx.pack(mp, rng.uniform(-1, 1, ctx.kernel.shape[1]))
    jac = solver.residual_jacobian(ctx.residual, x)
    r0 = ctx.residual(x)
    for k in range(len(x)):
        h = 1e-7 * max(1.0, abs(x[k]))
        xp = x.copy()
        xp[k] += h
        col = (ctx.residual(xp) - r0) / h
        denom = max(1.0, np.abs(jac[:, k]).max())
        assert np.abs(jac[:, k] - col).max() / denom < 1e-4


def test_multistart_2a2_finds_family():
    out = solver.multistart_search("2A2", n_seeds=25, seed=7)
    non_einstein = [(c, r) for c, r in out.solutions
                    if r.classification == maxwell.NON_EINSTEIN_EM]
    assert non_einstein
    for c, r in out.solutions:
        a12, a34, a5 = c.f_coeffs[0], c.f_coeffs[5], c.metric_params["a5"]
        assert abs(a5 * (1 + a12 ** 2) - (1 + a34 ** 2)) <= 1e-6
        if r.classification == maxwell.NON_EINSTEIN_EM:
            assert abs(a5 - 1) > 1e-6  # a5 = 1 is the Einstein degeneration


def test_multistart_a44_no_solutions():
    out = solver.multistart_search("A4,4", n_seeds=40, seed=3)
    assert not out.solutions
    assert out.best_nonsolution_residual > 1e-3


def test_multistart_abelian_free_f():
    out = solver.multistart_search("abelian", n_seeds=10, seed=1, mode="free_F")
    assert out.solutions
    assert {r.classification for _, r in out.solutions} == {maxwell.EINSTEIN_NULL_STRESS}


def test_multistart_rejects_bad_seeds():
    with pytest.raises(ValueError):
        solver.multistart_search("2A2", n_seeds=0, seed=0)


def test_search_determinism_and_parallel_merge():
    a = solver.multistart_search("2A2", n_seeds=16, seed=7, n_jobs=1)
    b = solver.multistart_search("2A2", n_seeds=16, seed=7, n_jobs=1)
    c = solver.multistart_search("2A2", n_seeds=16, seed=7, n_jobs=2)
    assert a.to_json() == b.to_json()
    assert a.to_json() == c.to_json()
    assert "wall_time" not in a.to_dict()
    assert "wall_time" in a.to_dict(include_timing=True)
    assert a.to_dict()["catalog_sha256"] == la.catalog_checksum()


def test_sign_flip_orbit():
    out = solver.multistart_search("2A2", n_seeds=10, seed=2)
    cand, rep = out.solutions[0]
    flipped = solver.Candidate(cand.entry_name, cand.algebra_params, cand.metric_params,
                               -cand.f_coeffs, cand.orientation)
    entry = la.entry_by_name("2A2")
    L = la.instantiate(entry, {})
    g = la.metric_from_params(entry, flipped.metric_params)
    rep2 = maxwell.em_residual(L, g, flipped.f_coeffs)
    assert rep2.classification == rep.classification
    # canonicalization folds the orbit onto one representative
    assert np.allclose(solver.canonical_sign(flipped).f_coeffs, cand.f_coeffs)


def test_independent_reverification_of_solutions():
    out = solver.multistart_search("A46a0", n_seeds=20, seed=9)
    assert out.solutions
    for cand, rep in out.solutions:
        vec = solver.residual_vector(cand)
        assert np.abs(vec).max() <= rep.tol


def test_classify_agreements():
    res = solver.classify_algebra("2A2", budget=(30, 45), seed=0)
    assert res.agree and res.computed == "HasNonEinsteinEM"
    res = solver.classify_algebra("A4,12", budget=(30, 45), seed=0)
    assert res.agree and not res.inconclusive
    assert res.max_null_stress <= 1e-8
    res = solver.classify_algebra("A3,9+A1", budget=(30, 45), seed=0)
    assert res.agree


def test_classify_all_positive_entries():
    # the four positive entries all classify as HasNonEinsteinEM at a small
    # budget (the negatives run at full budget in the acceptance sweep)
    for name in ("2A2", "A2+2A1", "A46a0", "A49half"):
        res = solver.classify_algebra(name, budget=(40, 45), seed=5)
        assert res.agree and res.computed == "HasNonEinsteinEM", name


def test_verify_solution_family_reports():
    for fid in ("2A2", "A2+2A1", "A46a0", "A49half"):
        rep = solver.verify_solution_family(fid)
        assert rep.all_pass, fid
        assert set(rep.classifications) == {maxwell.NON_EINSTEIN_EM}
    rev = solver.verify_solution_family("A49half", orientation=-1)
    assert rev.all_pass and set(rev.hermitian_types) == {"Kahler"}


def test_candidate_serialization_roundtrip(tmp_path):
    c = cand_2a2()
    path = tmp_path / "c.json"
    path.write_text(__import__("json").dumps(c.to_dict()))
    c2 = solver.Candidate.from_json(path)
    assert c2.entry_name == "2A2"
    assert np.allclose(c2.f_coeffs, c.f_coeffs)
    with pytest.raises(solver.CandidateError):
        solver.Candidate.from_json(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    with pytest.raises(solver.CandidateError):
        solver.Candidate.from_json(bad)


def test_variant_cycling_hits_named_branches():
    entry = la.entry_by_name("A4,5^{a,b}")
    rng = np.random.default_rng(0)
    seen = set()
    for idx in range(10):
        ap = solver.sample_algebra_params(entry, rng, variant_index=idx)
        seen.add(tuple(sorted(ap.items())))
        assert ap["a"] <= ap["b"]
    assert (("a", -0.5), ("b", 0.5)) in seen  # the a = -b branch
