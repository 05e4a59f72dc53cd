import numpy as np
import pytest
from hypothesis import given, strategies as st

from nilric.algebra import act
from nilric.catalog import acceptance_catalog, builtin, random_frame
from nilric.curvature import ricci
from nilric.errors import NonSymmetricInput
from nilric.invariants import (
    InvariantProfile,
    SignatureTriple,
    conjecture_set,
    lower_bounds,
    profile,
    r_mu,
    roundoff_tol,
    ricci_signature,
    signature,
    theorem_set,
    violated_bounds,
)

from conftest import mild_frame, random_nilpotent

PROFILES = {
    "heisenberg_3": (2, 0, 1, 0),
    "heisenberg_5": (4, 0, 1, 0),
    "filiform_4": (2, 0, 1, 1),
    "L_5_3": (2, 1, 1, 1),
    "free_2step_3gen": (3, 0, 3, 0),
    "abelian_4": (0, 4, 0, 0),
}


@pytest.mark.parametrize("name,expected", sorted(PROFILES.items()))
def test_profiles(name, expected):
    assert profile(builtin(name).tensor()).as_tuple() == expected


def test_profile_invariant_under_frames(rng):
    mu = builtin("L_5_3").tensor()
    for _ in range(5):
        assert profile(act(mild_frame(rng, 5), mu)).as_tuple() == (2, 1, 1, 1)


def test_profile_validation():
    with pytest.raises(ValueError):
        InvariantProfile(1, 1, 1, 1, 5)


def test_signature_examples(h3):
    assert signature(np.diag([-1.0, 0.0, 2.0, 3.0]), 1e-9) == (1, 1, 2)
    assert signature(ricci(h3).matrix) == (2, 0, 1)
    assert signature(np.zeros((4, 4))) == (0, 4, 0)
    assert ricci_signature(builtin("abelian_5").tensor()) == (0, 5, 0)


def test_signature_rejects_asymmetric():
    with pytest.raises(NonSymmetricInput):
        signature(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_signature_triple_helpers():
    t = SignatureTriple.parse("3,0,2")
    assert t == (3, 0, 2) and t.dim == 5 and str(t) == "(3,0,2)"
    assert t + SignatureTriple(0, 1, 0) == (3, 1, 2)
    with pytest.raises(ValueError):
        SignatureTriple.parse("1,2")


def _brute_theorem_set(p):
    out = set()
    n = p.dim
    for sm in range(n + 1):
        for s0 in range(n + 1 - sm):
            sp = n - sm - s0
            if any(sm >= p.u + r and s0 >= p.a - r and sp >= p.z + r for r in range(min(p.a, p.m) + 1)):
                out.add((sm, s0, sp))
    return out


def test_theorem_set_examples():
    assert theorem_set(profile(builtin("abelian_4").tensor())) == {(0, 4, 0)}
    assert theorem_set(profile(builtin("heisenberg_3").tensor())) == {(2, 0, 1)}
    assert theorem_set(profile(builtin("L_5_3").tensor())) == {(2, 1, 2), (2, 2, 1), (3, 1, 1), (3, 0, 2)}


def test_counterexample_sets(l53):
    p = profile(l53)
    assert (4, 0, 1) in conjecture_set(p)
    assert (4, 0, 1) not in theorem_set(p)
    reasons = violated_bounds(p, SignatureTriple(4, 0, 1))
    assert any("s+ >= z+r = 2" in r for r in reasons)
    assert violated_bounds(p, SignatureTriple(3, 0, 2)) == []


profiles = st.tuples(*[st.integers(0, 3)] * 4).filter(lambda t: sum(t) > 0).map(lambda t: InvariantProfile(*t, dim=sum(t)))


@given(profiles)
def test_set_relations(p):
    thm, conj = theorem_set(p), conjecture_set(p)
    assert thm == _brute_theorem_set(p)
    assert thm <= conj
    assert all(t.dim == p.dim for t in conj)
    if p.a == 0:
        assert thm == conj


def _psd_pair(rng, b, c):
    n = b + c
    Q1 = np.linalg.qr(rng.standard_normal((n, n)))[0]
    Q2 = np.linalg.qr(rng.standard_normal((n, n)))[0]
    s = Q1 @ np.diag([0.0] * b + list(rng.uniform(0.5, 2, c))) @ Q1.T
    t = Q2 @ np.diag([0.0] * c + list(rng.uniform(0.5, 2, b))) @ Q2.T
    return s, t


@given(st.integers(0, 4), st.integers(0, 4), st.integers(0, 2**31))
def test_difference_of_complementary_psd_forms(b, c, seed):
    if b + c == 0:
        return
    s, t = _psd_pair(np.random.default_rng(seed), b, c)
    assert signature(s) == (0, b, c)
    assert signature(t) == (0, c, b)
    assert signature(t - s) == (c, 0, b)


def test_r_mu_examples(l53):
    assert r_mu(l53) == 0
    h = np.eye(5)
    h[2, 4] = 1.0  # X5 -> X5 + X3 tilts the central plane
    assert r_mu(l53, h) == 1
    assert lower_bounds(l53, h) == (3, 0, 2)
    assert ricci_signature(l53, h) == (3, 0, 2)


@given(st.integers(0, 2**31))
def test_r_mu_range(seed):
    rng = np.random.default_rng(seed)
    mu = random_nilpotent(rng)
    p = profile(mu)
    assert 0 <= r_mu(mu, mild_frame(rng, mu.dim)) <= min(p.a, p.m)


@pytest.mark.parametrize("name", ["L_5_3", "L_5_3_R1", "filiform_5_R1", "L_5_9_R1", "heisenberg_3_R1"])
def test_lower_bounds_hold_on_random_metrics(name):
    mu = builtin(name).tensor()
    p = profile(mu)
    allowed = theorem_set(p)
    rng = np.random.default_rng(7)
    for _ in range(200):
        h = random_frame(rng, mu.dim)
        sig = ricci_signature(mu, h, roundoff_tol(mu.dim))
        lb = lower_bounds(mu, h, p)
        assert sig.s_minus >= lb.s_minus and sig.s_zero >= lb.s_zero and sig.s_plus >= lb.s_plus
        assert sig in allowed


@given(st.integers(0, 2**31))
def test_sylvester_congruence(seed):
    # signature of the Ricci form is independent of the orthonormal frame chosen
    rng = np.random.default_rng(seed)
    mu = random_nilpotent(rng)
    h = mild_frame(rng, mu.dim)
    Q = np.linalg.qr(rng.standard_normal((mu.dim, mu.dim)))[0]
    R = ricci(act(h, mu)).matrix
    assert ricci_signature(mu, Q @ h) == signature(R)
    C = mild_frame(rng, mu.dim)
    assert signature(C.T @ R @ C) == signature(R)


def test_default_band_misreads_badly_scaled_metrics(l53):
    # a genuine eigenvalue near 2e-9 ||Ric|| is classified as zero by the default band
    rng = np.random.default_rng(7)
    for _ in range(161):
        h = random_frame(rng, 5)
    assert r_mu(l53, h) == 1
    assert ricci_signature(l53, h) == (2, 2, 1)
    assert ricci_signature(l53, h, roundoff_tol(5)) == (3, 0, 2)
