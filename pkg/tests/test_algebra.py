import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st

from nilric.algebra import (
    MetricFrame,
    StructureTensor,
    Subspace,
    act,
    center,
    central_series,
    derivations,
    derived_ideal,
    exact_derivation_dim,
    exact_dims,
    pi_tensor,
)
from nilric.catalog import builtin, random_frame
from nilric.errors import DimensionMismatch, JacobiViolation, NotNilpotent, SingularFrame

from conftest import mild_frame, random_nilpotent


def coord(n, *idx):
    return Subspace(n, np.eye(n)[:, [i - 1 for i in idx]])


def same(U, V, tol=1e-8):
    return U.dim == V.dim and (U.dim == 0 or U.max_angle(V) <= tol)


def test_identity_action(l53):
    assert np.array_equal(act(np.eye(5), l53).coeffs, l53.coeffs)


@pytest.mark.parametrize("c", [0.5, 2.0, 3.7])
def test_scalar_action(l53, c):
    np.testing.assert_allclose(act(c * np.eye(5), l53).coeffs, l53.coeffs / c, atol=1e-14)


def test_heisenberg_diag_action(h3):
    nu = act(np.diag([1.0, 1.0, 2.0]), h3)
    assert nu.coeffs[0, 1, 2] == pytest.approx(2.0)
    assert nu.coeffs[1, 0, 2] == pytest.approx(-2.0)
    assert np.count_nonzero(nu.coeffs) == 2


def test_action_matches_definition(rng):
    # h mu(h^-1 x, h^-1 y) on random vectors
    mu = builtin("L_5_9").tensor()
    h = random_frame(rng, 5)
    nu = act(h, mu)
    g = np.linalg.inv(h)
    for _ in range(5):
        x, y = rng.standard_normal(5), rng.standard_normal(5)
        np.testing.assert_allclose(nu.bracket(x, y), h @ mu.bracket(g @ x, g @ y), rtol=1e-10, atol=1e-10)


@given(st.integers(0, 2**31))
def test_action_composes(seed):
    rng = np.random.default_rng(seed)
    mu = random_nilpotent(rng)
    h1, h2 = mild_frame(rng, mu.dim), mild_frame(rng, mu.dim)
    lhs = act(h2, act(h1, mu)).coeffs
    rhs = act(h2 @ h1, mu).coeffs
    assert np.linalg.norm(lhs - rhs) <= 1e-10 * max(np.linalg.norm(rhs), 1e-300)


@given(st.integers(0, 2**31))
def test_subspaces_are_equivariant(seed):
    rng = np.random.default_rng(seed)
    mu = random_nilpotent(rng)
    h = mild_frame(rng, mu.dim)
    nu = act(h, mu)
    assert same(center(nu), center(mu).image(h))
    assert same(derived_ideal(nu), derived_ideal(mu).image(h))
    assert derived_ideal(nu).dim + derived_ideal(nu).complement().dim == mu.dim


def test_action_errors(h3):
    with pytest.raises(DimensionMismatch):
        act(np.eye(4), h3)
    with pytest.raises(SingularFrame):
        act(np.diag([1.0, 1.0, 0.0]), h3)
    with pytest.raises(SingularFrame):
        MetricFrame(np.diag([1.0, 1.0, 1e-14]))


def test_metric_frame_gram_is_spd(rng):
    h = MetricFrame(random_frame(rng, 4))
    G = h.gram()
    np.testing.assert_allclose(G, G.T)
    assert np.min(np.linalg.eigvalsh(G)) > 0


def test_heisenberg_subspaces(h3):
    assert same(center(h3), coord(3, 3))
    assert same(derived_ideal(h3), coord(3, 3))


def test_abelian_subspaces():
    mu = builtin("abelian_4").tensor()
    assert derived_ideal(mu).dim == 0
    assert center(mu).dim == 4
    assert [S.dim for S in central_series(mu)] == [4, 0]
    assert len(derivations(mu)) == 16


def test_l53_subspaces(l53):
    assert same(derived_ideal(l53), coord(5, 3, 4))
    assert same(center(l53), coord(5, 4, 5))


def test_central_series(h3, l53):
    s = central_series(h3)
    assert [S.dim for S in s] == [3, 1, 0]
    assert same(s[1], coord(3, 3))
    s = central_series(l53)
    assert [S.dim for S in s] == [5, 2, 1, 0]
    assert same(s[1], coord(5, 3, 4)) and same(s[2], coord(5, 4))


def _sympy_derivation_dim(mu):
    # independent oracle: exact rank of the derivation system in sympy
    n = mu.dim
    c = [[[sympy.Rational(0)] * n for _ in range(n)] for _ in range(n)]
    for (i, j, k), v in mu.exact.items():
        c[i][j][k] += sympy.Rational(v.numerator, v.denominator)
        c[j][i][k] -= sympy.Rational(v.numerator, v.denominator)
    E = sympy.symbols(f"e0:{n * n}")
    D = sympy.Matrix(n, n, E)
    eqs = []
    for i in range(n):
        for j in range(n):
            for k in range(n):
                expr = sum(D[k, l] * c[i][j][l] for l in range(n))
                expr -= sum(D[l, i] * c[l][j][k] for l in range(n))
                expr -= sum(D[l, j] * c[i][l][k] for l in range(n))
                eqs.append(expr)
    A = sympy.Matrix([[sympy.diff(e, x) for x in E] for e in eqs])
    return n * n - A.rank()


@pytest.mark.parametrize("name,expected", [("heisenberg_3", 6), ("L_5_3", 11), ("abelian_3", 9)])
def test_derivation_dimension(name, expected):
    mu = builtin(name).tensor()
    assert _sympy_derivation_dim(mu) == expected
    assert len(derivations(mu)) == expected
    assert exact_derivation_dim(mu) == expected


@pytest.mark.parametrize("name", ["heisenberg_3", "L_5_3", "L_5_6", "free_2step_3gen"])
def test_derivations_annihilate(name):
    mu = builtin(name).tensor()
    scale = np.sqrt(mu.norm2())
    for E in derivations(mu):
        assert np.linalg.norm(pi_tensor(E, mu.coeffs)) <= 1e-10 * scale * np.linalg.norm(E)


def test_exact_and_float_dims_agree():
    for name in ["L_5_3", "L_5_6", "filiform_6", "heisenberg_3_x2"]:
        mu = builtin(name).tensor()
        ex = exact_dims(mu)
        assert ex["center"] == center(mu).dim
        assert ex["derived"] == derived_ideal(mu).dim
        assert ex["central_series"] == [S.dim for S in central_series(mu)]


def test_non_lie_tensor_rejected():
    # [X1,X2]=X3, [X2,X3]=X1, [X3,X1]=X2 is so(3): Jacobi holds but not nilpotent
    c = np.zeros((3, 3, 3))
    for i, j, k in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]:
        c[i, j, k], c[j, i, k] = 1, -1
    with pytest.raises(NotNilpotent):
        StructureTensor(c)
    # break Jacobi: [X1,X2]=X3, [X1,X3]=X1
    d = np.zeros((3, 3, 3))
    d[0, 1, 2], d[1, 0, 2] = 1, -1
    d[0, 2, 0], d[2, 0, 0] = 1, -1
    with pytest.raises(JacobiViolation):
        StructureTensor(d)


def test_non_antisymmetric_rejected():
    c = np.zeros((3, 3, 3))
    c[0, 1, 2] = 1
    with pytest.raises(ValueError):
        StructureTensor(c)


def test_tensor_is_immutable(h3):
    with pytest.raises(ValueError):
        h3.coeffs[0, 1, 2] = 5.0


def test_nonzero_ideal_meets_center(rng):
    # every nonzero ideal of a nilpotent algebra meets the center
    for _ in range(10):
        mu = random_nilpotent(rng)
        for I in central_series(mu)[1:-1]:
            assert I.intersect(center(mu)).dim > 0


def test_subspace_basis_orthonormal(rng):
    V = Subspace.span(rng.standard_normal((6, 3)), 6)
    np.testing.assert_allclose(V.basis.T @ V.basis, np.eye(3), atol=1e-12)
    assert (V + V.complement()).dim == 6
    assert V.intersect(V.complement()).dim == 0
