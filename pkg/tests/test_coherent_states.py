import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chebosc.coherent_states import (
    RADIUS,
    annihilation_residual,
    bg_state,
    boundary_identity,
    boundary_identity_diagonal,
    boundary_prediction,
    chebyshev_t_generating,
    norm_squared_closed,
    overlap_kernel,
    paper_claimed_norm,
    wavefunction_closed,
    wavefunction_series,
)
from chebosc.polynomial_basis import Kind, eval_basis
from chebosc.quadrature import recurrence_coefficients

R2 = math.sqrt(2)
Z_SET = [0.3, 0.3j, -0.2 + 0.2j]

disk = st.builds(
    lambda r, a: cmath.rect(r, a),
    st.floats(0.0, 0.45), st.floats(0.0, 2 * math.pi),
)


def test_vacuum():
    s = bg_state(Kind.FIRST, 0, 6)
    assert s.coeffs.tolist() == [1, 0, 0, 0, 0, 0]
    assert annihilation_residual(s) == 0.0
    assert annihilation_residual(s, interior=False) == 0.0


def test_coefficient_examples():
    s1 = bg_state(Kind.FIRST, 0.5, 4)
    assert s1.coeffs[1] == pytest.approx(0.5)
    assert s1.coeffs[2] == pytest.approx(0.3535533905932738, abs=1e-15)
    s2 = bg_state(Kind.SECOND, 0.5, 4, "derived")
    assert s2.coeffs[2] == pytest.approx(0.5, abs=1e-15)


@settings(max_examples=40, deadline=None)
@given(z=disk)
def test_closed_coefficient_patterns(z):
    n = np.arange(12)
    first = bg_state(Kind.FIRST, z, 12).coeffs
    expected = np.where(n == 0, 1.0, R2 ** (n - 1.0) * z**n)
    assert np.allclose(first, expected, atol=1e-15)
    second = bg_state(Kind.SECOND, z, 12).coeffs
    assert np.allclose(second, (R2 * z) ** n, atol=1e-15)


@settings(max_examples=40, deadline=None)
@given(z=disk, kind=st.sampled_from(list(Kind)), source=st.sampled_from(["derived", "paper"]))
def test_eigen_recursion(z, kind, source):
    s = bg_state(kind, z, 64, source)
    b = recurrence_coefficients(kind, 64, source)
    lhs = R2 * b[:-1] * s.coeffs[1:]
    assert np.max(np.abs(lhs - z * s.coeffs[:-1])) < 1e-15
    assert annihilation_residual(s) < 1e-15


def test_boundary_leakage():
    s = bg_state(Kind.FIRST, 0.6, 8)
    d = s.coeffs
    expected = 0.6 * abs(d[7]) / np.linalg.norm(d)
    assert annihilation_residual(s, interior=False) == pytest.approx(expected, rel=1e-14)
    # equivalently sqrt2 b_7 times the first dropped coefficient d_8
    d8 = 0.6 * d[7] / (R2 * 0.5)
    assert expected == pytest.approx(R2 * 0.5 * abs(d8) / np.linalg.norm(d), rel=1e-14)


def test_tail_bound(kind):
    z = 0.55 * cmath.exp(0.4j)
    s = bg_state(kind, z, 20)
    full = bg_state(kind, z, 400)
    true_tail = float(np.sum(np.abs(full.coeffs[20:]) ** 2))
    assert s.tail_bound >= true_tail * (1 - 1e-12)
    assert s.tail_bound == pytest.approx(true_tail, rel=1e-10)


@pytest.mark.parametrize("z", [0.707106, 0.8, 1j, RADIUS])
def test_domain_rejection(z):
    with pytest.raises(ValueError, match="convergence disk"):
        bg_state(Kind.FIRST, z, 8)
    if abs(z) >= RADIUS:
        with pytest.raises(ValueError):
            norm_squared_closed(Kind.FIRST, z)
        with pytest.raises(ValueError):
            wavefunction_closed(Kind.FIRST, z, 0.0)
        with pytest.raises(ValueError):
            overlap_kernel(Kind.FIRST, 0, z)


@pytest.mark.parametrize("kind, z, expected", [
    (Kind.FIRST, 0, 1.0),
    (Kind.SECOND, 0, 1.0),
    (Kind.SECOND, 0.5, 2.0),
    (Kind.FIRST, 0.5, 1.5),
    (Kind.FIRST, 0.5j, 1.5),
])
def test_norm_closed_examples(kind, z, expected):
    assert norm_squared_closed(kind, z) == pytest.approx(expected, abs=1e-15)
    assert bg_state(kind, z, 200).norm_sq_series == pytest.approx(expected, abs=1e-12)


def test_paper_norm_matches_second_kind_only():
    z = 0.4 + 0.1j
    assert paper_claimed_norm(z) == pytest.approx(norm_squared_closed(Kind.SECOND, z), abs=1e-15)
    assert abs(paper_claimed_norm(z) - norm_squared_closed(Kind.FIRST, z)) > 0.1
    # printed b_0 turns the second-kind state into the first-kind one
    assert norm_squared_closed(Kind.SECOND, z, "paper") == pytest.approx(norm_squared_closed(Kind.FIRST, z))


@settings(max_examples=40, deadline=None)
@given(z=disk, kind=st.sampled_from(list(Kind)), source=st.sampled_from(["derived", "paper"]))
def test_norm_series_vs_closed(z, kind, source):
    s = bg_state(kind, z, 200, source)
    assert abs(s.norm_sq_series - norm_squared_closed(kind, z, source)) < 1e-11


def test_wavefunction_examples():
    assert wavefunction_series(bg_state(Kind.FIRST, 0, 5), 0.3) == 1.0
    assert wavefunction_closed(Kind.FIRST, 0, 0.77) == 1.0
    z = 0.3
    assert wavefunction_closed(Kind.FIRST, z, 1.0) == pytest.approx(1 / (1 - R2 * z), abs=1e-15)
    # partial sums of sum_n (sqrt2 z)^n converge to the same value
    partial = sum((R2 * z) ** n for n in range(200))
    assert wavefunction_series(bg_state(Kind.FIRST, z, 200), 1.0) == pytest.approx(partial, abs=1e-13)
    assert partial == pytest.approx(1.7369074008682, abs=1e-12)
    vals = wavefunction_series(bg_state(Kind.FIRST, 0.25, 60), np.linspace(-1, 1, 11))
    assert np.all(vals.imag == 0)


def test_generating_function_by_direct_summation():
    # oracle independent of the basis module: T_n(x) = cos(n arccos x)
    x = np.linspace(-1, 1, 41)
    for r in (0.3, 0.5 - 0.2j, -0.6):
        direct = sum(r**n * np.cos(n * np.arccos(x)) for n in range(400))
        assert np.max(np.abs(direct - chebyshev_t_generating(r, x))) < 1e-13


@pytest.mark.parametrize("z", Z_SET)
def test_series_vs_closed_grid(kind, x_grid, z):
    s = bg_state(kind, z, 200)
    diff = np.abs(wavefunction_series(s, x_grid) - wavefunction_closed(kind, z, x_grid))
    assert diff.max() < 1e-10


def test_series_vs_closed_paper_source(x_grid):
    for z in Z_SET:
        s = bg_state(Kind.SECOND, z, 200, "paper")
        diff = np.abs(wavefunction_series(s, x_grid) - wavefunction_closed(Kind.SECOND, z, x_grid, "paper"))
        assert diff.max() < 1e-10


@settings(max_examples=30, deadline=None)
@given(z=disk, kind=st.sampled_from(list(Kind)))
def test_series_vs_closed_property(z, kind):
    x = np.linspace(-1, 1, 101)
    s = bg_state(kind, z, 200)
    assert np.max(np.abs(wavefunction_series(s, x) - wavefunction_closed(kind, z, x))) < 1e-10


def test_overlap_examples(kind):
    z = 0.3 - 0.1j
    assert overlap_kernel(kind, z, z).real == pytest.approx(norm_squared_closed(kind, z), abs=1e-15)
    assert overlap_kernel(kind, 0, 0.4j) == 1.0
    a, b = bg_state(kind, 0.3, 200), bg_state(kind, 0.3j, 200)
    assert abs(np.vdot(a.coeffs, b.coeffs) - overlap_kernel(kind, 0.3, 0.3j)) < 1e-12


@settings(max_examples=25, deadline=None)
@given(zs=st.lists(disk, min_size=1, max_size=6), kind=st.sampled_from(list(Kind)))
def test_overlap_gram_psd(zs, kind):
    G = np.array([[overlap_kernel(kind, a, b) for b in zs] for a in zs])
    assert np.allclose(G, G.conj().T, atol=1e-14)
    assert np.linalg.eigvalsh(G).min() > -1e-12


@settings(max_examples=25, deadline=None)
@given(z=disk, kind=st.sampled_from(list(Kind)))
def test_conjugation_symmetry(z, kind):
    a = bg_state(kind, z, 30).coeffs
    b = bg_state(kind, z.conjugate(), 30).coeffs
    assert np.allclose(b, a.conj(), atol=0, rtol=1e-15)


def test_paper_scaled_coefficients():
    s = bg_state(Kind.FIRST, 0.2, 6)
    n = np.arange(1, 6)
    # sqrt2 d_n psi_n = z^n sqrt2^{n+1} T_n for n >= 1
    assert np.allclose(s.paper_scaled()[1:] * R2, 0.2**n * R2 ** (n + 1))


def test_boundary_identity():
    first = boundary_identity(Kind.FIRST, 32, 128)
    assert first.off_diagonal_max < 1e-12
    assert np.allclose(first.diagonal, [1.0] + [0.5] * 31, atol=1e-10)
    second = boundary_identity_diagonal(Kind.SECOND, 32, 128)
    assert np.allclose(second, 1.0, atol=1e-10)
    assert np.allclose(boundary_prediction(Kind.SECOND, 4, "paper"), [1, 0.5, 0.5, 0.5])


def test_boundary_needs_enough_samples():
    with pytest.raises(ValueError):
        boundary_identity(Kind.FIRST, 32, 100)


def test_boundary_by_direct_angle_quadrature():
    # independent route: scipy quad of |d_n|^2 over theta
    from scipy.integrate import quad

    for n in range(4):
        val, _ = quad(lambda t: abs(bg_state(Kind.FIRST, 0.7071067 * cmath.exp(1j * t), n + 2,
                                             margin=0).coeffs[n]) ** 2, 0, 2 * math.pi)
        pred = boundary_prediction(Kind.FIRST, n + 1)[n]
        assert val / (2 * math.pi) == pytest.approx(pred, rel=1e-5)
