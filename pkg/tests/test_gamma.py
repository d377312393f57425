import numpy as np
import pytest

from pidregion import GammaRegion, RealPoly, decoupling_function, q_basis, transform_matrix
from pidregion.errors import DomainError, NotApplicable
from pidregion.gamma import QBasis, check_rank_condition


def test_schur_basis_and_circle_equivalence():
    b = q_basis(GammaRegion.schur())
    assert [d.coeffs for d in b.deltas] == [(1.0, 0.0, 1.0), (0.0, 1.0), (1.0,)]
    c = q_basis(GammaRegion.circle(0.0, 1.0))
    assert [d.coeffs for d in c.deltas] == [d.coeffs for d in b.deltas]


def test_hurwitz_basis_roles():
    b = q_basis(GammaRegion.hurwitz())
    roles = {r: d.coeffs for r, d in b.by_role().items()}
    assert roles == {"kI": (1.0,), "kD": (0.0, 0.0, 1.0), "kP": (0.0, 1.0)}


def test_transform_matrices():
    want = np.array([[1, 0, 1], [0, 1, 0], [1, 0, 0]])
    assert np.array_equal(transform_matrix(GammaRegion.schur()), want)
    assert np.array_equal(transform_matrix(GammaRegion.circle(0.0, 1.0)), want)
    assert np.array_equal(transform_matrix(GammaRegion.circle(1.0, 2.0)),
                          np.array([[3, -1, 1], [0, 1, 0], [1, 0, 0]]))
    with pytest.raises(NotApplicable):
        transform_matrix(GammaRegion.hurwitz())


def test_decoupling_functions():
    assert decoupling_function(GammaRegion.schur(), "linear").coeffs == (0.0, 1.0)
    assert decoupling_function(GammaRegion.circle(2.0, 0.5)).coeffs == (-2.0, 1.0)
    assert decoupling_function(GammaRegion.hurwitz()).coeffs == (1.0,)
    with pytest.raises(DomainError):
        decoupling_function(GammaRegion.hurwitz(), "linear")


def test_invalid_circle():
    with pytest.raises(DomainError):
        GammaRegion.circle(0.0, -1.0)


def test_rank_condition_supported_regions():
    rng = np.random.default_rng(7)
    regions = [GammaRegion.hurwitz(), GammaRegion.hurwitz(-0.5), GammaRegion.schur()]
    regions += [GammaRegion.circle(rng.uniform(-1, 1), rng.uniform(0.1, 2)) for _ in range(5)]
    for reg in regions:
        assert check_rank_condition(reg, q_basis(reg), 256)


def test_rank_condition_rejects_naive_schur_basis():
    naive = QBasis(RealPoly([1.0]), RealPoly([0.0, 1.0]), RealPoly([0.0, 0.0, 1.0]))
    assert not check_rank_condition(GammaRegion.schur(), naive, 256)
    # the 2x2 Jacobian determinant at z = exp(j pi/4) is sin(pi/4) != 0
    z = np.exp(1j * np.pi / 4)
    assert abs(np.imag(np.conj(1.0) * z)) > 0.5


def test_rank_condition_is_plant_independent():
    rng = np.random.default_rng(11)
    for _ in range(5):
        a = RealPoly(rng.uniform(-3, 3, 4))
        for reg in (GammaRegion.hurwitz(), GammaRegion.schur(), GammaRegion.circle(0.4, 0.7)):
            assert check_rank_condition(reg, q_basis(reg), 256, a_poly=a) == \
                check_rank_condition(reg, q_basis(reg), 256)


@pytest.mark.parametrize("m,rho", [(0.0, 1.0), (1.0, 2.0), (-0.5, 0.3)])
def test_first_basis_element_real_on_circle(m, rho):
    z = m + rho * np.exp(1j * np.linspace(0, 2 * np.pi, 256, endpoint=False))
    val = (rho**2 - m**2 + z**2) / (z - m)
    assert np.max(np.abs(val.imag)) < 1e-12 * max(1.0, np.max(np.abs(val)))
