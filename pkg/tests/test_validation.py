import numpy as np
import pytest

from quditbell import validation as v


def test_check_matrix_rejects_nan_and_1d():
    with pytest.raises(ValueError):
        v.check_matrix([1.0, 2.0])
    with pytest.raises(ValueError):
        v.check_matrix([[np.nan]])


def test_check_square():
    with pytest.raises(ValueError):
        v.check_square(np.zeros((2, 3)))


def test_check_dims_infers_equal_split():
    assert v.check_dims(None, 9) == (3, 3)
    with pytest.raises(ValueError):
        v.check_dims(None, 6)
    assert v.check_dims((2, 3), 6) == (2, 3)
    with pytest.raises(ValueError):
        v.check_dims((2, 2), 6)


def test_check_density_matrix():
    rho, dims = v.check_density_matrix(np.eye(4) / 4)
    assert dims == (2, 2)
    with pytest.raises(ValueError, match="trace"):
        v.check_density_matrix(np.eye(4))
    with pytest.raises(ValueError, match="positive"):
        v.check_density_matrix(np.diag([1.5, -0.5, 0, 0]))
    with pytest.raises(ValueError, match="Hermitian"):
        v.check_density_matrix(np.array([[0.5, 1], [0, 0.5]]))


def test_check_unitary():
    v.check_unitary(np.array([[0, 1], [1, 0]]))
    with pytest.raises(ValueError):
        v.check_unitary(np.eye(2) * 2)


@pytest.mark.parametrize("d", [1, 2.5, -3])
def test_check_dimension_rejects(d):
    with pytest.raises(ValueError):
        v.check_dimension(d)


def test_check_random_state_passthrough():
    g = np.random.default_rng(1)
    assert v.check_random_state(g) is g
    assert isinstance(v.check_random_state(3), np.random.Generator)
