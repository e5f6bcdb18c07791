import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as hst

from quditbell import states as st
from quditbell.matcore import partial_trace
from oracles import bell_diagonal, bell_loops


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_bell_basis_orthonormal(d):
    V = np.array([st.bell_vector(d, k, l) for k in range(d) for l in range(d)])
    assert np.allclose(V.conj() @ V.T, np.eye(d * d))


@pytest.mark.parametrize("d", [2, 3, 4])
def test_bell_vectors_match_loops(d):
    for k, l in itertools.product(range(d), repeat=2):
        assert np.allclose(st.bell_vector(d, k, l), bell_loops(d, k, l))


@pytest.mark.parametrize("d", [2, 3, 4])
def test_bell_states_are_maximally_entangled(d):
    for k, l in itertools.product(range(d), repeat=2):
        P = st.bell_projector(d, k, l)
        assert np.allclose(partial_trace(P, (d, d), "B"), np.eye(d) / d)
        assert st.entanglement_vn(st.bell_vector(d, k, l)) == pytest.approx(np.log2(d))


def test_qubit_bell_names_in_grid():
    assert np.allclose(st.bell_qubit("psi-").matrix, st.bell_projector(2, 1, 1))
    assert np.allclose(st.bell_qubit("psi+").matrix, st.bell_projector(2, 0, 1))
    assert np.allclose(st.bell_qubit("phi+").matrix, st.bell_projector(2, 0, 0))
    assert np.allclose(st.bell_qubit("phi-").matrix, st.bell_projector(2, 1, 0))
    with pytest.raises(ValueError):
        st.bell_qubit("chi")


def test_simplex_density_matches_loops(rng):
    c = rng.dirichlet(np.ones(9)).reshape(3, 3)
    rho = st.SimplexState(3, c).density().matrix
    assert np.allclose(rho, bell_diagonal(3, c))


def test_simplex_validity_and_strictness():
    s = st.slice2(-0.3, 0.0)
    assert not s.is_valid()
    with pytest.raises(ValueError):
        s.density()
    raw = s.density(strict=False)
    assert isinstance(raw, np.ndarray)
    assert np.linalg.eigvalsh(raw)[0] == pytest.approx(s.min_weight)


def test_family_weights():
    s = st.slice3_offline(0.3, 0.2, 0.1)
    noise = (1 - 0.6) / 9
    assert s.c[0, 0] == pytest.approx(noise + 0.3)
    assert s.c[1, 0] == pytest.approx(noise + 0.2)
    assert s.c[0, 1] == pytest.approx(noise + 0.1)
    assert s.c[2, 2] == pytest.approx(noise)
    assert s.c.sum() == pytest.approx(1)


@pytest.mark.parametrize("vertex", [(-1 / 7, -1 / 7), (1, 0), (0, 1)])
def test_slice2_positivity_corners(vertex):
    assert st.slice2(*vertex).min_weight == pytest.approx(0, abs=1e-15)


def test_complete_lines_count():
    # d + 1 directions, d parallel lines each
    assert len(st.complete_lines(3)) == 12
    assert len(st.complete_lines(5)) == 30


def test_line_points_rejects_degenerate_direction():
    with pytest.raises(ValueError):
        st.line_points(4, (0, 0), (2, 0))


def test_schmidt_of_psi_mv():
    v = st.psi_mv_qutrit()
    sd = st.schmidt(v, (3, 3))
    g2 = st.PSI_MV_GAMMA ** 2
    assert sd.rank == 3
    assert np.allclose(sorted(sd.coefficients), sorted([1 / (2 + g2), 1 / (2 + g2), g2 / (2 + g2)]))
    assert st.PSI_MV_GAMMA == pytest.approx(0.7923, abs=1e-4)


def test_purity_test_and_product_states(rng):
    a = rng.standard_normal(3) + 0j
    b = rng.standard_normal(2) + 0j
    prod = np.kron(a / np.linalg.norm(a), b / np.linalg.norm(b))
    assert st.purity_separability_test(prod, (3, 2))
    assert st.schmidt(prod, (3, 2)).rank == 1
    assert not st.purity_separability_test(st.bell_vector(3, 0, 0))


# --- phase-space symmetries ------------------------------------------------

def conj_by(U, rho):
    return U @ rho @ U.conj().T


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_translation_unitaries(d):
    for m, n in [(1, 0), (0, 1), (1, 2)]:
        U = st.translation_unitary(d, m, n)
        T = st.PhaseSpaceMap.translation(d, m, n)
        for k, l in itertools.product(range(d), repeat=2):
            assert np.allclose(conj_by(U, st.bell_projector(d, k, l)), st.bell_projector(d, *T(k, l)))


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_rotation_and_shear_unitaries(d):
    pairs = [(st.rotation_unitary(d), st.PhaseSpaceMap.rotation(d)),
             (st.shear_unitary(d), st.PhaseSpaceMap.shear(d))]
    for U, M in pairs:
        for k, l in itertools.product(range(d), repeat=2):
            assert np.allclose(conj_by(U, st.bell_projector(d, k, l)), st.bell_projector(d, *M(k, l)))


@pytest.mark.parametrize("d", [3, 5])
def test_coordinate_swap_is_not_implemented_by_the_rotation(d):
    # (k, l) -> (l, k) has det -1; the Fourier unitary realises (k, l) -> (l, -k)
    U = st.rotation_unitary(d)
    moved = conj_by(U, st.bell_projector(d, 1, 0))
    assert not np.allclose(moved, st.bell_projector(d, 0, 1))
    assert np.allclose(moved, st.bell_projector(d, 0, d - 1))


@pytest.mark.parametrize("d", [3, 4])
def test_reflection_is_complex_conjugation(d, rng):
    M = st.PhaseSpaceMap.reflection(d)
    for k, l in itertools.product(range(d), repeat=2):
        assert np.allclose(st.bell_projector(d, k, l).conj(), st.bell_projector(d, *M(k, l)))


def test_phase_space_map_rejects_singular_matrix():
    with pytest.raises(ValueError):
        st.PhaseSpaceMap(3, ((1, 1), (1, 1)))


def test_map_composition():
    d = 5
    R, S = st.PhaseSpaceMap.rotation(d), st.PhaseSpaceMap.shear(d)
    RS = R.then(S)
    for k, l in itertools.product(range(d), repeat=2):
        assert RS(k, l) == S(*R(k, l))


def test_all_maps_count_d3():
    # |SL(2,Z_3)| = 24, times 2 for det -1, times 9 translations
    assert sum(1 for _ in st.all_phase_space_maps(3)) == 24 * 2 * 9


@settings(max_examples=30, deadline=None)
@given(hst.integers(0, 2 ** 32 - 1))
def test_phase_space_apply_permutes_weights(seed):
    rng = np.random.default_rng(seed)
    s = st.SimplexState(3, rng.dirichlet(np.ones(9)).reshape(3, 3))
    maps = list(st.all_phase_space_maps(3))
    m = maps[rng.integers(len(maps))]
    t = st.phase_space_apply(s, m)
    assert np.allclose(np.sort(t.c.ravel()), np.sort(s.c.ravel()))


# --- state lookup ---------------------------------------------------------

@pytest.mark.parametrize("spec,size", [
    ("isotropic:3,0.2", 9), ("werner:0.5", 4), ("bell:psi-", 4), ("gbell:3,1,2", 9),
    ("slice2:0.1,0.2", 9), ("slice3-line:0.1,0.1,0.1", 9), ("slice3-offline:0.1,0,0.1", 9),
    ("psi_mv", 9), ("line:3,0,1,1,0", 9),
])
def test_state_from_spec(spec, size):
    rho = st.state_from_spec(spec)
    assert rho.matrix.shape == (size, size)
    assert rho.is_valid()


def test_state_from_spec_errors():
    with pytest.raises(ValueError):
        st.state_from_spec("nonsense:1")
    with pytest.raises(ValueError):
        st.state_from_spec("werner:0.1,0.2")


def test_json_round_trip(tmp_path):
    rho = st.state_from_spec("slice2:0.2,0.1")
    path = tmp_path / "s.json"
    path.write_text(json.dumps(rho.to_json()))
    back = st.state_from_spec(str(path))
    assert back.dims == (3, 3)
    assert np.allclose(back.matrix, rho.matrix)


def test_density_matrix_checks():
    with pytest.raises(ValueError):
        st.DensityMatrix(np.eye(4))
    with pytest.raises(ValueError):
        st.DensityMatrix(np.eye(4) / 4, (2, 3))


def test_two_point_families_are_equivalent_d3():
    # every pair of distinct grid points can be moved onto (0, 0), (0, 1)
    d = 3
    maps = list(st.all_phase_space_maps(d))
    pts = list(itertools.product(range(d), repeat=2))
    for p, q in itertools.combinations(pts, 2):
        assert any({m(*p), m(*q)} == {(0, 0), (0, 1)} for m in maps)


@settings(max_examples=30, deadline=None)
@given(hst.integers(2, 4), hst.integers(0, 2 ** 32 - 1))
def test_simplex_points_give_states(d, seed):
    c = np.random.default_rng(seed).dirichlet(np.ones(d * d)).reshape(d, d)
    rho = st.SimplexState(d, c).density()
    assert rho.is_valid()
