import numpy as np
import pytest

from breatherlab.errors import (
    DimensionMismatchError,
    ValidationError,
    ZeroProbabilityError,
)
from breatherlab.qcond import (
    BipartiteDims,
    DensityMatrix,
    Projector,
    conditional_density,
    conditional_density_raw,
    conditional_expectation,
    conditional_probability,
    is_projector,
    matrix_from_dict,
    matrix_to_dict,
    partial_trace,
    validate,
)

rng = np.random.default_rng(42)


def random_density(dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def haar_state(dim):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    v /= np.linalg.norm(v)
    return np.outer(v, v.conj())


def bell_state():
    v = np.zeros(4)
    v[0] = v[3] = 1 / np.sqrt(2)
    return np.outer(v, v).astype(complex)


def ptrace_oracle(rho, d1, d2, keep_first):
    """Basis-bra sandwich oracle, independent of the einsum implementation."""
    out_dim = d1 if keep_first else d2
    out = np.zeros((out_dim, out_dim), dtype=complex)
    other = d2 if keep_first else d1
    for b in range(other):
        e = np.zeros((other, 1))
        e[b, 0] = 1.0
        bra = np.kron(np.eye(d1), e) if keep_first else np.kron(e, np.eye(d2))
        out += bra.conj().T @ rho @ bra
    return out


class TestPartialTrace:
    def test_product_state(self):
        r1, r2 = random_density(3), random_density(2)
        dims = BipartiteDims(3, 2)
        got = partial_trace(np.kron(r1, r2), dims, keep="first")
        assert np.max(np.abs(got.entries - r1)) < 1e-12
        got2 = partial_trace(np.kron(r1, r2), dims, keep="second")
        assert np.max(np.abs(got2.entries - r2)) < 1e-12

    def test_bell_state_against_oracle(self):
        rho = bell_state()
        dims = BipartiteDims(2, 2)
        got = partial_trace(rho, dims, keep="first").entries
        oracle = ptrace_oracle(rho, 2, 2, keep_first=True)
        assert np.max(np.abs(got - oracle)) < 1e-12
        assert np.max(np.abs(got - np.eye(2) / 2)) < 1e-12

    def test_trivial_factor(self):
        rho = random_density(4)
        got = partial_trace(rho, BipartiteDims(4, 1), keep="first")
        assert np.max(np.abs(got.entries - rho)) < 1e-14

    def test_random_against_oracle(self):
        for d1, d2 in [(2, 3), (3, 4), (4, 2)]:
            rho = random_density(d1 * d2)
            dims = BipartiteDims(d1, d2)
            for keep, flag in (("first", True), ("second", False)):
                got = partial_trace(rho, dims, keep=keep).entries
                assert np.max(np.abs(got - ptrace_oracle(rho, d1, d2, flag))) < 1e-12

    def test_trace_and_positivity_preserved(self):
        for _ in range(25):
            rho = random_density(6)
            out = partial_trace(rho, BipartiteDims(2, 3), keep="first")
            assert np.trace(out.entries).real == pytest.approx(1.0, abs=1e-12)
            assert np.min(np.linalg.eigvalsh(out.entries)) > -1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            partial_trace(random_density(5), BipartiteDims(2, 2), keep="first")


class TestConditionalDensity:
    def test_product_state_returns_subsystem(self):
        r1, r2 = random_density(3), random_density(2)
        p2 = haar_state(2)
        dims = BipartiteDims(3, 2)
        out = conditional_density(np.kron(r1, r2), p2, dims)
        assert np.max(np.abs(out.entries - r1)) < 1e-12

    def test_bell_state_projection(self):
        p0 = np.array([[1, 0], [0, 0]], dtype=complex)
        out = conditional_density(bell_state(), p0, BipartiteDims(2, 2))
        assert np.max(np.abs(out.entries - p0)) < 1e-12

    def test_zero_probability(self):
        rho = np.zeros((4, 4), dtype=complex)
        rho[0, 0] = 1.0  # |00><00|
        p1 = np.array([[0, 0], [0, 1]], dtype=complex)
        with pytest.raises(ZeroProbabilityError):
            conditional_density(rho, p1, BipartiteDims(2, 2))

    def test_random_sweep_validates_and_identities(self):
        for _ in range(120):
            d1, d2 = rng.integers(2, 5), rng.integers(2, 5)
            dims = BipartiteDims(int(d1), int(d2))
            rho = random_density(dims.d1 * dims.d2)
            p2 = haar_state(dims.d2)
            prob = conditional_probability(rho, p2, dims)
            if prob < 1e-6:
                continue
            out = conditional_density(rho, p2, dims)
            assert validate(out).is_valid
            # projecting first and re-conditioning is idempotent
            lifted = np.kron(np.eye(dims.d1), p2)
            projected = lifted @ rho @ lifted / prob
            again = conditional_density(projected, p2, dims)
            assert np.max(np.abs(again.entries - out.entries)) < 1e-12

    def test_unitary_invariance_on_subsystem_one(self):
        dims = BipartiteDims(3, 3)
        rho = random_density(9)
        p2 = haar_state(3)
        q, _ = np.linalg.qr(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
        big = np.kron(q, np.eye(3))
        lhs = conditional_density(big @ rho @ big.conj().T, p2, dims).entries
        rhs = q @ conditional_density(rho, p2, dims).entries @ q.conj().T
        assert np.max(np.abs(lhs - rhs)) < 1e-12

    def test_raw_form_matches_on_product_states(self):
        r1, r2 = random_density(2), random_density(3)
        p2 = haar_state(3)
        dims = BipartiteDims(2, 3)
        raw = conditional_density_raw(np.kron(r1, r2), p2, dims)
        sym = conditional_density(np.kron(r1, r2), p2, dims).entries
        assert np.max(np.abs(raw - sym)) < 1e-12

    def test_raw_form_coincides_for_projector_conditioning(self):
        # block-trace cyclicity: Tr(P rho_ij P) = Tr(P rho_ij) for any
        # projector, so the asymmetric form agrees with the sandwich on
        # every exactly-Hermitian input, including correlated ones
        dims = BipartiteDims(2, 2)
        rho = 0.6 * bell_state() + 0.4 * np.kron(haar_state(2), haar_state(2))
        rho /= np.trace(rho).real
        v = np.array([1.0, 1j]) / np.sqrt(2)
        p2 = np.outer(v, v.conj())
        raw = conditional_density_raw(rho, p2, dims)
        sym = conditional_density(rho, p2, dims).entries
        assert np.max(np.abs(raw - sym)) < 1e-12
        # rank-2 projector on a 3-level ancilla
        dims = BipartiteDims(2, 3)
        rho = random_density(6)
        q, _ = np.linalg.qr(rng.normal(size=(3, 2)) + 1j * rng.normal(size=(3, 2)))
        p2 = q @ q.conj().T
        raw = conditional_density_raw(rho, p2, dims)
        sym = conditional_density(rho, p2, dims).entries
        assert np.max(np.abs(raw - sym)) < 1e-12


class TestConditionalExpectation:
    def test_product_factorization(self):
        r1, r2 = random_density(3), random_density(2)
        p2 = haar_state(2)
        f = rng.normal(size=(3, 3))
        f = f + f.T
        dims = BipartiteDims(3, 2)
        got = conditional_expectation(np.kron(r1, r2), f, p2, dims)
        expected = np.trace(f @ r1).real * np.trace(p2 @ r2).real
        assert got == pytest.approx(expected, abs=1e-12)

    def test_identity_observable_gives_probability(self):
        rho = random_density(6)
        p2 = haar_state(3)
        dims = BipartiteDims(2, 3)
        got = conditional_expectation(rho, np.eye(2), p2, dims)
        assert got == pytest.approx(conditional_probability(rho, p2, dims), abs=1e-12)

    def test_bell_state_pauli_z(self):
        z = np.diag([1.0, -1.0])
        p0 = np.array([[1, 0], [0, 0]], dtype=complex)
        got = conditional_expectation(bell_state(), z, p0, BipartiteDims(2, 2))
        assert got == pytest.approx(0.5, abs=1e-12)

    def test_rejects_non_hermitian_observable(self):
        with pytest.raises(ValidationError):
            conditional_expectation(
                random_density(4), np.array([[0, 1], [0, 0]]), haar_state(2),
                BipartiteDims(2, 2),
            )


class TestValidate:
    def test_maximally_mixed(self):
        assert validate(np.eye(4) / 4).is_valid

    def test_negative_eigenvalue(self):
        report = validate(np.diag([1.2, -0.2]))
        assert not report.is_valid
        assert report.min_eigenvalue < -1e-3

    def test_haar_pure_state(self):
        rho = haar_state(5)
        assert validate(rho).is_valid
        assert is_projector(rho)

    def test_projector_type(self):
        with pytest.raises(ValidationError):
            Projector(dim=2, entries=np.array([[0.5, 0], [0, 0.5]]))
        p = Projector(dim=2, entries=np.array([[1.0, 0], [0, 0]]))
        assert is_projector(p)

    def test_density_matrix_create(self):
        dm = DensityMatrix.create(np.eye(3) / 3)
        assert dm.dim == 3
        with pytest.raises(ValidationError):
            DensityMatrix.create(np.diag([1.5, -0.5]))


def test_json_round_trip():
    rho = random_density(3)
    back = matrix_from_dict(matrix_to_dict(rho))
    assert np.max(np.abs(back - rho)) < 1e-15
