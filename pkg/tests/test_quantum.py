"""Monotone metrics, Choi tests, and the entangled-state dilation witness."""

import numpy as np
import pytest

import fisherflow as ff
import oracles
from fisherflow import MonotoneKind
from helpers import (
    random_density,
    random_interior,
    random_markovian,
    random_traceless_hermitian,
    random_zero_sum,
)

COUNTEREXAMPLE = np.array([[-1.0, -0.5], [1.0, 0.5]])
ALL_KINDS = (MonotoneKind.SLD, MonotoneKind.KMB, MonotoneKind.WY)


class TestChannelsAndChoi:
    def test_identity_choi_is_entangled_projector(self):
        c = ff.choi(ff.identity_channel(2))
        psi = np.eye(2).reshape(-1) / np.sqrt(2.0)
        assert np.allclose(c, np.outer(psi, psi.conj()), atol=1e-14)
        assert np.linalg.eigvalsh(c)[0] == pytest.approx(0.0, abs=1e-14)

    def test_depolarizing_choi_is_maximally_mixed(self):
        d = 3
        c = ff.choi(ff.depolarizing_channel(d, strength=1.0))
        assert np.allclose(c, np.eye(d * d) / d**2, atol=1e-14)
        assert ff.cp_check(ff.depolarizing_channel(d)).min_eigenvalue == pytest.approx(1.0 / d**2)

    def test_choi_matches_reshape_oracle(self):
        rng = np.random.default_rng(3)
        for d in (2, 3):
            k = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            op = ff.SuperOperator(matrix=np.kron(k, k.conj()), dim=d)
            got = ff.choi(op)
            want = oracles.choi_by_reshape(np.asarray(op.matrix), d)
            assert np.allclose(got, want, atol=1e-12)

    def test_euler_step_fails_cp_at_second_order(self):
        # asymmetric rates: the euler Choi picks up a -O(dt^2) eigenvalue,
        # so only the exact exponential step is safe to classify
        lind = ff.semiclassical_lindbladian({(0, 1): 0.5, (1, 0): 1.0}, 2)
        dt = 1e-3
        euler = ff.channel_step(lind, dt, mode="euler")
        exact = ff.channel_step(lind, dt, mode="exact")
        assert not ff.cp_check(euler, tol=1e-10).cp
        assert ff.cp_check(exact, tol=1e-10).cp

    def test_negative_rate_shows_in_choi(self):
        # min Choi eigenvalue of Id + dt L tracks dt * a / d for one negative rate
        d = 2
        a = -0.5
        lind = ff.semiclassical_lindbladian({(0, 1): a, (1, 0): 1.0}, d)
        dt = 1e-5
        euler = ff.channel_step(lind, dt, mode="euler")
        report = ff.cp_check(euler)
        assert not report.cp
        assert report.min_eigenvalue == pytest.approx(dt * a / d, rel=1e-3)

    def test_kraus_channel_is_cp(self):
        k0 = np.array([[1.0, 0.0], [0.0, np.sqrt(0.5)]])
        k1 = np.array([[0.0, np.sqrt(0.5)], [0.0, 0.0]])
        ch = ff.channel_from_kraus([k0, k1])
        assert ff.cp_check(ch).cp

    def test_compose_and_extend(self):
        d = 2
        ch = ff.dephasing_channel(d, keep=0.5)
        ident = ff.identity_channel(d)
        assert np.allclose(ff.compose(ch, ident).matrix, ch.matrix, atol=1e-14)
        lifted = ff.extend_with_identity(ch)
        assert lifted.dim == d * d


class TestPetzMetric:
    def test_diagonal_two_state_value(self):
        rho = np.diag([0.5, 0.5])
        drho = np.diag([0.01, -0.01])
        for kind in ALL_KINDS:
            assert ff.petz_metric(rho, drho, drho, kind) == pytest.approx(2e-4)

    def test_commuting_case_is_f_independent(self):
        rng = np.random.default_rng(7)
        p = random_interior(rng, 3)
        d = random_zero_sum(rng, 3, scale=1e-2)
        vals = [ff.petz_metric(np.diag(p), np.diag(d), np.diag(d), kind) for kind in ALL_KINDS]
        assert max(vals) - min(vals) <= 1e-12
        assert vals[0] == pytest.approx(ff.fisher_local_sq(p, d), abs=1e-14)

    def test_matches_kernel_oracle(self):
        rng = np.random.default_rng(11)
        for kind in ALL_KINDS:
            rho = random_density(rng, 3)
            a = random_traceless_hermitian(rng, 3)
            b = random_traceless_hermitian(rng, 3)
            vals, vecs = np.linalg.eigh(rho)
            at = vecs.conj().T @ a @ vecs
            bt = vecs.conj().T @ b @ vecs
            if kind is MonotoneKind.SLD:
                kernel = lambda x, y: 2.0 / (x + y)
            elif kind is MonotoneKind.WY:
                kernel = lambda x, y: 4.0 / (np.sqrt(x) + np.sqrt(y)) ** 2
            else:
                kernel = oracles.kmb_kernel
            want = oracles.petz_direct(vals, at, bt, kernel)
            assert ff.petz_metric(rho, a, b, kind) == pytest.approx(want, rel=1e-12)

    def test_kind_ordering_sld_smallest(self):
        # SLD is the minimal monotone metric, KMB dominates it
        rng = np.random.default_rng(13)
        rho = random_density(rng, 3)
        a = random_traceless_hermitian(rng, 3)
        sld = ff.petz_metric(rho, a, a, MonotoneKind.SLD)
        wy = ff.petz_metric(rho, a, a, MonotoneKind.WY)
        kmb = ff.petz_metric(rho, a, a, MonotoneKind.KMB)
        assert sld <= wy + 1e-15
        assert wy <= kmb + 1e-15

    def test_rank_deficient_rejected(self):
        with pytest.raises(ff.SingularBaseError):
            ff.petz_metric(np.diag([1.0, 0.0]), np.diag([0.1, -0.1]), np.diag([0.1, -0.1]))

    def test_kernel_positive_and_symmetric(self):
        xs = np.array([0.3, 0.7, 1.0])
        for kind in ALL_KINDS:
            k = ff.metric_kernel(kind, xs[:, None], xs[None, :])
            assert np.all(k > 0.0)
            assert np.allclose(k, k.T)
            # normalization at equal arguments: c_f(x, x) = 1 / x
            assert np.allclose(np.diag(k), 1.0 / xs)


class TestDiagCoherentSplit:
    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_cross_terms_vanish(self, kind):
        rng = np.random.default_rng(17)
        for d in (2, 3, 4):
            for _ in range(10):
                rho = random_density(rng, d)
                drho = random_traceless_hermitian(rng, d)
                assert ff.diag_decomposition_check(rho, drho, kind) <= 1e-12

    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_metric_is_additive_over_split(self, kind):
        rng = np.random.default_rng(19)
        for d in (2, 3, 4):
            rho = random_density(rng, d)
            drho = random_traceless_hermitian(rng, d)
            delta, coh = ff.diag_decomposition(rho, drho)
            total = ff.petz_metric(rho, drho, drho, kind)
            split = ff.petz_metric(rho, delta, delta, kind) + ff.petz_metric(rho, coh, coh, kind)
            assert abs(total - split) <= 1e-12

    def test_parts_recombine(self):
        rng = np.random.default_rng(23)
        rho = random_density(rng, 3)
        drho = random_traceless_hermitian(rng, 3)
        delta, coh = ff.diag_decomposition(rho, drho)
        assert np.allclose(delta + coh, drho, atol=1e-14)
        assert np.allclose(rho @ delta - delta @ rho, 0.0, atol=1e-12)


class TestSemiclassicalGenerator:
    def test_diagonal_action_is_classical_generator(self):
        lind = ff.semiclassical_lindbladian(COUNTEREXAMPLE, 2)
        assert np.allclose(ff.classical_action(lind), COUNTEREXAMPLE, atol=1e-14)

    def test_rate_map_input(self):
        lind = ff.semiclassical_lindbladian({(0, 1): -0.5, (1, 0): 1.0}, 2)
        assert np.allclose(ff.classical_action(lind), COUNTEREXAMPLE, atol=1e-14)

    def test_random_rate_matrices_round_trip(self):
        rng = np.random.default_rng(29)
        for _ in range(10):
            d = int(rng.integers(2, 5))
            r = random_markovian(rng, d)
            lind = ff.semiclassical_lindbladian(r, d)
            assert np.allclose(ff.classical_action(lind), r, atol=1e-12)

    def test_reduction_rate_matches_classical(self):
        lind = ff.semiclassical_lindbladian(np.array([[-1.0, 1.0], [1.0, -1.0]]), 2)
        dev = ff.commuting_reduction_rate_check(
            np.diag([0.5, 0.5]), np.diag([0.01, -0.01]), lind
        )
        assert dev <= 1e-8
        # the classical side of that comparison is the frozen -8e-4 fixture
        assert ff.fisher_rate([0.5, 0.5], [0.01, -0.01], [[-1.0, 1.0], [1.0, -1.0]]) == pytest.approx(-8e-4)

    def test_reduction_rate_random_instances(self):
        rng = np.random.default_rng(31)
        for _ in range(10):
            d = int(rng.integers(2, 5))
            r = random_markovian(rng, d)
            lind = ff.semiclassical_lindbladian(r, d)
            p = random_interior(rng, d)
            dvec = random_zero_sum(rng, d, scale=1e-2)
            dev = ff.commuting_reduction_rate_check(np.diag(p), np.diag(dvec), lind)
            assert dev <= 1e-6

    def test_zero_generator_zero_rate(self):
        lind = ff.semiclassical_lindbladian({}, 2)
        dev = ff.commuting_reduction_rate_check(np.diag([0.6, 0.4]), np.diag([0.01, -0.01]), lind)
        assert dev <= 1e-14

    def test_kind_agreement_on_diagonal_instances(self):
        lind = ff.semiclassical_lindbladian(COUNTEREXAMPLE, 2)
        devs = [
            ff.commuting_reduction_rate_check(
                np.diag([0.5, 0.5]), np.diag([0.01, -0.01]), lind, kind=kind
            )
            for kind in ALL_KINDS
        ]
        assert max(devs) <= 1e-8

    def test_off_diagonal_inputs_rejected(self):
        lind = ff.semiclassical_lindbladian(COUNTEREXAMPLE, 2)
        coherent = np.array([[0.5, 0.1], [0.1, 0.5]])
        with pytest.raises(ff.InvalidStateError):
            ff.commuting_reduction_rate_check(coherent, np.diag([0.01, -0.01]), lind)


class TestSpecialPoint:
    def test_classical_fixture(self):
        report = ff.special_point_check(np.diag([0.3, -0.2, -0.1]))
        assert report.target == pytest.approx(0.18)
        assert report.max_deviation <= 1e-10
        assert np.allclose(np.diag(report.base), [0.5, 1 / 3, 1 / 6])

    def test_coherent_fixture(self):
        drho = 0.1 * np.array([[0.0, 1.0], [1.0, 0.0]])
        report = ff.special_point_check(drho)
        assert report.target == pytest.approx(0.02)
        assert report.max_deviation <= 1e-10

    def test_unitary_invariance(self):
        rng = np.random.default_rng(37)
        drho = random_traceless_hermitian(rng, 3, scale=0.1)
        q, _ = np.linalg.qr(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))
        rotated = q @ drho @ q.conj().T
        a = ff.special_point_check(drho)
        b = ff.special_point_check(rotated)
        assert a.target == pytest.approx(b.target, rel=1e-12)
        assert a.max_deviation <= 1e-10 and b.max_deviation <= 1e-10

    def test_random_perturbations(self):
        rng = np.random.default_rng(41)
        for d in (2, 3, 4):
            for _ in range(5):
                report = ff.special_point_check(random_traceless_hermitian(rng, d, scale=0.2))
                assert report.max_deviation <= 1e-10

    def test_zero_rejected(self):
        with pytest.raises(ff.InvalidTangentError):
            ff.special_point_check(np.zeros((2, 2)))


class TestQuantumWitness:
    def _noncp_step(self, dt=1e-3):
        lind = ff.semiclassical_lindbladian({(0, 1): -0.5, (1, 0): 1.0}, 2)
        return ff.channel_step(lind, dt, mode="exact")

    def test_witness_found_on_noncp_step(self):
        report = ff.quantum_dilation_witness(self._noncp_step())
        assert report.found
        assert report.rate_value > 0.0
        assert report.stable
        assert report.choi_min_eigenvalue < 0.0

    def test_cp_step_not_applicable(self):
        lind = ff.semiclassical_lindbladian({(0, 1): 0.5, (1, 0): 1.0}, 2)
        step = ff.channel_step(lind, 1e-3, mode="exact")
        with pytest.raises(ff.WitnessNotApplicableError):
            ff.quantum_dilation_witness(step)

    def test_fd_estimate_agrees(self):
        step = self._noncp_step()
        report = ff.quantum_dilation_witness(step)
        fd = ff.quantum_witness_fd_rate(step, report)
        assert abs(fd - report.rate_value) / abs(report.rate_value) <= 0.10

    def test_all_kinds_witness(self):
        step = self._noncp_step()
        for kind in ALL_KINDS:
            report = ff.quantum_dilation_witness(step, kind=kind)
            assert report.found
            fd = ff.quantum_witness_fd_rate(step, report)
            assert abs(fd - report.rate_value) / abs(report.rate_value) <= 0.10

    def test_classical_generator_in_frame_has_negative_rate(self):
        report = ff.quantum_dilation_witness(self._noncp_step())
        gen = report.classical_generator
        assert gen[1, 0] < 0.0
        assert np.allclose(np.asarray(gen).sum(axis=0), 0.0, atol=1e-8)

    def test_eta_domain(self):
        with pytest.raises(ff.DomainError):
            ff.quantum_dilation_witness(self._noncp_step(), eta=0.7)

    def test_scaled_rate_stability(self):
        report = ff.quantum_dilation_witness(self._noncp_step())
        assert report.scaled_rate_half_eta == pytest.approx(report.scaled_rate, rel=0.2)


class TestCpClassification:
    def test_rate_sign_decides_cp(self):
        rng = np.random.default_rng(43)
        for trial in range(20):
            d = int(rng.integers(2, 4))
            if trial % 2 == 0:
                r = random_markovian(rng, d)
                markovian = True
            else:
                r = random_markovian(rng, d)
                i = int(rng.integers(d))
                j = int((i + 1) % d)
                r = r.copy()
                r[i, j] = -float(rng.uniform(0.05, 0.5))
                np.fill_diagonal(r, 0.0)
                np.fill_diagonal(r, -r.sum(axis=0))
                markovian = False
            lind = ff.semiclassical_lindbladian(r, d)
            step = ff.channel_step(lind, 1e-3, mode="exact")
            assert ff.cp_check(step, tol=1e-10).cp == markovian


class TestDephasingFilterReduction:
    def test_diagonal_action_reduces_to_classical_filter(self):
        pi, r = ff.single_negative_rate_example()
        report = ff.dephasing_filter_reduction_check(pi, r, eps1=0.1, eps2=0.3)
        assert report.action_defect <= 1e-12
        assert report.lambda_max_diagonal_sector < 0.0
