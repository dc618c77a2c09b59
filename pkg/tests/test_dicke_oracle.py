import itertools
import math

import numpy as np
import pytest

from srlab.dicke_oracle import (
    CollectiveObservables,
    DickeDensityMatrix,
    DickeLadder,
    OracleConfig,
    default_step,
    evolve,
    integrate,
    intensity_exact,
    liouvillian_apply,
    lowering_coefficient,
    spin_coherent_state,
)
from srlab.errors import ConvergenceError, InvariantViolationError, ValidationError
from srlab.meanfield import ModelParams

SM = np.array([[0.0, 0.0], [1.0, 0.0]])  # |g><e| in the (|e>, |g>) basis
SZ = np.diag([1.0, -1.0])


def full_space_operators(n):
    def embed(op, site):
        mats = [np.eye(2)] * n
        mats[site] = op
        out = mats[0]
        for m in mats[1:]:
            out = np.kron(out, m)
        return out

    jm = sum(embed(SM, s) for s in range(n))
    jz = 0.5 * sum(embed(SZ, s) for s in range(n))
    return jz, jm


def symmetric_isometry(n):
    """Columns are the symmetric Dicke states, first column fully excited."""
    v = np.zeros((2**n, n + 1))
    for bits in itertools.product((0, 1), repeat=n):  # 0 = excited
        index = int("".join(map(str, bits)), 2)
        k = n - sum(bits)
        v[index, n - k] = 1.0
    return v / np.linalg.norm(v, axis=0)


def full_space_liouvillian(rho, jz, jm, omega, gamma0):
    jp = jm.T
    pp = jp @ jm
    return -1j * omega * (jz @ rho - rho @ jz) - 0.5 * gamma0 * (
        pp @ rho + rho @ pp - 2 * jm @ rho @ jp
    )


def random_density(dim, rng):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


class TestLoweringCoefficient:
    def test_single_qubit(self):
        assert lowering_coefficient(0.5, 0.5) == 1.0

    def test_spin_one(self):
        assert lowering_coefficient(1.0, 0.0) == pytest.approx(math.sqrt(2), rel=1e-15)

    @pytest.mark.parametrize("j", [0.5, 1.0, 3.5, 50.0])
    def test_bottom_rung(self, j):
        assert lowering_coefficient(j, -j) == 0.0

    def test_rejects_out_of_range(self):
        with pytest.raises(ValidationError):
            lowering_coefficient(1.0, 1.5)

    def test_ladder_matches_scalar(self):
        ladder = DickeLadder.build(7)
        for i, m in enumerate(ladder.m[:-1]):
            assert ladder.lowering[i] == pytest.approx(lowering_coefficient(3.5, m), rel=1e-15)


class TestSpinCoherentState:
    def test_fully_excited(self):
        rho = spin_coherent_state(5, 1.0).entries
        expected = np.zeros((6, 6))
        expected[0, 0] = 1.0
        np.testing.assert_array_equal(rho, expected)

    def test_two_atoms_half(self):
        rho = spin_coherent_state(2, 0.5).entries
        amps = np.sqrt(np.real(np.diag(rho)))
        np.testing.assert_allclose(amps, [0.5, 1 / math.sqrt(2), 0.5], atol=1e-15)

    @pytest.mark.parametrize("n", [1, 4, 30, 512])
    def test_mean_field_initial_state(self, n):
        p0 = n / (n + 1)
        rho = spin_coherent_state(n, p0).entries
        ladder = DickeLadder.build(n)
        assert np.real(np.trace(rho)) == pytest.approx(1.0, abs=1e-12)
        jz = float(np.real(np.dot(ladder.m, np.diag(rho))))
        assert jz == pytest.approx(n * (p0 - 0.5), abs=1e-10 * n)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_matches_tensor_power(self, n):
        p0, phase = 0.37, 0.8
        psi = np.array([math.sqrt(p0) * np.exp(1j * phase), math.sqrt(1 - p0)])
        full = psi
        for _ in range(n - 1):
            full = np.kron(full, psi)
        v = symmetric_isometry(n)
        rho = spin_coherent_state(n, p0, phase).entries
        np.testing.assert_allclose(v @ rho @ v.T, np.outer(full, full.conj()), atol=1e-14)

    def test_rejects(self):
        with pytest.raises(ValidationError):
            spin_coherent_state(3, 1.5)
        with pytest.raises(ValidationError):
            spin_coherent_state(513, 0.5)


def config(n, gamma0=1.0, omega=1.0, **kw):
    p = ModelParams(n, gamma0, omega)
    kw.setdefault("t_end", 1.0)
    kw.setdefault("step", default_step(p))
    return OracleConfig(params=p, **kw)


class TestLiouvillian:
    def test_ground_state_is_stationary(self):
        n = 6
        rho = np.zeros((n + 1, n + 1), dtype=complex)
        rho[-1, -1] = 1.0
        out = liouvillian_apply(DickeDensityMatrix(n, rho), config(n)).entries
        assert np.max(np.abs(out)) == 0.0

    @pytest.mark.parametrize("rates", [(0.0, 0.0), (0.3, 0.0), (0.0, 0.2), (0.1, 0.4)])
    def test_traceless_and_hermitian(self, rates):
        rng = np.random.default_rng(7)
        n = 9
        rho = DickeDensityMatrix(n, random_density(n + 1, rng))
        cfg = config(n, 0.7, 1.3, local_decay_rate=rates[0], local_dephasing_rate=rates[1])
        out = liouvillian_apply(rho, cfg).entries
        assert abs(np.trace(out)) < 1e-12
        assert np.max(np.abs(out - out.conj().T)) < 1e-12

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_matches_full_space(self, n):
        rng = np.random.default_rng(n)
        jz, jm = full_space_operators(n)
        v = symmetric_isometry(n)
        rho = random_density(n + 1, rng)
        omega, gamma0 = 1.7, 0.6
        ladder_out = liouvillian_apply(DickeDensityMatrix(n, rho), config(n, gamma0, omega)).entries
        full_out = full_space_liouvillian(v @ rho @ v.T, jz, jm, omega, gamma0)
        np.testing.assert_allclose(v @ ladder_out @ v.T, full_out, atol=1e-12)

    def test_single_qubit_decay_rate(self):
        rho = spin_coherent_state(1, 0.8, 0.3)
        out = liouvillian_apply(rho, config(1, gamma0=2.5)).entries
        assert out[0, 0].real == pytest.approx(-2.5 * 0.8, rel=1e-14)

    def test_local_noise_on_single_atom(self):
        # for one atom local decay is ordinary amplitude damping
        rho = spin_coherent_state(1, 0.6, 0.2)
        split = liouvillian_apply(rho, config(1, gamma0=1.0, local_decay_rate=0.5)).entries
        merged = liouvillian_apply(rho, config(1, gamma0=1.5)).entries
        np.testing.assert_allclose(split, merged, atol=1e-15)
        base = liouvillian_apply(rho, config(1, gamma0=1.0)).entries
        dephased = liouvillian_apply(rho, config(1, gamma0=1.0, local_dephasing_rate=0.3)).entries
        diff = dephased - base
        assert diff[0, 1] == pytest.approx(-0.3 * rho.entries[0, 1], abs=1e-15)
        assert diff[0, 0] == 0.0


def trajectory(cfg, gate=False):
    obs = evolve(cfg, gate=gate)
    return np.array([o.time for o in obs]), obs


class TestEvolve:
    def test_single_qubit_amplitude_damping(self):
        cfg = config(1, t_end=5.0, initial_p0=1.0, record_every=1)
        t, obs = trajectory(cfg, gate=True)
        jpjm = np.array([o.jpjm_mean for o in obs])
        assert np.max(np.abs(jpjm - np.exp(-t))) < 1e-8

    def test_single_qubit_coherence_decay(self):
        p0, omega, gamma0 = 0.3, 2.0, 0.5
        cfg = config(1, gamma0, omega, t_end=4.0, initial_p0=p0, record_every=5)
        t, obs = trajectory(cfg)
        sp = np.array([o.jplus_mean for o in obs])
        expected = math.sqrt(p0 * (1 - p0)) * np.exp((1j * omega - gamma0 / 2) * t)
        assert np.max(np.abs(sp - expected)) < 1e-8

    def test_invariants_along_run(self):
        n = 20
        p = ModelParams(n, 1.0, 1.0)
        cfg = OracleConfig(p, t_end=p.t_delay + 8 / n, step=default_step(p), record_every=20)
        records, final = integrate(cfg)
        final.check()
        jz = np.array([r.jz_mean for r in records])
        assert np.all(np.diff(jz) <= 1e-12)
        assert np.all(np.abs(jz) <= n / 2 + 1e-8)
        assert min(r.jpjm_mean for r in records) >= -1e-8

    def test_positivity_at_checkpoints(self):
        n = 12
        p = ModelParams(n, 1.0, 1.0)
        rho = None
        for t_end in (0.05, 0.15, 0.4):
            cfg = OracleConfig(p, t_end=t_end, step=default_step(p))
            _, rho = integrate(cfg)
            assert rho.min_eigenvalue() > -1e-8
            assert rho.hermiticity_error() < 1e-10
            assert abs(rho.trace() - 1) < 1e-8

    def test_rk4_order(self):
        n = 20
        p = ModelParams(n, 1.0, 1.0)
        t_end = p.t_delay + 2 / n
        base = 0.1 / n
        finals = []
        for k in (1, 2, 4, 8):
            cfg = OracleConfig(p, t_end=t_end, step=base / k, record_every=10**6)
            _, rho = integrate(cfg)
            finals.append(rho.entries)
        e1 = np.max(np.abs(finals[0] - finals[3]))
        e2 = np.max(np.abs(finals[1] - finals[3]))
        assert math.log2(e1 / e2) >= 3.8

    def test_step_guard(self):
        with pytest.raises(ValidationError):
            evolve(config(20, step=0.11 / 20))

    def test_too_many_atoms(self):
        with pytest.raises(ValidationError):
            config(513)

    def test_convergence_gate(self):
        # N*omega*step = 2 leaves RK4 visibly under-resolved
        cfg = config(20, gamma0=1.0, omega=20.0, t_end=0.5, step=0.005)
        with pytest.raises(ConvergenceError):
            evolve(cfg)

    def test_trace_drift_detected(self):
        cfg = config(2, t_end=0.1)
        bad = DickeDensityMatrix(2, 1.1 * spin_coherent_state(2, 0.5).entries)
        with pytest.raises(InvariantViolationError):
            integrate(cfg, bad)

    def test_deterministic(self):
        cfg = config(10, t_end=0.3)
        a = evolve(cfg, gate=False)
        b = evolve(cfg, gate=False)
        assert a == b

    def test_recorded_grid(self):
        cfg = config(4, t_end=0.1, step=0.001, record_every=10)
        t, _ = trajectory(cfg)
        np.testing.assert_allclose(t, np.arange(11) * 0.01, atol=1e-15)

    def test_coherence_proxy_grows_with_n(self):
        proxies = []
        for n in (20, 50, 100):
            p = ModelParams(n, 1.0, 1.0)
            cfg = OracleConfig(p, t_end=p.t_delay + 2 / n, step=default_step(p), record_every=1)
            t, obs = trajectory(cfg)
            proxy = np.array([o.dipole_coherence(n) for o in obs])
            proxies.append(float(np.interp(p.t_delay, t, proxy)))
        assert proxies[0] < proxies[1] < proxies[2], proxies


class TestIntensityExact:
    def test_ground(self):
        obs = CollectiveObservables(0.0, -2.0, 0j, 0.0)
        assert intensity_exact(obs, ModelParams(4, 1.0)) == 0.0

    @pytest.mark.parametrize("n", [1, 5, 64])
    def test_fully_excited(self, n):
        p = ModelParams(n, 0.3, 2.0)
        cfg = OracleConfig(p, t_end=1e-9, step=1e-9, initial_p0=1.0)
        records, _ = integrate(cfg)
        assert intensity_exact(records[0], p) == pytest.approx(0.6 * n, rel=1e-13)

    @pytest.mark.parametrize("n", [10, 100, 400])
    def test_product_state_at_half_inversion(self, n):
        p = ModelParams(n, 1.0, 1.0)
        cfg = OracleConfig(p, t_end=1e-9, step=1e-9, initial_p0=0.5)
        records, _ = integrate(cfg)
        exact = n**2 / 4 + n / 4
        assert records[0].jpjm_mean == pytest.approx(exact, rel=1e-10)
        assert intensity_exact(records[0], p) / (n**2 / 4) == pytest.approx(1.0, abs=1.01 / n)
