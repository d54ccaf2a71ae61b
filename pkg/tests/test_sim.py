"""Tests for protocol execution, measurement, transfers and verification."""

import numpy as np
import pytest

from qcorr.classical import PsdFactorization, synth_from_psd, validate_dist
from qcorr.errors import InvalidInput
from qcorr.linalg import (
    DensityMatrix,
    RegisterState,

    fidelity,
    partial_trace,
    schmidt_rank,
)
from qcorr.pure import PureState, q_eps
from qcorr.rand import random_pure_state, random_register_state
from qcorr.sim import (
    LocalChannel,
    ProtocolSpec,
    apply_protocol,
    measure_computational,
    protocol_from_purification,
    synth_pure_protocol,
    transfer_qubit,
    verify_generation,
)

EPR = PureState(2, 2, np.array([1, 0, 0, 1]) / np.sqrt(2))
SKEWED = PureState(2, 2, np.array([np.sqrt(0.9), 0, 0, np.sqrt(0.1)]))


def identity_epr_spec(eps: float = 0.0) -> ProtocolSpec:
    return ProtocolSpec(
        seed=EPR,
        seed_size_qubits=1,
        alice=LocalChannel.identity(2),
        bob=LocalChannel.identity(2),
        target=EPR.to_density(),
        eps=eps,
    )


def test_channel_requires_trace_preservation():
    with pytest.raises(InvalidInput):
        LocalChannel((np.array([[1.0, 0.0], [0.0, 0.5]]),))


def test_apply_protocol_identity_on_epr():
    out = apply_protocol(identity_epr_spec())
    np.testing.assert_allclose(out.mat, EPR.to_density().mat, atol=1e-12)


def test_apply_protocol_synthesized_pure_target():
    rng = np.random.default_rng(113)
    psi = random_pure_state(rng, 4, 4)
    spec = synth_pure_protocol(psi, 0.0)
    out = apply_protocol(spec)
    assert fidelity(out, psi.to_density()) >= 1 - 1e-9


def test_depolarizing_channel_preserves_maximally_mixed_reductions():
    p = 0.37
    kraus = (
        np.sqrt(1 - 3 * p / 4) * np.eye(2),
        np.sqrt(p / 4) * np.array([[0, 1], [1, 0]]),
        np.sqrt(p / 4) * np.array([[0, -1j], [1j, 0]]),
        np.sqrt(p / 4) * np.array([[1, 0], [0, -1]]),
    )
    spec = ProtocolSpec(
        seed=EPR,
        seed_size_qubits=1,
        alice=LocalChannel(kraus),
        bob=LocalChannel.identity(2),
        target=EPR.to_density(),
        eps=1.0,
    )
    out = apply_protocol(spec)
    assert abs(np.trace(out.mat).real - 1.0) <= 1e-9
    red_a = partial_trace(out, keep=[0])
    red_b = partial_trace(out, keep=[1])
    np.testing.assert_allclose(red_a.mat, np.eye(2) / 2, atol=1e-10)
    np.testing.assert_allclose(red_b.mat, np.eye(2) / 2, atol=1e-10)


def test_measure_computational_diagonal():
    rho = DensityMatrix(2, 2, np.diag([0.5, 0, 0, 0.5]))
    dist = measure_computational(rho)
    np.testing.assert_allclose(dist.p, [[0.5, 0], [0, 0.5]], atol=1e-12)


def test_measure_computational_discards_coherences():
    dist = measure_computational(EPR.to_density())
    np.testing.assert_allclose(dist.p, [[0.5, 0], [0, 0.5]], atol=1e-12)


def test_measure_matches_source_distribution():
    rng = np.random.default_rng(127)
    from qcorr.rand import random_psd_factorization

    dist, fact = random_psd_factorization(rng, 3, 2, 2)
    state = synth_from_psd(dist, fact)
    red = partial_trace(state, keep=[0, 3])
    measured = measure_computational(red)
    np.testing.assert_allclose(measured.p, dist.p, atol=1e-8)


def test_transfer_product_state():
    amps = np.zeros(4)
    amps[0] = 1.0
    state = RegisterState(amps, (2, 2), ("A", "B"))
    moved = transfer_qubit(state, 1, "B", "A")
    assert moved.sides == ("A", "A")
    assert schmidt_rank(moved) == 1


def test_transfer_epr_half_collapses_cut():
    state = EPR.to_registers()
    assert schmidt_rank(state) == 2
    moved = transfer_qubit(state, 1, "B", "A")
    assert schmidt_rank(moved) == 1
    np.testing.assert_array_equal(moved.amps, state.amps)


def test_transfer_rank_at_most_doubles():
    rng = np.random.default_rng(131)
    for _ in range(25):
        state = random_register_state(rng, (2,) * 6, ("A",) * 3 + ("B",) * 3)
        src = "A" if rng.integers(2) else "B"
        dst = "B" if src == "A" else "A"
        candidates = [i for i, s in enumerate(state.sides) if s == src]
        which = int(rng.choice(candidates))
        before = schmidt_rank(state)
        after = schmidt_rank(transfer_qubit(state, which, src, dst))
        assert after <= 2 * before


def test_transfer_validates_register():
    state = EPR.to_registers()
    with pytest.raises(InvalidInput):
        transfer_qubit(state, 0, "B", "A")  # register 0 is Alice's
    with pytest.raises(InvalidInput):
        transfer_qubit(RegisterState(np.ones(3) / np.sqrt(3), (3,), ("A",)),
                       0, "A", "B")  # not a qubit


def test_verify_exact_protocol():
    report = verify_generation(identity_epr_spec())
    assert report.passed
    assert report.fidelity >= 1 - 1e-9
    assert report.seed_size == 1


def test_verify_truncated_protocol_at_two_slacks():
    spec = synth_pure_protocol(SKEWED, 0.06)
    report = verify_generation(spec)
    assert report.passed
    assert abs(report.fidelity - np.sqrt(0.9)) <= 1e-9
    assert report.seed_size == 0

    strict = ProtocolSpec(
        seed=spec.seed,
        seed_size_qubits=spec.seed_size_qubits,
        alice=spec.alice,
        bob=spec.bob,
        target=spec.target,
        eps=0.01,
    )
    assert not verify_generation(strict).passed


def test_synth_pure_protocol_epr():
    spec = synth_pure_protocol(EPR, 0.0)
    assert spec.seed_size_qubits == 1
    assert isinstance(spec.seed, PureState)
    np.testing.assert_allclose(np.abs(spec.seed.amps),
                               np.abs(EPR.amps), atol=1e-10)
    assert verify_generation(spec).passed


def test_synth_pure_protocol_seed_size_matches_q_eps():
    rng = np.random.default_rng(137)
    for _ in range(5):
        psi = random_pure_state(rng, 5, 3)
        for eps in (0.0, 0.05, 0.2):
            spec = synth_pure_protocol(psi, eps)
            assert spec.seed_size_qubits == q_eps(psi, eps)
            assert verify_generation(spec).passed


def test_synth_pure_protocol_vacuous_target():
    psi = PureState(2, 2, [1, 0, 0, 0])
    spec = synth_pure_protocol(psi, 1.0)
    assert spec.seed_size_qubits == 0
    assert verify_generation(spec).passed


def test_protocol_from_purification_half_i2():
    half = validate_dist([[0.5, 0.0], [0.0, 0.5]])
    cs = tuple(np.diag([1.0 if x == i else 0.0 for i in range(2)]).astype(complex)
               for x in range(2))
    ds = tuple((0.5 * np.diag([1.0 if y == i else 0.0 for i in range(2)])).astype(complex)
               for y in range(2))
    state = synth_from_psd(half, PsdFactorization(r=2, cs=cs, ds=ds, residual=0.0))
    spec = protocol_from_purification(state)
    assert spec.seed_size_qubits == 1
    report = verify_generation(spec)
    assert report.passed
    out = apply_protocol(spec)
    np.testing.assert_allclose(out.mat, np.diag([0.5, 0, 0, 0.5]), atol=1e-8)


def test_protocol_spec_validates_seed_size():
    with pytest.raises(InvalidInput):
        ProtocolSpec(
            seed=EPR,
            seed_size_qubits=0,  # EPR needs 1
            alice=LocalChannel.identity(2),
            bob=LocalChannel.identity(2),
            target=EPR.to_density(),
            eps=0.0,
        )


def test_protocol_spec_validates_channel_dims():
    with pytest.raises(InvalidInput):
        ProtocolSpec(
            seed=EPR,
            seed_size_qubits=1,
            alice=LocalChannel.identity(3),
            bob=LocalChannel.identity(2),
            target=EPR.to_density(),
            eps=0.0,
        )


def test_random_channels_preserve_trace_and_positivity():
    rng = np.random.default_rng(139)
    for _ in range(10):
        d_in = int(rng.integers(2, 5))
        d_out = int(rng.integers(2, 5))
        n_kraus = int(rng.integers(1, 4))
        raw = [rng.standard_normal((d_out, d_in))
               + 1j * rng.standard_normal((d_out, d_in)) for _ in range(n_kraus)]
        total = sum(g.conj().T @ g for g in raw)
        vals, vecs = np.linalg.eigh(total)
        inv_root = (vecs * (1.0 / np.sqrt(vals))) @ vecs.conj().T
        channel = LocalChannel(tuple(g @ inv_root for g in raw))
        g = rng.standard_normal((d_in, d_in)) + 1j * rng.standard_normal((d_in, d_in))
        rho = g @ g.conj().T
        rho /= np.trace(rho).real
        out = channel.apply(rho)
        assert abs(np.trace(out).real - 1.0) <= 1e-9
        assert np.linalg.eigvalsh((out + out.conj().T) / 2)[0] >= -1e-9


def test_mixed_seed_protocol():
    # Classical shared randomness as a mixed seed: diag(1/2, 1/2) on A x B.
    seed = DensityMatrix(2, 2, np.diag([0.5, 0, 0, 0.5]))
    spec = ProtocolSpec(
        seed=seed,
        seed_size_qubits=1,
        alice=LocalChannel.identity(2),
        bob=LocalChannel.identity(2),
        target=seed,
        eps=0.0,
    )
    report = verify_generation(spec)
    assert report.passed
    assert report.fidelity >= 1 - 1e-9
