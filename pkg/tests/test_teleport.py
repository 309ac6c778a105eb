"""Teleport pipeline: canonical structure, dense oracle, measured protocol."""

import itertools

import numpy as np
import pytest

from qdlsim.qstate import (
    HADAMARD,
    IDENTITY,
    Ket,
    basis_ket,
    collapse,
    ket,
    qubit,
    random_qubit,
    tensor,
)
from qdlsim.teleport import (
    CANONICAL_STEP_COUNT,
    CnotStep,
    StageOperator,
    TeleportPipeline,
    apply_corrections,
    build_canonical_pipeline,
    cascade,
    conditioned_output_branches,
    pipeline_stats,
    run_measured,
    run_unitary,
    trace_to_json,
    verify_factorization,
)

C = np.sqrt(0.5)

# independent dense forms of every step, assembled from scratch
_I2 = np.eye(2)
_H2 = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)


def _oracle_cnot(control: int, target: int) -> np.ndarray:
    mat = np.zeros((8, 8))
    for col in range(8):
        bits = [(col >> 2) & 1, (col >> 1) & 1, col & 1]
        if bits[control]:
            bits[target] ^= 1
        mat[(bits[0] << 2) | (bits[1] << 1) | bits[2], col] = 1.0
    return mat


def _oracle_steps() -> list[np.ndarray]:
    return [
        np.eye(8),
        np.kron(np.kron(_I2, _H2), _I2),
        _oracle_cnot(1, 2),
        np.eye(8),
        _oracle_cnot(0, 1),
        np.kron(np.kron(_H2, _I2), _I2),
        np.eye(8),
        np.eye(8),
        np.eye(8),
        np.kron(np.kron(_I2, _I2), _H2),
    ]


# ---------------------------------------------------------------------------
# pipeline structure


def test_canonical_pipeline_has_ten_steps():
    steps = build_canonical_pipeline().steps
    assert len(steps) == CANONICAL_STEP_COUNT
    assert [s.stage_index for s in steps] == list(range(1, 11))


def test_canonical_step_types_and_wiring():
    steps = build_canonical_pipeline().steps
    assert isinstance(steps[2], CnotStep)
    assert (steps[2].control, steps[2].target) == (1, 2)
    assert isinstance(steps[4], CnotStep)
    assert (steps[4].control, steps[4].target) == (0, 1)
    for i in (0, 3, 6, 7, 8):
        assert all(f is IDENTITY for f in steps[i].factors)


def test_step_two_dense_first_row():
    dense = build_canonical_pipeline().steps[1].dense()
    np.testing.assert_array_equal(dense[0], [C, 0, C, 0, 0, 0, 0, 0])


def test_step_ten_rotates_only_the_output_slot():
    step = build_canonical_pipeline().steps[9]
    assert step.factors == (IDENTITY, IDENTITY, HADAMARD)
    exact_h = np.array([[C, C], [C, -C]])
    np.testing.assert_array_equal(
        step.dense(), np.kron(np.kron(_I2, _I2), exact_h)
    )


def test_every_step_matches_independent_dense_form():
    steps = build_canonical_pipeline().steps
    for step, expected in zip(steps, _oracle_steps()):
        np.testing.assert_allclose(step.dense(), expected, atol=1e-15)


def test_cnot_step_rejects_equal_wires():
    with pytest.raises(ValueError, match="differ"):
        CnotStep(1, 1)


def test_pipeline_rejects_narrow_steps():
    with pytest.raises(ValueError, match="three-qubit"):
        TeleportPipeline((StageOperator((IDENTITY, HADAMARD)),))


# ---------------------------------------------------------------------------
# bookkeeping


def test_canonical_stats():
    stats = pipeline_stats(build_canonical_pipeline())
    assert stats.stage_operator_count == 10
    assert stats.factor_matrix_count == 30
    assert stats.intermediate_vector_count == 9
    assert stats.total_matrix_count == 39


def test_stats_single_step():
    stats = pipeline_stats(TeleportPipeline((StageOperator((IDENTITY,) * 3),)))
    assert stats.factor_matrix_count == 3
    assert stats.intermediate_vector_count == 0
    assert stats.total_matrix_count == 3


def test_stats_two_steps_counts_one_intermediate():
    pipeline = TeleportPipeline(
        (StageOperator((IDENTITY,) * 3), CnotStep(0, 1))
    )
    stats = pipeline_stats(pipeline)
    assert stats.factor_matrix_count == 6
    assert stats.intermediate_vector_count == 1
    assert stats.total_matrix_count == 7


# ---------------------------------------------------------------------------
# unitary pass


def test_first_stage_is_exact_input_embedding():
    g = qubit(0.6, 0.8)
    trace = run_unitary(build_canonical_pipeline(), g)
    assert np.array_equal(trace.stages[0].amplitudes, tensor(g, basis_ket(2, 0)).amplitudes)


def test_stage_two_output_for_basis_payload():
    trace = run_unitary(build_canonical_pipeline(), qubit(1, 0))
    np.testing.assert_array_equal(trace.stages[1].amplitudes, [C, 0, C, 0, 0, 0, 0, 0])


def test_full_trace_matches_dense_oracle():
    pipeline = build_canonical_pipeline()
    mats = _oracle_steps()
    for g in [qubit(1, 0), qubit(0, 1), qubit(0.6, 0.8), random_qubit(7)]:
        trace = run_unitary(pipeline, g)
        v = np.kron(g.amplitudes, [1, 0, 0, 0]).astype(np.complex128)
        for stage, mat in zip(trace.stages, mats):
            v = mat @ v
            assert np.max(np.abs(stage.amplitudes - v)) < 1e-12


def test_unitary_pass_preserves_norm():
    trace = run_unitary(build_canonical_pipeline(), random_qubit(21))
    for stage in trace.stages:
        assert abs(stage.norm - 1.0) < 1e-12


def test_pipeline_is_linear_in_the_payload():
    pipeline = build_canonical_pipeline()
    alpha, beta = 0.6, 0.8j
    final_0 = run_unitary(pipeline, qubit(1, 0)).stages[-1].amplitudes
    final_1 = run_unitary(pipeline, qubit(0, 1)).stages[-1].amplitudes
    final_g = run_unitary(pipeline, qubit(alpha, beta)).stages[-1].amplitudes
    assert np.max(np.abs(final_g - (alpha * final_0 + beta * final_1))) < 1e-12


def test_run_unitary_rejects_bad_payloads():
    with pytest.raises(ValueError, match="single qubit"):
        run_unitary(build_canonical_pipeline(), basis_ket(2, 0))
    with pytest.raises(ValueError, match="normalized"):
        run_unitary(build_canonical_pipeline(), qubit(1, 1))


# ---------------------------------------------------------------------------
# measured protocol


def test_teleport_basis_payloads_exactly():
    # output may carry a global phase, so compare magnitudes plus fidelity
    for seed in range(8):
        out = run_measured(qubit(1, 0), seed)
        assert out.fidelity_vs_input == 1.0
        np.testing.assert_allclose(np.abs(out.output_state.amplitudes), [1, 0], atol=1e-12)
        out = run_measured(qubit(0, 1), seed)
        assert out.fidelity_vs_input == 1.0
        np.testing.assert_allclose(np.abs(out.output_state.amplitudes), [0, 1], atol=1e-12)


def test_teleport_random_payloads_hit_unit_fidelity():
    for seed in range(25):
        g = random_qubit(seed)
        out = run_measured(g, seed + 1000)
        assert out.fidelity_vs_input >= 1.0 - 1e-9


def test_measurement_outcomes_are_uniform():
    # every (m1, m2) pattern carries exactly probability 1/4
    g = qubit(0.6, 0.8)
    seen = set()
    for seed in range(40):
        out = run_measured(g, seed)
        assert out.record.probability == 0.25
        seen.add(out.record.outcomes)
    assert seen == {(0, 0), (0, 1), (1, 0), (1, 1)}


def test_correction_labels_follow_the_classical_bits():
    expected = {
        (0, 0): (),
        (0, 1): ("X",),
        (1, 0): ("Z",),
        (1, 1): ("X", "Z"),
    }
    seen = {}
    for seed in range(60):
        out = run_measured(qubit(0.6, 0.8), seed)
        seen[out.record.outcomes] = out.corrections
    assert seen == expected


def test_apply_corrections_order_is_x_then_z():
    v, labels = apply_corrections(qubit(0.6, 0.8), 1, 1)
    assert labels == ("X", "Z")
    np.testing.assert_allclose(v.amplitudes, [0.8, -0.6], atol=1e-12)


def test_run_measured_is_seed_deterministic():
    a = run_measured(qubit(0.6, 0.8), 99)
    b = run_measured(qubit(0.6, 0.8), 99)
    assert a.record.outcomes == b.record.outcomes
    np.testing.assert_array_equal(a.output_state.amplitudes, b.output_state.amplitudes)


def test_run_measured_event_clock():
    out = run_measured(qubit(1, 0), 0)
    assert (out.epr_created_at, out.measured_at) == (0, 1)
    clock = itertools.count(5)
    out = run_measured(qubit(1, 0), 0, clock)
    assert (out.epr_created_at, out.measured_at) == (5, 6)


# ---------------------------------------------------------------------------
# factorization of the final stage


def test_factorization_holds_for_basis_payload():
    g = qubit(1, 0)
    report = verify_factorization(run_unitary(build_canonical_pipeline(), g), g)
    assert report.holds
    assert report.trace_distance < 1e-12
    assert report.remnant.num_qubits == 2


def test_factorization_holds_for_random_payloads():
    pipeline = build_canonical_pipeline()
    for seed in range(5):
        g = random_qubit(seed)
        report = verify_factorization(run_unitary(pipeline, g), g)
        assert report.holds
        assert report.trace_distance < 1e-9


def test_factorization_fails_when_a_stage_is_corrupted():
    # replace the stage-6 payload rotation with a hold: protocol breaks
    steps = list(build_canonical_pipeline().steps)
    steps[5] = StageOperator((IDENTITY, IDENTITY, IDENTITY), 6)
    g = qubit(0.6, 0.8)
    report = verify_factorization(run_unitary(TeleportPipeline(tuple(steps)), g), g)
    assert not report.holds
    assert report.trace_distance > 0.1


def test_branch_probabilities_and_outputs():
    g = random_qubit(13)
    trace = run_unitary(build_canonical_pipeline(), g)
    branches = conditioned_output_branches(trace)
    assert len(branches) == 4
    assert abs(sum(p for _, _, p, _ in branches) - 1.0) < 1e-12
    for _, _, prob, phi in branches:
        assert abs(prob - 0.25) < 1e-12
        assert abs(abs(np.vdot(g.amplitudes, phi.amplitudes)) ** 2 - 1.0) < 1e-9


def test_branch_conditioning_agrees_with_direct_collapse():
    # oracle: collapse the pre-measurement form (stage 9) directly, correct,
    # and compare with the stage-10 path that has to undo the output rotation
    g = random_qubit(29)
    trace = run_unitary(build_canonical_pipeline(), g)
    pre = trace.stages[8]
    for m1, m2, prob, phi in conditioned_output_branches(trace):
        p, post = collapse(pre, (0, 1), (m1, m2))
        assert abs(p - prob) < 1e-12
        base = ((m1 << 1) | m2) << 1
        direct = Ket(1, post.amplitudes[base : base + 2])
        direct, _ = apply_corrections(direct, m1, m2)
        assert np.max(np.abs(direct.amplitudes - phi.amplitudes)) < 1e-12


def test_conditioning_requires_full_trace():
    short = TeleportPipeline(build_canonical_pipeline().steps[:4])
    trace = run_unitary(short, qubit(1, 0))
    with pytest.raises(ValueError, match="10-stage"):
        conditioned_output_branches(trace)


# ---------------------------------------------------------------------------
# cascade


def test_cascade_basis_payloads():
    outcomes = cascade([qubit(1, 0), qubit(0, 1), qubit(1, 0)], 5)
    assert [o.fidelity_vs_input for o in outcomes] == [1.0, 1.0, 1.0]


def test_cascade_random_payloads():
    blocks = [random_qubit(s) for s in range(10)]
    outcomes = cascade(blocks, 77)
    assert len(outcomes) == 10
    for o in outcomes:
        assert o.fidelity_vs_input >= 1.0 - 1e-9


def test_cascade_orders_pair_lifetimes():
    # pair i is created and consumed before pair i+1 exists
    outcomes = cascade([random_qubit(s) for s in range(6)], 3)
    for o in outcomes:
        assert o.epr_created_at < o.measured_at
    for prev, nxt in zip(outcomes, outcomes[1:]):
        assert prev.measured_at < nxt.epr_created_at


def test_cascade_empty_input():
    assert cascade([], 0) == []


# ---------------------------------------------------------------------------
# serialization


def test_trace_json_shape():
    trace = run_unitary(build_canonical_pipeline(), qubit(1, 0))
    data = trace_to_json(trace)
    assert len(data["stages"]) == 10
    assert data["stats"]["total_matrix_count"] == 39
    assert data["stages"][0]["num_qubits"] == 3
    assert data["stages"][0]["amplitudes"][0] == [1.0, 0.0]
