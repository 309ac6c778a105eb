"""Request and response models for the HTTP service.

Field declaration order is the serialization order, which the CLI relies on
for byte-identical JSON across runs with the same seed.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field, model_validator


class HealthResponse(BaseModel):
    status: str
    version: str


class StatsResponse(BaseModel):
    stages: int
    factor_matrices: int
    intermediate_vectors: int
    total_matrices: int
    terabyte_bits: int
    terabyte_qubits: int


class SizingResponse(BaseModel):
    classical_bits: int
    qubits: int


class KetModel(BaseModel):
    num_qubits: int
    amplitudes: list[list[float]]  # [re, im] pairs


class StatsModel(BaseModel):
    stage_operator_count: int
    factor_matrix_count: int
    intermediate_vector_count: int
    total_matrix_count: int


class TraceModel(BaseModel):
    stages: list[KetModel]
    stats: StatsModel


class MeasurementModel(BaseModel):
    measured_qubits: list[int]
    outcomes: list[int]
    probability: float


class TeleportRequest(BaseModel):
    state: list[list[float]] | None = None  # two [re, im] pairs
    random_state: bool = False
    seed: int = 0

    @model_validator(mode="after")
    def _one_source(self):
        if (self.state is None) == (not self.random_state):
            raise ValueError("provide exactly one of state or random_state")
        if self.state is not None and (
            len(self.state) != 2 or any(len(a) != 2 for a in self.state)
        ):
            raise ValueError("state must be two [re, im] amplitude pairs")
        return self


class TeleportResponse(BaseModel):
    input_state: KetModel
    measurement: MeasurementModel
    corrections: list[str]
    output_state: KetModel
    fidelity: float
    epr_created_at: int
    measured_at: int
    trace: TraceModel


class AttackerModel(BaseModel):
    active: bool = False
    basis: Literal["Z", "X"] = "Z"
    seed: int = 0


class ScenarioRequest(BaseModel):
    nodes: list[str] = Field(default=["alice", "bob"])
    payloads: list[str]
    check_pairs: int = Field(default=8, ge=0)
    attacker: AttackerModel = Field(default_factory=AttackerModel)
    seed: int = 0


class CheckStatisticsModel(BaseModel):
    pairs_tested: int
    mismatches: int
    detected: bool


class TransferModel(BaseModel):
    block_index: int
    qubit_count: int
    min_fidelity: float
    accepted: bool
    reason: str


class BlockModel(BaseModel):
    index: int
    payload: str
    prev_digest: str
    digest: str
    timestamp: int


class EventModel(BaseModel):
    event_time: int
    channel: str
    sender: str
    receiver: str
    kind: str
    body: dict
    qubits: list[int]


class ScenarioResponse(BaseModel):
    nodes: list[str]
    check_statistics: CheckStatisticsModel
    transfers: list[TransferModel]
    tamper_detected: bool
    chains_equal: bool
    receiver_chain_valid: bool
    final_chains: dict[str, list[BlockModel]]
    events: list[EventModel]


class AttackStudyRequest(BaseModel):
    check_pairs: int = Field(default=16, ge=1)
    runs: int = Field(default=1000, ge=1)
    basis: Literal["Z", "X"] = "Z"
    seed: int = 0


class AttackStudyResponse(BaseModel):
    check_pairs: int
    runs: int
    intercept_basis: str
    per_pair_detection_exact: float
    expected_detection_rate: float
    detected_runs: int
    empirical_detection_rate: float


class ChainVerifyRequest(BaseModel):
    blocks: list[BlockModel]


class ChainVerifyResponse(BaseModel):
    valid: bool
    first_bad_index: int | None
