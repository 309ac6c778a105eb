"""FastAPI app wrapping the core simulator.

Thin adapters only: every endpoint parses a schema, calls one core operation,
and reshapes the result. Domain errors surface as 422 with the core message.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException, Query

import qdlsim
from .. import ledger, network, teleport
from ..qstate import Ket, ket_to_json, random_qubit
from . import schemas


def _ket_model(v: Ket) -> schemas.KetModel:
    return schemas.KetModel(**ket_to_json(v))


def _parse_request_state(req: schemas.TeleportRequest) -> Ket:
    if req.random_state:
        return random_qubit(req.seed)
    amps = [complex(re, im) for re, im in req.state]
    v = Ket(1, amps)
    if v.norm == 0.0:
        raise ValueError("state must be non-zero")
    return Ket(1, v.amplitudes / v.norm)


def create_app() -> FastAPI:
    app = FastAPI(title="qdlsim", version=qdlsim.__version__)

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return schemas.HealthResponse(status="ok", version=qdlsim.__version__)

    @app.get("/stats", response_model=schemas.StatsResponse)
    def stats():
        s = teleport.pipeline_stats(teleport.build_canonical_pipeline())
        terabyte = 10**12
        return schemas.StatsResponse(
            stages=s.stage_operator_count,
            factor_matrices=s.factor_matrix_count,
            intermediate_vectors=s.intermediate_vector_count,
            total_matrices=s.total_matrix_count,
            terabyte_bits=terabyte,
            terabyte_qubits=ledger.qubits_required(terabyte),
        )

    @app.get("/sizing", response_model=schemas.SizingResponse)
    def sizing(bits: int = Query(ge=1)):
        return schemas.SizingResponse(
            classical_bits=bits, qubits=ledger.qubits_required(bits)
        )

    @app.post("/teleport", response_model=schemas.TeleportResponse)
    def teleport_endpoint(req: schemas.TeleportRequest):
        try:
            g = _parse_request_state(req)
            outcome = teleport.run_measured(g, req.seed)
            trace = teleport.run_unitary(teleport.build_canonical_pipeline(), g)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        return schemas.TeleportResponse(
            input_state=_ket_model(g),
            measurement=schemas.MeasurementModel(
                measured_qubits=list(outcome.record.measured_qubits),
                outcomes=list(outcome.record.outcomes),
                probability=outcome.record.probability,
            ),
            corrections=list(outcome.corrections),
            output_state=_ket_model(outcome.output_state),
            fidelity=outcome.fidelity_vs_input,
            epr_created_at=outcome.epr_created_at,
            measured_at=outcome.measured_at,
            trace=schemas.TraceModel(**teleport.trace_to_json(trace)),
        )

    @app.post("/scenario", response_model=schemas.ScenarioResponse)
    def scenario(req: schemas.ScenarioRequest):
        raw = {
            "nodes": req.nodes,
            "payloads": req.payloads,
            "check_pairs": req.check_pairs,
            "attacker": {
                "active": req.attacker.active,
                "basis": req.attacker.basis,
                "seed": req.attacker.seed,
            },
            "seed": req.seed,
        }
        try:
            result = network.run_scenario(raw)
        except network.ConfigError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        return schemas.ScenarioResponse(**network.scenario_result_to_json(result))

    @app.post("/attack-study", response_model=schemas.AttackStudyResponse)
    def attack_study(req: schemas.AttackStudyRequest):
        report = network.attack_study(req.check_pairs, req.runs, req.basis, req.seed)
        return schemas.AttackStudyResponse(**report)

    @app.post("/chain/verify", response_model=schemas.ChainVerifyResponse)
    def chain_verify(req: schemas.ChainVerifyRequest):
        try:
            chain = ledger.chain_from_json([b.model_dump() for b in req.blocks])
        except (ValueError, KeyError) as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        report = ledger.verify_chain(chain)
        return schemas.ChainVerifyResponse(
            valid=report.valid, first_bad_index=report.first_bad_index
        )

    return app
