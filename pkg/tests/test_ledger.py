"""Block chain over basis-encoded digest qubits: hashing, codec, verification."""

import functools
import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qdlsim import teleport
from qdlsim.ledger import (
    DIGEST_BITS,
    FNV1A64_OFFSET_BASIS,
    FNV1A64_PRIME,
    Block,
    Chain,
    QuantumEncoding,
    TamperError,
    append_block,
    block_digest,
    block_from_json,
    block_to_json,
    cascade_transport,
    chain_from_json,
    chain_to_json,
    decode_block,
    decode_qubit,
    encode_block,
    encode_digest,
    fnv1a64,
    genesis_block,
    make_block,
    qubits_required,
    verify_chain,
)
from qdlsim.qstate import Ket, qubit


def _oracle_fnv(data: bytes) -> int:
    # independent formulation of the same hash
    step = lambda h, b: ((h ^ b) * 0x100000001B3) % (1 << 64)
    return functools.reduce(step, data, 0xCBF29CE484222325)


def _oracle_digest(index, payload, prev_digest, timestamp) -> int:
    buf = struct.pack(">Q", index) + payload
    buf += struct.pack(">Q", prev_digest) + struct.pack(">Q", timestamp)
    return _oracle_fnv(buf)


def _identity_transport(kets, rng):
    return kets


# ---------------------------------------------------------------------------
# hashing


def test_fnv_published_vectors():
    assert fnv1a64(b"") == 14695981039346656037
    assert fnv1a64(b"") == FNV1A64_OFFSET_BASIS
    assert fnv1a64(b"a") == 0xAF63DC4C8601EC8C
    assert fnv1a64(b"foobar") == 0x85944171F73967E8


def test_fnv_prime_value():
    assert FNV1A64_PRIME == 0x100000001B3


@given(st.binary(max_size=64))
@settings(max_examples=200)
def test_fnv_matches_independent_formulation(data):
    assert fnv1a64(data) == _oracle_fnv(data)


def test_block_digest_byte_layout():
    cases = [
        (0, b"", 0, 0),
        (1, b"hello", 14695981039346656037, 7),
        (12, b"\x00\xff", (1 << 64) - 1, 2**40),
    ]
    for index, payload, prev, ts in cases:
        assert block_digest(index, payload, prev, ts) == _oracle_digest(
            index, payload, prev, ts
        )


def test_digest_sensitive_to_every_field():
    base = block_digest(1, b"abc", 5, 9)
    assert block_digest(2, b"abc", 5, 9) != base
    assert block_digest(1, b"abd", 5, 9) != base
    assert block_digest(1, b"abc", 6, 9) != base
    assert block_digest(1, b"abc", 5, 10) != base


# ---------------------------------------------------------------------------
# blocks and chains


def test_genesis_block_shape():
    g = genesis_block()
    assert (g.index, g.payload, g.prev_digest, g.timestamp) == (0, b"", 0, 0)
    assert g.digest == block_digest(0, b"", 0, 0)


def test_make_block_computes_digest():
    b = make_block(3, b"xy", 17, 44)
    assert b.digest == block_digest(3, b"xy", 17, 44)


def test_block_field_validation():
    with pytest.raises(ValueError, match="non-negative"):
        Block(-1, b"", 0, 0, 0)
    with pytest.raises(ValueError, match="64 bits"):
        Block(0, b"", 0, 1 << 64, 0)
    with pytest.raises(ValueError, match="bytes"):
        Block(0, "text", 0, 0, 0)


def test_chain_requires_genesis():
    with pytest.raises(ValueError, match="genesis"):
        Chain(())
    chain = Chain.genesis()
    assert len(chain) == 1
    assert chain.tip.index == 0


# ---------------------------------------------------------------------------
# register sizing


def test_qubits_required_examples():
    assert qubits_required(10**12) == 40
    assert qubits_required(4) == 2
    assert qubits_required(1) == 1
    with pytest.raises(ValueError, match="positive"):
        qubits_required(0)


@given(st.integers(1, 62))
def test_qubits_required_powers_of_two(k):
    assert qubits_required(2**k) == k
    assert qubits_required(2**k + 1) == k + 1


@given(st.integers(1, 2**50))
@settings(max_examples=200)
def test_qubits_required_is_monotone_and_sufficient(n):
    q = qubits_required(n)
    assert 2**q >= n
    assert q == 1 or 2 ** (q - 1) < n
    assert qubits_required(n + 1) >= q


# ---------------------------------------------------------------------------
# basis encoding


def test_encode_zero_digest():
    enc = encode_digest(0)
    assert enc.bit_count == DIGEST_BITS
    assert len(enc.qubit_kets) == 64
    for v in enc.qubit_kets:
        np.testing.assert_array_equal(v.amplitudes, [1, 0])


def test_encode_low_bit_lands_last():
    enc = encode_digest(1)
    np.testing.assert_array_equal(enc.qubit_kets[-1].amplitudes, [0, 1])
    for v in enc.qubit_kets[:-1]:
        np.testing.assert_array_equal(v.amplitudes, [1, 0])


def test_encode_range_validation():
    with pytest.raises(ValueError, match="fit"):
        encode_digest(1 << 64)
    with pytest.raises(ValueError, match="fit"):
        encode_digest(-1)


def test_decode_reads_msb_first():
    assert decode_block([qubit(0, 1)] + [qubit(1, 0)] * 63) == 1 << 63


def test_decode_accepts_encoding_or_sequence():
    enc = encode_digest(0xDEADBEEF)
    assert decode_block(enc) == 0xDEADBEEF
    assert decode_block(list(enc.qubit_kets)) == 0xDEADBEEF


def test_decode_rejects_superposition():
    with pytest.raises(TamperError, match="off the computational basis"):
        decode_qubit(qubit(0.6, 0.8))


def test_decode_rejects_multi_qubit_ket():
    with pytest.raises(ValueError, match="single-qubit"):
        decode_qubit(Ket(2, [1, 0, 0, 0]))


def test_encoding_length_validation():
    with pytest.raises(ValueError, match="equal bit count"):
        QuantumEncoding((qubit(1, 0),), 2)


@given(st.integers(0, (1 << 64) - 1))
@settings(max_examples=200)
def test_encode_decode_round_trip(digest):
    assert decode_block(encode_digest(digest)) == digest


def test_encode_decode_bulk_and_edges():
    gen = np.random.default_rng(20260816)
    values = [0, 1, 1 << 63, (1 << 64) - 1]
    values += [int(x) for x in gen.integers(0, 1 << 64, size=10_000, dtype=np.uint64)]
    for digest in values:
        assert decode_block(encode_digest(digest)) == digest


# ---------------------------------------------------------------------------
# appending over a transport


def test_append_over_cascade_and_verify():
    chain = Chain.genesis()
    chain = append_block(chain, b"payload-1", cascade_transport, 11)
    assert len(chain) == 2
    assert chain.tip.index == 1
    assert chain.tip.prev_digest == chain.blocks[0].digest
    assert chain.tip.timestamp == 1
    report = verify_chain(chain)
    assert report.valid
    assert report.first_bad_index is None


def test_append_default_timestamp_increments():
    chain = Chain.genesis()
    chain = append_block(chain, b"a", _identity_transport, 0)
    chain = append_block(chain, b"b", _identity_transport, 0, timestamp=9)
    assert [b.timestamp for b in chain.blocks] == [0, 1, 9]
    with pytest.raises(ValueError, match="advance"):
        append_block(chain, b"c", _identity_transport, 0, timestamp=9)


def test_append_rejects_flipped_qubit():
    def flipping(kets, rng):
        out = list(kets)
        a0, a1 = out[-1].amplitudes
        out[-1] = Ket(1, [a1, a0])
        return out

    chain = Chain.genesis()
    with pytest.raises(TamperError, match="digest mismatch"):
        append_block(chain, b"x", flipping, 0)
    assert len(chain) == 1


def test_append_rejects_wrong_qubit_count():
    chain = Chain.genesis()
    with pytest.raises(TamperError, match="expected 64"):
        append_block(chain, b"x", lambda kets, rng: kets[:-1], 0)


def test_sequential_appends_teleport_every_digest_qubit_faithfully():
    fidelities = []

    def recording(kets, rng):
        outcomes = teleport.cascade(kets, rng)
        fidelities.extend(o.fidelity_vs_input for o in outcomes)
        return [o.output_state for o in outcomes]

    chain = Chain.genesis()
    for i in range(10):
        chain = append_block(chain, bytes([i]) * 3, recording, 1000 + i)
    assert len(chain) == 11
    assert len(fidelities) == 640
    assert min(fidelities) >= 1.0 - 1e-9
    assert verify_chain(chain).valid


# ---------------------------------------------------------------------------
# verification


def _build_chain(n_blocks: int) -> Chain:
    chain = Chain.genesis()
    for i in range(1, n_blocks):
        chain = append_block(chain, f"entry-{i}".encode(), _identity_transport, 0)
    return chain


def test_verify_accepts_untampered_chain():
    report = verify_chain(_build_chain(5))
    assert report.valid and report.first_bad_index is None


def test_verify_flags_mutated_payload():
    blocks = list(_build_chain(5).blocks)
    b = blocks[2]
    blocks[2] = Block(b.index, b"forged", b.prev_digest, b.digest, b.timestamp)
    report = verify_chain(Chain(tuple(blocks)))
    assert not report.valid
    assert report.first_bad_index == 2


def test_verify_flags_interior_deletion():
    blocks = list(_build_chain(5).blocks)
    del blocks[3]
    report = verify_chain(Chain(tuple(blocks)))
    assert not report.valid
    assert report.first_bad_index == 3


def test_verify_flags_recomputed_but_unlinked_block():
    # forged payload with a correctly recomputed digest still breaks the
    # next block's prev pointer
    blocks = list(_build_chain(5).blocks)
    b = blocks[2]
    blocks[2] = make_block(b.index, b"forged", b.prev_digest, b.timestamp)
    report = verify_chain(Chain(tuple(blocks)))
    assert not report.valid
    assert report.first_bad_index == 3


def test_verify_flags_bad_genesis_prev():
    g = genesis_block()
    bad = Block(0, b"", 7, block_digest(0, b"", 7, 0), 0)
    report = verify_chain(Chain((bad,)))
    assert not report.valid
    assert report.first_bad_index == 0
    assert verify_chain(Chain((g,))).valid


def test_verify_flags_stalled_timestamp():
    g = genesis_block()
    b1 = make_block(1, b"a", g.digest, 5)
    b2 = make_block(2, b"b", b1.digest, 5)
    report = verify_chain(Chain((g, b1, b2)))
    assert not report.valid
    assert report.first_bad_index == 2


def test_verify_flags_wrong_index():
    g = genesis_block()
    b1 = make_block(7, b"a", g.digest, 1)
    report = verify_chain(Chain((g, b1)))
    assert not report.valid
    assert report.first_bad_index == 1


# ---------------------------------------------------------------------------
# serialization


def test_block_json_round_trip_and_hex_case():
    b = make_block(2, b"\x01\xab", 0xDEADBEEF, 9)
    data = block_to_json(b)
    assert data["payload"] == "01ab"
    assert data["digest"] == f"{b.digest:016x}"
    assert data["digest"] == data["digest"].lower()
    assert len(data["prev_digest"]) == 16
    assert block_from_json(data) == b


def test_chain_json_round_trip():
    chain = _build_chain(4)
    back = chain_from_json(chain_to_json(chain))
    assert back.blocks == chain.blocks
    assert verify_chain(back).valid
