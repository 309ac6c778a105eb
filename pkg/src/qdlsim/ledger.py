"""Digest-linked block chain carried over teleported qubits.

Each block commits to (index, payload, previous digest, timestamp) through a
64-bit FNV-1a digest. The digest travels as 64 basis-encoded qubits: bit i of
the digest, most significant first, becomes |0> or |1>. Appending a block
sends those qubits through a transport (the teleportation cascade by
default); the receiving side decodes, recomputes the digest from the block
header, and rejects on any disagreement. A qubit that arrives off the
computational basis axis is itself evidence of tampering or decoherence and
fails the decode outright.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import teleport
from .qstate import Ket

FNV1A64_OFFSET_BASIS = 0xCBF29CE484222325
FNV1A64_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1

DIGEST_BITS = 64

# amplitude magnitude above this counts as "present" when reading a basis qubit
BASIS_DECODE_ATOL = 1e-9


class TamperError(Exception):
    """A transported block failed verification on the receiving side."""


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a: xor each byte into the hash, then multiply by the prime."""
    h = FNV1A64_OFFSET_BASIS
    for byte in data:
        h = ((h ^ byte) * FNV1A64_PRIME) & _MASK64
    return h


def block_digest(index: int, payload: bytes, prev_digest: int, timestamp: int) -> int:
    """Digest over the canonical byte layout:

    index (8 bytes big-endian) || payload || prev_digest (8 bytes big-endian)
    || timestamp (8 bytes big-endian).
    """
    buf = (
        index.to_bytes(8, "big")
        + payload
        + prev_digest.to_bytes(8, "big")
        + timestamp.to_bytes(8, "big")
    )
    return fnv1a64(buf)


@dataclass(frozen=True)
class Block:
    index: int
    payload: bytes
    prev_digest: int
    digest: int
    timestamp: int

    def __post_init__(self):
        for name in ("index", "prev_digest", "digest", "timestamp"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 0:
                raise ValueError(f"{name} must be a non-negative integer")
        for name in ("prev_digest", "digest"):
            if getattr(self, name) > _MASK64:
                raise ValueError(f"{name} must fit in 64 bits")
        if not isinstance(self.payload, bytes):
            raise ValueError("payload must be bytes")


def make_block(index: int, payload: bytes, prev_digest: int, timestamp: int) -> Block:
    return Block(index, payload, prev_digest,
                 block_digest(index, payload, prev_digest, timestamp), timestamp)


def genesis_block() -> Block:
    return make_block(0, b"", 0, 0)


@dataclass(frozen=True, eq=False)
class Chain:
    blocks: tuple[Block, ...]

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        if not self.blocks:
            raise ValueError("a chain starts from its genesis block")

    @classmethod
    def genesis(cls) -> "Chain":
        return cls((genesis_block(),))

    @property
    def tip(self) -> Block:
        return self.blocks[-1]

    def __len__(self) -> int:
        return len(self.blocks)


@dataclass(frozen=True, eq=False)
class QuantumEncoding:
    """One basis-state qubit per digest bit, most significant bit first."""

    qubit_kets: tuple[Ket, ...]
    bit_count: int

    def __post_init__(self):
        object.__setattr__(self, "qubit_kets", tuple(self.qubit_kets))
        if len(self.qubit_kets) != self.bit_count:
            raise ValueError("qubit count must equal bit count")


@dataclass(frozen=True)
class VerificationReport:
    valid: bool
    first_bad_index: int | None


def qubits_required(n_classical_bits: int) -> int:
    """Qubits needed to index n distinct classical bit positions: ceil(log2 n).

    Exact in integer arithmetic, so it is trustworthy far beyond the float
    mantissa (a terabyte of bits needs 40, not 39 or 41).
    """
    if n_classical_bits < 1:
        raise ValueError("bit count must be positive")
    return max(1, (n_classical_bits - 1).bit_length())


_BIT_KETS = (Ket(1, [1.0, 0.0]), Ket(1, [0.0, 1.0]))


def encode_digest(digest: int, bit_count: int = DIGEST_BITS) -> QuantumEncoding:
    if not 0 <= digest < (1 << bit_count):
        raise ValueError(f"digest must fit in {bit_count} bits")
    kets = tuple(
        _BIT_KETS[(digest >> (bit_count - 1 - i)) & 1] for i in range(bit_count)
    )
    return QuantumEncoding(kets, bit_count)


def encode_block(block: Block) -> QuantumEncoding:
    return encode_digest(block.digest)


def decode_qubit(v: Ket, position: int = 0) -> int:
    """Read one basis-encoded bit; off-axis amplitudes are a tamper signal."""
    if v.num_qubits != 1:
        raise ValueError("decode expects single-qubit kets")
    a0, a1 = v.amplitudes
    zero_present = abs(a0) > BASIS_DECODE_ATOL
    one_present = abs(a1) > BASIS_DECODE_ATOL
    if zero_present and one_present:
        raise TamperError(
            f"qubit {position} is off the computational basis axis "
            f"(|a0|={abs(a0):.6f}, |a1|={abs(a1):.6f})"
        )
    if not zero_present and not one_present:
        raise TamperError(f"qubit {position} carries no amplitude")
    return 1 if one_present else 0


def decode_block(encoding: QuantumEncoding | Sequence[Ket]) -> int:
    """Reassemble the digest from its basis-encoded qubits (MSB first)."""
    kets = encoding.qubit_kets if isinstance(encoding, QuantumEncoding) else tuple(encoding)
    value = 0
    for i, v in enumerate(kets):
        value = (value << 1) | decode_qubit(v, i)
    return value


Transport = Callable[[list[Ket], np.random.Generator], list[Ket]]


def cascade_transport(kets: list[Ket], rng) -> list[Ket]:
    """Default transport: push each qubit through the teleportation cascade."""
    return [outcome.output_state for outcome in teleport.cascade(kets, rng)]


def append_block(chain: Chain, payload: bytes, transport: Transport, rng,
                 timestamp: int | None = None) -> Chain:
    """Extend the chain by one block whose digest survives the transport.

    The digest qubits are sent through ``transport`` (seeded by ``rng``); the
    received side is decoded and checked against a recomputation from the
    block header. Any disagreement raises TamperError and leaves the chain
    untouched.
    """
    tip = chain.tip
    ts = tip.timestamp + 1 if timestamp is None else timestamp
    if ts <= tip.timestamp:
        raise ValueError(f"timestamp {ts} does not advance past {tip.timestamp}")
    block = make_block(tip.index + 1, payload, tip.digest, ts)
    encoding = encode_block(block)
    received = transport(list(encoding.qubit_kets), np.random.default_rng(rng))
    if len(received) != encoding.bit_count:
        raise TamperError(
            f"transport returned {len(received)} qubits, expected {encoding.bit_count}"
        )
    received_digest = decode_block(received)
    if received_digest != block.digest:
        raise TamperError(
            f"digest mismatch after transport: sent {block.digest:016x}, "
            f"decoded {received_digest:016x}"
        )
    return Chain(chain.blocks + (block,))


def verify_chain(chain: Chain) -> VerificationReport:
    """Recheck every link: indices, previous-digest pointers, recomputed
    digests, and strictly increasing timestamps. Reports the first failure."""
    for i, block in enumerate(chain.blocks):
        if block.index != i:
            return VerificationReport(False, i)
        if i == 0:
            if block.prev_digest != 0:
                return VerificationReport(False, i)
        else:
            prev = chain.blocks[i - 1]
            if block.prev_digest != prev.digest:
                return VerificationReport(False, i)
            if block.timestamp <= prev.timestamp:
                return VerificationReport(False, i)
        if block_digest(block.index, block.payload, block.prev_digest,
                        block.timestamp) != block.digest:
            return VerificationReport(False, i)
    return VerificationReport(True, None)


# ---------------------------------------------------------------------------
# serialization


def block_to_json(block: Block) -> dict:
    return {
        "index": block.index,
        "payload": block.payload.hex(),
        "prev_digest": f"{block.prev_digest:016x}",
        "digest": f"{block.digest:016x}",
        "timestamp": block.timestamp,
    }


def block_from_json(data: dict) -> Block:
    return Block(
        int(data["index"]),
        bytes.fromhex(data["payload"]),
        int(data["prev_digest"], 16),
        int(data["digest"], 16),
        int(data["timestamp"]),
    )


def chain_to_json(chain: Chain) -> list[dict]:
    return [block_to_json(b) for b in chain.blocks]


def chain_from_json(data: Sequence[dict]) -> Chain:
    return Chain(tuple(block_from_json(d) for d in data))
