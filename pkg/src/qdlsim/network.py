"""Two-node transfer protocol over split classical/quantum channels.

A scenario runs a sender and a receiver joined by a control channel (classical
records only) and a data channel (qubits only). Entangled pairs come from a
shared source; a registry tracks every live qubit so that halves of one pair
stay correlated no matter who holds them, and so that no qubit can be used
twice. Protocol flow per scenario:

  1. Verification round: k sacrificial pairs are distributed, the attacker
     gets a shot at each receiver-bound half, then both ends measure in a
     per-pair random common basis and compare. Any mismatch on a pair that
     should be perfectly correlated exposes an interceptor.
  2. Block transfers: for each payload the sender announces the block header
     on the control channel, teleports the 64 digest qubits one pair at a
     time (Bell measurement on the sender side, X/Z corrections on the
     receiver side), and appends only after the receiver's Ack. The receiver
     re-derives the digest from the header and rejects on any disagreement.

Everything is driven by one seeded generator and one monotonic event counter,
so a scenario is a pure function of its config.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import ledger
from .qstate import (
    HADAMARD,
    PAULI_X,
    PAULI_Z,
    Gate2x2,
    Ket,
    _fresh,
    apply_controlled_not,
    apply_gate,
    collapse,
    measure,
    outcome_distribution,
    phi_plus,
    psi_minus,
    tensor,
)

CHANNEL_CONTROL = "control"
CHANNEL_DATA = "data"
BASES = ("Z", "X")

MESSAGE_KINDS = (
    "EprReady",
    "BellOutcome",
    "AppendRequest",
    "Ack",
    "CheckRequest",
    "CheckReport",
)

# kets are immutable, so the source can hand out shared instances
_BELL_STATES = {"phi_plus": phi_plus(), "psi_minus": psi_minus()}


class SimulatorError(RuntimeError):
    """A protocol step violated the simulation's physical bookkeeping."""


class ConfigError(ValueError):
    """A scenario config is malformed; the message lists what is wrong."""


@dataclass(frozen=True)
class NodeId:
    label: str

    def __post_init__(self):
        if not self.label:
            raise ValueError("node label must be non-empty")


@dataclass(frozen=True)
class ChannelMessage:
    """One log entry. Control messages are purely classical; data messages
    carry at least one qubit handle."""

    channel: str
    sender: NodeId
    receiver: NodeId
    kind: str
    body: dict
    qubits: tuple[int, ...]
    event_time: int

    def __post_init__(self):
        if self.channel not in (CHANNEL_CONTROL, CHANNEL_DATA):
            raise ValueError(f"unknown channel {self.channel!r}")
        if self.kind not in MESSAGE_KINDS:
            raise ValueError(f"unknown message kind {self.kind!r}")
        object.__setattr__(self, "qubits", tuple(self.qubits))
        if self.channel == CHANNEL_CONTROL and self.qubits:
            raise ValueError("control messages carry no qubits")
        if self.channel == CHANNEL_DATA and not self.qubits:
            raise ValueError("data messages carry at least one qubit")


class QubitRegistry:
    """Tracks every live qubit as (system, position) so entangled halves stay
    one joint state. Measuring, taking, or intercepting a handle consumes it;
    touching a consumed or unknown handle is a SimulatorError. This is the
    no-cloning discipline: a qubit is used exactly once."""

    def __init__(self):
        self._systems: dict[int, Ket] = {}
        self._members: dict[int, list[int]] = {}
        self._location: dict[int, tuple[int, int]] = {}
        self._consumed: set[int] = set()
        self._next_handle = itertools.count(1)
        self._next_system = itertools.count(1)

    def new_system(self, state: Ket) -> tuple[int, ...]:
        """Register a fresh state; returns one handle per qubit."""
        handles = tuple(next(self._next_handle) for _ in range(state.num_qubits))
        sys_id = next(self._next_system)
        self._systems[sys_id] = state
        self._members[sys_id] = list(handles)
        for pos, h in enumerate(handles):
            self._location[h] = (sys_id, pos)
        return handles

    def new_qubit(self, state: Ket) -> int:
        if state.num_qubits != 1:
            raise ValueError("new_qubit expects a single-qubit state")
        return self.new_system(state)[0]

    def live_count(self) -> int:
        return len(self._location)

    def _require(self, handle: int) -> tuple[int, int]:
        if handle in self._consumed:
            raise SimulatorError(f"qubit handle {handle} already consumed")
        if handle not in self._location:
            raise SimulatorError(f"unknown qubit handle {handle}")
        return self._location[handle]

    def _retire(self, handle: int) -> None:
        del self._location[handle]
        self._consumed.add(handle)

    def _rehome(self, sys_id: int, keep: list[tuple[int, int]], state: Ket) -> None:
        """Move surviving members into a fresh system after a collapse."""
        del self._systems[sys_id]
        del self._members[sys_id]
        if not keep:
            return
        new_id = next(self._next_system)
        self._systems[new_id] = state
        self._members[new_id] = [h for _, h in keep]
        for pos, (_, h) in enumerate(keep):
            self._location[h] = (new_id, pos)

    def peek(self, handle: int) -> Ket:
        """Simulator-level view of a lone qubit; not a protocol capability."""
        sys_id, _ = self._require(handle)
        state = self._systems[sys_id]
        if state.num_qubits != 1:
            raise SimulatorError(
                f"qubit handle {handle} is entangled; it has no state of its own"
            )
        return state

    def take(self, handle: int) -> Ket:
        """Consume a lone qubit and hand its state to the holder."""
        state = self.peek(handle)
        sys_id, _ = self._location[handle]
        self._retire(handle)
        self._rehome(sys_id, [], state)
        return state

    def apply_single(self, handle: int, gate: Gate2x2) -> None:
        """In-place single-qubit gate (a correction); does not consume."""
        sys_id, pos = self._require(handle)
        self._systems[sys_id] = apply_gate(gate, pos, self._systems[sys_id])

    def measure(self, handle: int, basis: str, rng) -> int:
        """Measure one qubit in the Z or X basis, consuming its handle.

        Any entangled partner is collapsed onto the matching conditional state
        and keeps its own handle.
        """
        if basis not in BASES:
            raise ValueError(f"basis must be one of {BASES}, got {basis!r}")
        sys_id, pos = self._require(handle)
        state = self._systems[sys_id]
        work = apply_gate(HADAMARD, pos, state) if basis == "X" else state
        record, post = measure(work, (pos,), rng)
        bit = record.outcomes[0]
        # the measured qubit is gone; any partner keeps its conditional state,
        # sliced in the frame the projection actually happened in
        self._retire(handle)
        keep = [
            (p, h)
            for p, h in enumerate(self._members[sys_id])
            if h != handle and h in self._location
        ]
        if keep:
            n = post.num_qubits
            arr = post.amplitudes.reshape((2,) * n)
            sel: list = [slice(None)] * n
            sel[pos] = bit
            rest = np.asarray(arr[tuple(sel)]).reshape(-1)
            self._rehome(sys_id, keep, _fresh(n - 1, rest))
        else:
            self._rehome(sys_id, [], post)
        return bit

    def bell_measure(self, payload: Ket, handle: int, rng) -> tuple[int, int]:
        """Joint measurement of a local payload qubit against the handle's
        entangled half. Consumes the handle; the partner qubit (wherever it
        is) is left holding the payload up to the X/Z correction the two
        returned bits select.
        """
        if payload.num_qubits != 1:
            raise ValueError("bell_measure expects a single payload qubit")
        sys_id, pos = self._require(handle)
        joint = tensor(payload, self._systems[sys_id])
        own = pos + 1
        joint = apply_controlled_not(0, own, joint)
        joint = apply_gate(HADAMARD, 0, joint)
        record, post = measure(joint, (0, own), rng)
        m1, m2 = record.outcomes
        self._retire(handle)
        keep = [
            (p, h)
            for p, h in enumerate(self._members[sys_id])
            if h != handle and h in self._location
        ]
        if keep:
            n = post.num_qubits
            arr = post.amplitudes.reshape((2,) * n)
            sel: list = [slice(None)] * n
            sel[0] = m1
            sel[own] = m2
            rest = np.asarray(arr[tuple(sel)]).reshape(-1)
            self._rehome(sys_id, keep, _fresh(n - 2, rest))
        else:
            self._rehome(sys_id, [], post)
        return m1, m2


@dataclass
class EprSource:
    """Hands out fresh maximally entangled pairs until its budget runs dry."""

    pair_count: int
    state: str = "phi_plus"
    registry: QubitRegistry = field(default_factory=QubitRegistry)
    emitted: int = 0

    def __post_init__(self):
        if self.state not in _BELL_STATES:
            raise ValueError(
                f"state must be one of {sorted(_BELL_STATES)}, got {self.state!r}"
            )


@dataclass(frozen=True)
class EprPair:
    """Handles to the two halves of one distributed pair."""

    index: int
    registry: QubitRegistry
    sender_half: int
    receiver_half: int


def distribute_epr(source: EprSource, a: NodeId, b: NodeId) -> EprPair:
    """Emit one pair; ``a`` holds the first half, ``b`` the second."""
    if a.label == b.label:
        raise ValueError("a pair must be shared between two distinct nodes")
    if source.emitted >= source.pair_count:
        raise SimulatorError(
            f"entangled-pair source exhausted after {source.pair_count} pairs"
        )
    halves = source.registry.new_system(_BELL_STATES[source.state])
    index = source.emitted
    source.emitted += 1
    return EprPair(index, source.registry, halves[0], halves[1])


# ---------------------------------------------------------------------------
# attacker


@dataclass(frozen=True)
class AttackerConfig:
    active: bool = False
    intercept_basis: str = "Z"
    seed: int = 0

    def __post_init__(self):
        if self.intercept_basis not in BASES:
            raise ValueError(
                f"intercept basis must be one of {BASES}, got {self.intercept_basis!r}"
            )


_POST_MEASUREMENT = {
    ("Z", 0): Ket(1, [1.0, 0.0]),
    ("Z", 1): Ket(1, [0.0, 1.0]),
    ("X", 0): apply_gate(HADAMARD, 0, Ket(1, [1.0, 0.0])),
    ("X", 1): apply_gate(HADAMARD, 0, Ket(1, [0.0, 1.0])),
}


def basis_state_ket(bit: int, basis: str) -> Ket:
    """The post-measurement state an observer forwards for outcome ``bit``."""
    try:
        return _POST_MEASUREMENT[(basis, bit)]
    except KeyError:
        raise ValueError(f"no basis state for bit={bit!r} in basis {basis!r}") from None


class Attacker:
    """Intercept-resend adversary sitting on the data channel.

    Draws randomness from its own seeded generator, so an inactive attacker
    consumes nothing and the protocol stream is untouched.
    """

    def __init__(self, config: AttackerConfig, registry: QubitRegistry, rng=None):
        self.config = config
        self.registry = registry
        self.rng = np.random.default_rng(config.seed if rng is None else rng)
        self.intercepted_count = 0

    def intercept(self, handles: Iterable[int]) -> tuple[int, ...]:
        """Measure each in-flight qubit and forward the observed basis state."""
        out = []
        for h in handles:
            bit = self.registry.measure(h, self.config.intercept_basis, self.rng)
            out.append(
                self.registry.new_qubit(basis_state_ket(bit, self.config.intercept_basis))
            )
            self.intercepted_count += 1
        return tuple(out)


def intercept_resend(attacker: Attacker, msg: ChannelMessage) -> ChannelMessage:
    """Give the attacker its shot at a message in flight.

    Control messages and all traffic of an inactive attacker pass through
    unmodified (the very same object). Data-channel qubits are measured in the
    attacker's basis and replaced by the observed basis states.
    """
    if not attacker.config.active or msg.channel != CHANNEL_DATA:
        return msg
    return replace(msg, qubits=attacker.intercept(msg.qubits))


# ---------------------------------------------------------------------------
# verification round


@dataclass(frozen=True)
class CheckStatistics:
    pairs_tested: int
    mismatches: int
    detected: bool


@dataclass(frozen=True)
class CheckRoundResult:
    statistics: CheckStatistics
    bases: tuple[str, ...]
    sender_outcomes: tuple[int, ...]
    receiver_outcomes: tuple[int, ...]


def check_round(pairs: Sequence[EprPair], rng) -> CheckRoundResult:
    """Measure every pair in a random common basis and compare outcomes.

    The pairs are expected to be perfectly correlated, so any mismatch means
    somebody touched a half in flight.
    """
    if not pairs:
        raise SimulatorError("check round needs at least one distributed pair")
    gen = np.random.default_rng(rng)
    bases = tuple(BASES[int(gen.integers(2))] for _ in pairs)
    sender_bits = []
    receiver_bits = []
    for pair, basis in zip(pairs, bases):
        sender_bits.append(pair.registry.measure(pair.sender_half, basis, gen))
        receiver_bits.append(pair.registry.measure(pair.receiver_half, basis, gen))
    mismatches = sum(1 for s, r in zip(sender_bits, receiver_bits) if s != r)
    stats = CheckStatistics(len(pairs), mismatches, mismatches > 0)
    return CheckRoundResult(stats, bases, tuple(sender_bits), tuple(receiver_bits))


def exact_detection_probability(intercept_basis: str = "Z",
                                state: str = "phi_plus") -> float:
    """Probability that one verification pair exposes the attacker, by
    exhaustive enumeration of basis choices and measurement branches (no
    sampling anywhere)."""
    if intercept_basis not in BASES:
        raise ValueError(f"intercept basis must be one of {BASES}")
    pair = _BELL_STATES[state]
    detect = 0.0
    work = apply_gate(HADAMARD, 1, pair) if intercept_basis == "X" else pair
    for a_bits, p_att in outcome_distribution(work, (1,)).items():
        a_bit = int(a_bits)
        _, collapsed = collapse(work, (1,), (a_bit,))
        if intercept_basis == "X":
            collapsed = apply_gate(HADAMARD, 1, collapsed)
        resent = basis_state_ket(a_bit, intercept_basis)
        for check_basis in BASES:  # chosen with probability 1/2 each
            va = apply_gate(HADAMARD, 0, collapsed) if check_basis == "X" else collapsed
            vb = apply_gate(HADAMARD, 0, resent) if check_basis == "X" else resent
            dist_a = outcome_distribution(va, (0,))
            dist_b = outcome_distribution(vb, (0,))
            for sa, pa in dist_a.items():
                for sb, pb in dist_b.items():
                    if sa != sb:
                        detect += 0.5 * p_att * pa * pb
    return detect


def attack_study(check_pairs: int, runs: int, intercept_basis: str = "Z",
                 seed: int = 0) -> dict:
    """Compare the enumerated detection rate against seeded protocol runs.

    Each run distributes ``check_pairs`` fresh pairs through an active
    attacker and plays one verification round. Returns the exact per-pair
    probability, the implied per-run detection rate, and the empirical rate.
    """
    if check_pairs < 1:
        raise ValueError("check_pairs must be at least 1")
    if runs < 1:
        raise ValueError("runs must be at least 1")
    per_pair = exact_detection_probability(intercept_basis)
    expected = 1.0 - (1.0 - per_pair) ** check_pairs
    alice, bob = NodeId("alice"), NodeId("bob")
    detected_runs = 0
    for r in range(runs):
        registry = QubitRegistry()
        source = EprSource(check_pairs, registry=registry)
        attacker = Attacker(
            AttackerConfig(True, intercept_basis),
            registry,
            rng=np.random.default_rng((seed, r, 1)),
        )
        gen = np.random.default_rng((seed, r))
        pairs = []
        for _ in range(check_pairs):
            pair = distribute_epr(source, alice, bob)
            (new_half,) = attacker.intercept((pair.receiver_half,))
            pairs.append(replace(pair, receiver_half=new_half))
        if check_round(pairs, gen).statistics.detected:
            detected_runs += 1
    return {
        "check_pairs": check_pairs,
        "runs": runs,
        "intercept_basis": intercept_basis,
        "per_pair_detection_exact": per_pair,
        "expected_detection_rate": expected,
        "detected_runs": detected_runs,
        "empirical_detection_rate": detected_runs / runs,
    }


# ---------------------------------------------------------------------------
# scenario


@dataclass(frozen=True)
class ScenarioConfig:
    nodes: tuple[str, str]
    payloads: tuple[bytes, ...]
    check_pairs: int
    attacker: AttackerConfig
    seed: int


@dataclass(frozen=True)
class TransferReport:
    """Receiver-side verdict on one teleported block digest."""

    block_index: int
    qubit_count: int
    min_fidelity: float
    accepted: bool
    reason: str


@dataclass(frozen=True, eq=False)
class ScenarioResult:
    nodes: tuple[str, str]
    final_chains: dict[str, ledger.Chain]
    events: tuple[ChannelMessage, ...]
    check_statistics: CheckStatistics
    transfers: tuple[TransferReport, ...]

    def __post_init__(self):
        times = [m.event_time for m in self.events]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("event log times must be strictly increasing")

    @property
    def tamper_detected(self) -> bool:
        return self.check_statistics.detected or any(
            not t.accepted for t in self.transfers
        )


def parse_scenario_config(raw: Mapping) -> ScenarioConfig:
    """Validate a raw scenario mapping, reporting every missing field at once."""
    if not isinstance(raw, Mapping):
        raise ConfigError("scenario config must be a JSON object")
    missing = [k for k in ("nodes", "payloads", "check_pairs", "seed") if k not in raw]
    if missing:
        raise ConfigError(f"missing config fields: {', '.join(missing)}")
    nodes = raw["nodes"]
    if (not isinstance(nodes, Sequence) or isinstance(nodes, (str, bytes))
            or len(nodes) != 2 or not all(isinstance(n, str) and n for n in nodes)
            or nodes[0] == nodes[1]):
        raise ConfigError("nodes must be two distinct non-empty labels")
    payloads = []
    for i, item in enumerate(raw["payloads"]):
        try:
            payloads.append(bytes.fromhex(item))
        except (TypeError, ValueError):
            raise ConfigError(f"payloads[{i}] is not a hex string: {item!r}") from None
    check_pairs = raw["check_pairs"]
    if not isinstance(check_pairs, int) or isinstance(check_pairs, bool) or check_pairs < 0:
        raise ConfigError("check_pairs must be a non-negative integer")
    seed = raw["seed"]
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ConfigError("seed must be an integer")
    attacker_raw = raw.get("attacker", {})
    if not isinstance(attacker_raw, Mapping):
        raise ConfigError("attacker must be an object")
    try:
        attacker = AttackerConfig(
            active=bool(attacker_raw.get("active", False)),
            intercept_basis=attacker_raw.get("basis", "Z"),
            seed=int(attacker_raw.get("seed", 0)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad attacker config: {exc}") from None
    return ScenarioConfig(
        (nodes[0], nodes[1]), tuple(payloads), check_pairs, attacker, seed
    )


def run_scenario(config: ScenarioConfig | Mapping, seed: int | None = None) -> ScenarioResult:
    """Play one full scenario: verification round, then block transfers.

    Deterministic given the config and seed (the config's seed unless
    overridden). The sender commits a block only after the receiver's Ack, so
    an undisturbed run leaves both chains identical.
    """
    if not isinstance(config, ScenarioConfig):
        config = parse_scenario_config(config)
    gen = np.random.default_rng(config.seed if seed is None else seed)
    sender_node = NodeId(config.nodes[0])
    receiver_node = NodeId(config.nodes[1])
    registry = QubitRegistry()
    attacker = Attacker(config.attacker, registry)
    pair_budget = config.check_pairs + ledger.DIGEST_BITS * len(config.payloads)
    source = EprSource(max(pair_budget, 1), registry=registry)
    clock = itertools.count(1)  # genesis holds timestamp 0
    events: list[ChannelMessage] = []

    def send(channel, origin, destination, kind, body, qubits=()):
        msg = ChannelMessage(channel, origin, destination, kind, dict(body),
                             tuple(qubits), next(clock))
        msg = intercept_resend(attacker, msg)
        events.append(msg)
        return msg

    sender_chain = ledger.Chain.genesis()
    receiver_chain = ledger.Chain.genesis()
    transfers: list[TransferReport] = []

    # -- verification round ------------------------------------------------
    if config.check_pairs > 0:
        pairs = []
        for i in range(config.check_pairs):
            pair = distribute_epr(source, sender_node, receiver_node)
            msg = send(CHANNEL_DATA, sender_node, receiver_node, "EprReady",
                       {"purpose": "check", "pair_index": i}, (pair.receiver_half,))
            pairs.append(replace(pair, receiver_half=msg.qubits[0]))
        round_result = check_round(pairs, gen)
        send(CHANNEL_CONTROL, sender_node, receiver_node, "CheckRequest",
             {"bases": list(round_result.bases)})
        send(CHANNEL_CONTROL, receiver_node, sender_node, "CheckReport",
             {"outcomes": list(round_result.receiver_outcomes)})
        stats = round_result.statistics
    else:
        stats = CheckStatistics(0, 0, False)

    # -- block transfers (skipped outright if the check already fired) ------
    if not stats.detected:
        for payload in config.payloads:
            tip = sender_chain.tip
            block = ledger.make_block(tip.index + 1, payload, tip.digest, next(clock))
            send(CHANNEL_CONTROL, sender_node, receiver_node, "AppendRequest",
                 ledger.block_to_json(block))
            encoding = ledger.encode_block(block)
            received_handles = []
            fidelities = []
            for j, qk in enumerate(encoding.qubit_kets):
                pair = distribute_epr(source, sender_node, receiver_node)
                msg = send(CHANNEL_DATA, sender_node, receiver_node, "EprReady",
                           {"purpose": "block", "block_index": block.index,
                            "qubit_index": j}, (pair.receiver_half,))
                held = msg.qubits[0]
                m1, m2 = registry.bell_measure(qk, pair.sender_half, gen)
                send(CHANNEL_CONTROL, sender_node, receiver_node, "BellOutcome",
                     {"block_index": block.index, "qubit_index": j,
                      "m1": m1, "m2": m2})
                if m2:
                    registry.apply_single(held, PAULI_X)
                if m1:
                    registry.apply_single(held, PAULI_Z)
                arrived = registry.peek(held)
                fidelities.append(
                    float(abs(np.vdot(qk.amplitudes, arrived.amplitudes)) ** 2)
                )
                received_handles.append(held)

            # receiver-side verdict: decode, recompute, check the link
            received = [registry.take(h) for h in received_handles]
            header_digest = ledger.block_digest(block.index, payload,
                                                block.prev_digest, block.timestamp)
            rtip = receiver_chain.tip
            try:
                decoded = ledger.decode_block(received)
            except ledger.TamperError:
                accepted, reason = False, "non_basis_qubit"
            else:
                if decoded != header_digest or header_digest != block.digest:
                    accepted, reason = False, "digest_mismatch"
                elif (block.prev_digest != rtip.digest
                      or block.index != rtip.index + 1
                      or block.timestamp <= rtip.timestamp):
                    accepted, reason = False, "link_mismatch"
                else:
                    accepted, reason = True, "ok"
            send(CHANNEL_CONTROL, receiver_node, sender_node, "Ack",
                 {"block_index": block.index, "ok": accepted, "reason": reason})
            transfers.append(TransferReport(block.index, encoding.bit_count,
                                            min(fidelities), accepted, reason))
            if not accepted:
                break  # sender never commits an unacknowledged block
            receiver_chain = ledger.Chain(receiver_chain.blocks + (block,))
            sender_chain = ledger.Chain(sender_chain.blocks + (block,))

    return ScenarioResult(
        config.nodes,
        {config.nodes[0]: sender_chain, config.nodes[1]: receiver_chain},
        tuple(events),
        stats,
        tuple(transfers),
    )


# ---------------------------------------------------------------------------
# serialization


def message_to_json(msg: ChannelMessage) -> dict:
    return {
        "event_time": msg.event_time,
        "channel": msg.channel,
        "sender": msg.sender.label,
        "receiver": msg.receiver.label,
        "kind": msg.kind,
        "body": msg.body,
        "qubits": list(msg.qubits),
    }


def event_log_lines(events: Sequence[ChannelMessage]) -> list[str]:
    """One compact JSON object per message, fields in a fixed order."""
    return [json.dumps(message_to_json(m), separators=(",", ":")) for m in events]


def check_statistics_to_json(stats: CheckStatistics) -> dict:
    return {
        "pairs_tested": stats.pairs_tested,
        "mismatches": stats.mismatches,
        "detected": stats.detected,
    }


def scenario_result_to_json(result: ScenarioResult) -> dict:
    sender_label, receiver_label = result.nodes
    receiver_chain = result.final_chains[receiver_label]
    chains_equal = (
        ledger.chain_to_json(result.final_chains[sender_label])
        == ledger.chain_to_json(receiver_chain)
    )
    return {
        "nodes": list(result.nodes),
        "check_statistics": check_statistics_to_json(result.check_statistics),
        "transfers": [
            {
                "block_index": t.block_index,
                "qubit_count": t.qubit_count,
                "min_fidelity": t.min_fidelity,
                "accepted": t.accepted,
                "reason": t.reason,
            }
            for t in result.transfers
        ],
        "tamper_detected": result.tamper_detected,
        "chains_equal": chains_equal,
        "receiver_chain_valid": ledger.verify_chain(receiver_chain).valid,
        "final_chains": {
            label: ledger.chain_to_json(chain)
            for label, chain in result.final_chains.items()
        },
        "events": [message_to_json(m) for m in result.events],
    }
