"""Desk-scale simulator of a quantum distributed ledger.

Four layers: dense state-vector mechanics (`qstate`), the ten-stage
teleportation pipeline (`teleport`), the digest-linked block chain carried
over teleported qubits (`ledger`), and the two-node transfer protocol with
entanglement verification and an intercept-resend attacker (`network`).
A FastAPI service (`service`) exposes the operations over HTTP and the CLI
(`cli`) is a thin client over it.
"""

__version__ = "0.1.0"
