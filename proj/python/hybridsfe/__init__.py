"""Two-party secure evaluation split between an enclave and garbled circuits.

Every entry point runs both parties and the enclave in this process; the
seed fixes the key, the coins and any generated inputs.
"""

from ._hybridsfe import (
    AuthenticationError,
    CircuitError,
    Circuit,
    ConfigError,
    Error,
    ProtocolError,
    bench,
    bench_csv_header,
    database,
    database_plain,
    dijkstra,
    millionaires,
    millionaires_circuit,
    random_route_instance,
    road_graph,
)

__all__ = [
    "AuthenticationError",
    "CircuitError",
    "Circuit",
    "ConfigError",
    "Error",
    "ProtocolError",
    "bench",
    "bench_csv_header",
    "database",
    "database_plain",
    "dijkstra",
    "millionaires",
    "millionaires_circuit",
    "random_route_instance",
    "road_graph",
]
