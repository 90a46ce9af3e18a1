"""Parallel evaluation fabric: in-process pool and TCP broker-worker."""

from .broker import Broker, BrokerError, broker_serve
from .executors import (
    BrokerExecutor,
    PoolExecutor,
    SerialExecutor,
    TaskError,
    parse_executor,
    pmap,
    reduce,
)
from .protocol import (
    DEFAULT_MAX_FRAME,
    MESSAGE_TYPES,
    PROTOCOL_VERSION,
    ProtocolError,
    frame_decode,
    frame_encode,
)
from .worker import WorkerThread, worker_run

__all__ = [
    "Broker",
    "BrokerError",
    "BrokerExecutor",
    "DEFAULT_MAX_FRAME",
    "MESSAGE_TYPES",
    "PROTOCOL_VERSION",
    "PoolExecutor",
    "ProtocolError",
    "SerialExecutor",
    "TaskError",
    "WorkerThread",
    "broker_serve",
    "frame_decode",
    "frame_encode",
    "parse_executor",
    "pmap",
    "reduce",
    "worker_run",
]
