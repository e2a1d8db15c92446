"""Bit-accurate, cycle-accounting models of the prover response y = r + n_v * s."""

from .common import (
    ARCHITECTURES,
    ConfigurationError,
    DatapathResult,
    TraceStep,
    Widths,
    format_trace,
    hybrid_latency_cycles,
    parallel_latency_cycles,
    serial_latency_cycles,
    stream_throughput,
)
from .kcm_hybrid import kcm_hybrid_respond
from .kcm_parallel import (
    KcmConfig,
    KcmTable,
    build_kcm_tables,
    kcm_parallel_respond,
    kcm_product,
)
from .serial import SerialConfig, serial_respond

__all__ = [
    "ARCHITECTURES",
    "ConfigurationError",
    "DatapathResult",
    "KcmConfig",
    "KcmTable",
    "SerialConfig",
    "TraceStep",
    "Widths",
    "build_kcm_tables",
    "format_trace",
    "hybrid_latency_cycles",
    "kcm_hybrid_respond",
    "kcm_parallel_respond",
    "kcm_product",
    "parallel_latency_cycles",
    "serial_latency_cycles",
    "serial_respond",
    "stream_throughput",
]
