"""Scalability benchmarking of stream-processing workloads on a virtual-time mini engine."""

__version__ = "0.1.0"
