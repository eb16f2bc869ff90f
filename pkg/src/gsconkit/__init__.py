"""Ground-space traversal and streaming-proof embedding toolkit."""

__version__ = "0.1.0"

BIT_ORDER = "qubit0-msb"
