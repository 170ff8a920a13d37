"""Python bindings for the TPF / brTPF server, clients and cache simulator."""

from ._brtpf import Dataset, Error, Server, gen_data, handle_request, oracle, query, replay

__all__ = ["Dataset", "Error", "Server", "gen_data", "handle_request", "oracle", "query", "replay"]
