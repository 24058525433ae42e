"""Turn raw IoT sensor streams into case-correlated event logs and process models."""

import json as _json

from ._procaware import ProcawareError, Service as _Service
from ._procaware import joint_changes, sax, simulate, xes_roundtrip
from ._procaware import run as _run

__all__ = ["ProcawareError", "Service", "joint_changes", "run", "sax", "simulate", "xes_roundtrip"]


def run(config, output_dir=None, window=None, depth=None, lenient=False):
    """Run the whole pipeline on a config file and return its results as a dict."""
    return _json.loads(_run(str(config), None if output_dir is None else str(output_dir), window, depth, lenient))


class Service:
    """The session API in-process: ``request`` takes the same routes as the HTTP server."""

    def __init__(self, config):
        self._service = _Service(str(config))

    def request(self, method, path, body=None, **query):
        if body is not None and not isinstance(body, str):
            body = _json.dumps(body)
        status, text, content_type = self._service.request(
            method, path, body or "", {k: str(v) for k, v in query.items()}
        )
        if content_type == "application/json":
            return status, _json.loads(text)
        return status, text
