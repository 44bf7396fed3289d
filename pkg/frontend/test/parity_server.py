"""Serve the toy-record search service on an ephemeral port for UI parity tests.

Prints "READY <port>" once the port is chosen so the test runner knows where
to point the client, then blocks in uvicorn until killed.
"""

import socket
import sys
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parents[2]
sys.path.insert(0, str(REPO_ROOT))

import uvicorn

from refcase.service import CaseIndex
from refcase.service.app import create_app
from tests.helpers import toy_records


def free_port() -> int:
    with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


def main() -> None:
    port = free_port()
    app = create_app(index=CaseIndex(toy_records()))
    print(f"READY {port}", flush=True)
    uvicorn.run(app, host="127.0.0.1", port=port, log_level="error")


if __name__ == "__main__":
    main()
