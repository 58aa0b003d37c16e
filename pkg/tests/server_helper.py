"""Run the HTTP service as a real subprocess for lifecycle tests."""

from __future__ import annotations

import socket
import subprocess
import sys
import time

import requests


def free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


class ServerProcess:
    def __init__(self, store_path, books_dir, port: int | None = None):
        self.store_path = str(store_path)
        self.books_dir = str(books_dir)
        self.port = port or free_port()
        self.proc: subprocess.Popen | None = None

    @property
    def base(self) -> str:
        return f"http://127.0.0.1:{self.port}"

    def start(self, timeout: float = 30.0) -> "ServerProcess":
        self.proc = subprocess.Popen(
            [
                sys.executable,
                "-m",
                "geobook.api.cli",
                "--store",
                self.store_path,
                "serve",
                "--port",
                str(self.port),
                "--books-dir",
                self.books_dir,
            ],
            stdout=subprocess.PIPE,
            stderr=subprocess.STDOUT,
        )
        deadline = time.time() + timeout
        while time.time() < deadline:
            if self.proc.poll() is not None:
                out = self.proc.stdout.read().decode() if self.proc.stdout else ""
                raise RuntimeError(f"server died on startup:\n{out}")
            try:
                r = requests.get(f"{self.base}/health", timeout=1)
                if r.ok:
                    return self
            except requests.ConnectionError:
                time.sleep(0.05)
        raise RuntimeError("server did not come up in time")

    def kill(self) -> None:
        """SIGKILL: simulates a crash with no shutdown hooks."""
        if self.proc and self.proc.poll() is None:
            self.proc.kill()
            self.proc.wait(timeout=10)

    def __enter__(self) -> "ServerProcess":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.kill()
