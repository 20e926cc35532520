"""Live streaming service: newline-delimited JSON over TCP.

One loop thread owns the session and is its only writer. Client reader
threads parse lines and enqueue commands; the loop drains the queue at every
tick boundary, applies commands in arrival order, and fans decimated
snapshots out to subscribers through per-client outbound queues. Snapshots
handed out are immutable, so any number of read-only subscribers is safe.

An optional WebSocket bridge (for browsers, which cannot open raw TCP)
relays the same protocol: one JSON text frame per line.
"""

from __future__ import annotations

import json
import queue
import socket
import threading
import time

from .session import Session


def _encode(obj: dict) -> bytes:
    return (json.dumps(obj, separators=(",", ":")) + "\n").encode("utf-8")


class _Client:
    def __init__(self, sock: socket.socket, address):
        self.sock = sock
        self.address = address
        self.outbound: queue.Queue[dict | None] = queue.Queue()
        self.stride: int | None = None  # None = not subscribed
        self.alive = True

    def send(self, obj: dict) -> None:
        if self.alive:
            self.outbound.put(obj)

    def close(self) -> None:
        self.alive = False
        self.outbound.put(None)  # wake the writer
        try:
            self.sock.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        try:
            self.sock.close()
        except OSError:
            pass


class KnobServer:
    """Serves one Session to any number of concurrent protocol clients."""

    def __init__(
        self,
        session: Session,
        host: str = "127.0.0.1",
        port: int = 0,
        pace: bool = True,
    ):
        self.session = session
        self.host = host
        self._requested_port = port
        self.pace = pace
        self.port: int | None = None
        self._commands: queue.Queue[tuple[_Client, object]] = queue.Queue()
        self._clients: list[_Client] = []
        self._clients_lock = threading.Lock()
        self._stop = threading.Event()
        self._threads: list[threading.Thread] = []
        self._listener: socket.socket | None = None

    # -- lifecycle ----------------------------------------------------------

    def start(self) -> None:
        listener = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        listener.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        listener.bind((self.host, self._requested_port))
        listener.listen()
        self._listener = listener
        self.port = listener.getsockname()[1]
        for target in (self._accept_loop, self._tick_loop):
            t = threading.Thread(target=target, daemon=True)
            t.start()
            self._threads.append(t)

    def stop(self) -> None:
        self._stop.set()
        if self._listener is not None:
            try:
                self._listener.close()
            except OSError:
                pass
        with self._clients_lock:
            clients = list(self._clients)
        for client in clients:
            client.close()
        for t in self._threads:
            t.join(timeout=2.0)

    def serve_forever(self) -> None:
        self.start()
        try:
            while not self._stop.is_set():
                time.sleep(0.2)
        except KeyboardInterrupt:
            pass
        finally:
            self.stop()

    # -- threads ------------------------------------------------------------

    def _accept_loop(self) -> None:
        assert self._listener is not None
        while not self._stop.is_set():
            try:
                sock, address = self._listener.accept()
            except OSError:
                return
            sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
            client = _Client(sock, address)
            with self._clients_lock:
                self._clients.append(client)
            threading.Thread(
                target=self._read_loop, args=(client,), daemon=True
            ).start()
            threading.Thread(
                target=self._write_loop, args=(client,), daemon=True
            ).start()

    def _read_loop(self, client: _Client) -> None:
        try:
            reader = client.sock.makefile("r", encoding="utf-8", newline="\n")
            for line in reader:
                line = line.strip()
                if not line:
                    continue
                try:
                    msg = json.loads(line)
                except json.JSONDecodeError:
                    client.send({"type": "error", "code": "parse_error"})
                    continue
                self._commands.put((client, msg))
        except OSError:
            pass
        finally:
            self._drop(client)

    def _write_loop(self, client: _Client) -> None:
        try:
            while True:
                obj = client.outbound.get()
                if obj is None:
                    return
                client.sock.sendall(_encode(obj))
        except OSError:
            self._drop(client)

    def _drop(self, client: _Client) -> None:
        client.close()
        with self._clients_lock:
            if client in self._clients:
                self._clients.remove(client)

    def _tick_loop(self) -> None:
        period = self.session.dt
        deadline = time.monotonic()
        while not self._stop.is_set():
            # Mutations only happen here, between ticks.
            while True:
                try:
                    client, msg = self._commands.get_nowait()
                except queue.Empty:
                    break
                handled = self.session.handle_message(msg)
                client.send(handled.reply)
                if handled.subscribe_rate_hz is not None:
                    client.stride = self.session.snapshot_stride(
                        handled.subscribe_rate_hz
                    )
                if handled.unsubscribe:
                    client.stride = None
            snapshot = self.session.tick()
            wire = None
            with self._clients_lock:
                subscribers = [
                    c for c in self._clients
                    if c.stride is not None
                    and self.session.tick_count % c.stride == 0
                ]
            if subscribers:
                wire = snapshot.as_wire_dict()
                for client in subscribers:
                    client.send(wire)
            if self.pace:
                deadline += period
                delay = deadline - time.monotonic()
                if delay > 0:
                    time.sleep(delay)
                elif delay < -1.0:
                    deadline = time.monotonic()  # resync after a long stall


def run_ws_bridge(
    ws_host: str,
    ws_port: int,
    tcp_host: str,
    tcp_port: int,
    stop_event: threading.Event,
) -> None:
    """Relay the NDJSON protocol over WebSocket for browser clients.

    Each WebSocket connection gets its own TCP connection to the service;
    one text frame <-> one protocol line. Requires the optional `websockets`
    dependency (pip install knobsim[ws]).
    """
    import asyncio

    try:
        import websockets
    except ImportError as exc:  # pragma: no cover - environment dependent
        raise RuntimeError(
            "WebSocket bridge needs the 'websockets' package "
            "(install knobsim[ws])"
        ) from exc

    async def handler(ws) -> None:
        reader, writer = await asyncio.open_connection(tcp_host, tcp_port)

        async def ws_to_tcp() -> None:
            async for message in ws:
                if isinstance(message, bytes):
                    message = message.decode("utf-8", "replace")
                writer.write((message.strip() + "\n").encode("utf-8"))
                await writer.drain()

        async def tcp_to_ws() -> None:
            while True:
                line = await reader.readline()
                if not line:
                    return
                await ws.send(line.decode("utf-8").rstrip("\n"))

        tasks = [
            asyncio.create_task(ws_to_tcp()),
            asyncio.create_task(tcp_to_ws()),
        ]
        try:
            await asyncio.wait(tasks, return_when=asyncio.FIRST_COMPLETED)
        finally:
            for task in tasks:
                task.cancel()
            writer.close()

    async def main() -> None:
        async with websockets.serve(handler, ws_host, ws_port):
            while not stop_event.is_set():
                await asyncio.sleep(0.2)

    asyncio.run(main())
