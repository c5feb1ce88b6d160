"""Cockpit gateway: full-duplex WebSocket endpoint /pilot.

Serves one pilot connection: telemetry JSON objects out at the telemetry
rate, command JSON objects in with latest-command-wins semantics. The
socket layer is a small RFC 6455 server (text frames only) so the cockpit
can use the browser's plain WebSocket.

The gateway never stalls the simulation loop: telemetry goes through a
latest-only slot (stale frames are dropped under backpressure) and
commands are read from a slot the reader thread fills.
"""

from __future__ import annotations

import base64
import hashlib
import json
import logging
import socket
import struct
import threading
import time

from .autopilot import PilotCommand
from .control import JoystickInput

log = logging.getLogger("vinesim.gateway")

_WS_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"
COMMAND_TIMEOUT = 1.0  # s without commands -> zero defaults


class ConnectionClosed(Exception):
    pass


def _recv_exact(sock: socket.socket, n: int) -> bytes:
    buf = b""
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            raise ConnectionClosed()
        buf += chunk
    return buf


def ws_accept_key(key: str) -> str:
    digest = hashlib.sha1((key + _WS_GUID).encode()).digest()
    return base64.b64encode(digest).decode()


def ws_send_text(sock: socket.socket, text: str) -> None:
    data = text.encode()
    n = len(data)
    if n < 126:
        head = struct.pack("!BB", 0x81, n)
    elif n < 65536:
        head = struct.pack("!BBH", 0x81, 126, n)
    else:
        head = struct.pack("!BBQ", 0x81, 127, n)
    sock.sendall(head + data)


def ws_recv_message(sock: socket.socket) -> str | None:
    """One text message (handles ping and close); None for ignorable frames."""
    b0, b1 = _recv_exact(sock, 2)
    opcode = b0 & 0x0F
    masked = bool(b1 & 0x80)
    length = b1 & 0x7F
    if length == 126:
        (length,) = struct.unpack("!H", _recv_exact(sock, 2))
    elif length == 127:
        (length,) = struct.unpack("!Q", _recv_exact(sock, 8))
    mask = _recv_exact(sock, 4) if masked else b"\x00" * 4
    payload = _recv_exact(sock, length)
    if masked:
        payload = bytes(b ^ mask[i % 4] for i, b in enumerate(payload))
    if opcode == 0x8:  # close
        try:
            sock.sendall(struct.pack("!BB", 0x88, 0))
        except OSError:
            pass
        raise ConnectionClosed()
    if opcode == 0x9:  # ping -> pong
        sock.sendall(struct.pack("!BB", 0x8A, len(payload)) + payload)
        return None
    if opcode in (0x1, 0x2):
        return payload.decode("utf-8", errors="replace")
    return None


class PilotGateway:
    """Accepts one pilot over /pilot; bridges command/telemetry slots."""

    def __init__(self, scenario_doc: dict, host: str = "127.0.0.1", port: int = 8765):
        self.scenario_doc = scenario_doc
        self._srv = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._srv.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self._srv.bind((host, port))
        self._srv.listen(4)
        self._srv.settimeout(0.2)
        self.host, self.port = self._srv.getsockname()

        self._lock = threading.Lock()
        self._client: socket.socket | None = None
        self._cmd = JoystickInput()
        self._box_inflow = 0.0
        self._cmd_wall_time: float | None = None
        self._telemetry: dict | None = None
        self._telemetry_cv = threading.Condition()
        self._stop = threading.Event()
        self.command_errors = 0
        self.rejected_connections = 0
        self._threads: list[threading.Thread] = []

    def start(self) -> None:
        t = threading.Thread(target=self._accept_loop, name="gateway-accept", daemon=True)
        t.start()
        self._threads.append(t)

    def stop(self) -> None:
        self._stop.set()
        with self._lock:
            client = self._client
            self._client = None
        if client:
            try:
                client.close()
            except OSError:
                pass
        try:
            self._srv.close()
        except OSError:
            pass
        with self._telemetry_cv:
            self._telemetry_cv.notify_all()
        for t in self._threads:
            t.join(timeout=2.0)

    # sim-loop side -------------------------------------------------------

    def publish(self, record: dict) -> None:
        """Latest-only telemetry slot; never blocks the sim loop."""
        with self._telemetry_cv:
            self._telemetry = record
            self._telemetry_cv.notify_all()

    def command(self, sim=None) -> PilotCommand:
        """Latest pilot command, reverting to zeros when stale or absent."""
        with self._lock:
            cmd = self._cmd
            box = self._box_inflow
            when = self._cmd_wall_time
        if when is None or time.monotonic() - when > COMMAND_TIMEOUT:
            return PilotCommand(JoystickInput(), box_inflow=0.0)
        return PilotCommand(cmd, box_inflow=box)

    __call__ = command

    # socket side ---------------------------------------------------------

    def _accept_loop(self) -> None:
        while not self._stop.is_set():
            try:
                sock, addr = self._srv.accept()
            except socket.timeout:
                continue
            except OSError:
                return
            with self._lock:
                busy = self._client is not None
            if busy:
                self.rejected_connections += 1
                try:
                    body = "pilot slot already taken"
                    sock.sendall(
                        (
                            "HTTP/1.1 409 Conflict\r\nContent-Type: text/plain\r\n"
                            f"Content-Length: {len(body)}\r\nConnection: close\r\n\r\n{body}"
                        ).encode()
                    )
                    sock.close()
                except OSError:
                    pass
                continue
            try:
                if not self._handshake(sock):
                    sock.close()
                    continue
            except (OSError, ConnectionClosed):
                continue
            with self._lock:
                self._client = sock
            log.info("pilot connected from %s", addr)
            ws_send_text(sock, json.dumps({"type": "scenario", **self.scenario_doc}))
            reader = threading.Thread(target=self._reader, args=(sock,), daemon=True)
            writer = threading.Thread(target=self._writer, args=(sock,), daemon=True)
            reader.start()
            writer.start()
            self._threads.extend([reader, writer])

    def _handshake(self, sock: socket.socket) -> bool:
        sock.settimeout(5.0)
        data = b""
        while b"\r\n\r\n" not in data:
            chunk = sock.recv(4096)
            if not chunk:
                return False
            data += chunk
            if len(data) > 65536:
                return False
        head = data.split(b"\r\n\r\n", 1)[0].decode("latin-1")
        lines = head.split("\r\n")
        parts = lines[0].split()
        if len(parts) < 2 or parts[0] != "GET":
            return False
        path = parts[1].split("?", 1)[0]
        headers = {}
        for line in lines[1:]:
            if ":" in line:
                k, v = line.split(":", 1)
                headers[k.strip().lower()] = v.strip()
        if path != "/pilot":
            sock.sendall(b"HTTP/1.1 404 Not Found\r\nContent-Length: 0\r\n\r\n")
            return False
        key = headers.get("sec-websocket-key")
        if not key or headers.get("upgrade", "").lower() != "websocket":
            sock.sendall(b"HTTP/1.1 400 Bad Request\r\nContent-Length: 0\r\n\r\n")
            return False
        sock.sendall(
            (
                "HTTP/1.1 101 Switching Protocols\r\nUpgrade: websocket\r\n"
                f"Connection: Upgrade\r\nSec-WebSocket-Accept: {ws_accept_key(key)}\r\n\r\n"
            ).encode()
        )
        sock.settimeout(None)
        return True

    def _reader(self, sock: socket.socket) -> None:
        try:
            while not self._stop.is_set():
                msg = ws_recv_message(sock)
                if msg is None:
                    continue
                self._handle_command(msg)
        except (ConnectionClosed, OSError):
            pass
        finally:
            self._drop_client(sock)

    def _handle_command(self, msg: str) -> None:
        try:
            doc = json.loads(msg)
            cmd = JoystickInput(
                x=float(doc.get("x", 0.0)),
                y=float(doc.get("y", 0.0)),
                throttle=float(doc.get("throttle", 0.0)),
                estop=bool(doc.get("estop", False)),
            ).clamped()
            box = min(max(float(doc.get("box_inflow", 1.0)), 0.0), 1.0)
        except (ValueError, TypeError, json.JSONDecodeError):
            self.command_errors += 1
            return
        with self._lock:
            self._cmd = cmd
            self._box_inflow = box
            self._cmd_wall_time = time.monotonic()

    def _writer(self, sock: socket.socket) -> None:
        last_sent = None
        try:
            while not self._stop.is_set():
                with self._telemetry_cv:
                    self._telemetry_cv.wait(timeout=0.2)
                    rec = self._telemetry
                if rec is None or rec is last_sent:
                    continue
                last_sent = rec
                ws_send_text(sock, json.dumps({"type": "telemetry", **rec}, separators=(",", ":")))
        except (OSError, ConnectionClosed):
            pass
        finally:
            self._drop_client(sock)

    def _drop_client(self, sock: socket.socket) -> None:
        with self._lock:
            if self._client is sock:
                self._client = None
                self._cmd = JoystickInput()
                self._box_inflow = 0.0
                self._cmd_wall_time = None
                log.info("pilot disconnected")
        try:
            sock.close()
        except OSError:
            pass


def scenario_document(scenario) -> dict:
    from .world import HEAD_RADIUS

    return {
        "name": scenario.name,
        "walls": scenario.walls,
        "start": {"x": scenario.start.x, "y": scenario.start.y, "theta": scenario.start.theta},
        "victim": {"x": scenario.victim[0], "y": scenario.victim[1]},
        "max_tube": scenario.max_tube,
        "brace_radius": scenario.brace_radius,
        "head_radius": HEAD_RADIUS,
    }


def serve_run(scenario, seed=0, t_max=1800.0, log_path=None, record_path=None,
              port=8765, host="127.0.0.1"):
    """Run the simulation with a live gateway pilot (real-time paced)."""
    from .runner import run

    gateway = PilotGateway(scenario_document(scenario), host=host, port=port)
    gateway.start()
    print(f"gateway listening on ws://{gateway.host}:{gateway.port}/pilot")
    try:
        return run(
            scenario,
            pilot=gateway.command,
            seed=seed,
            t_max=t_max,
            log_path=log_path,
            record_path=record_path,
            telemetry_sink=gateway.publish,
            realtime=True,
        )
    finally:
        gateway.stop()
