"""Wire protocol v1: u32 big-endian length prefix + UTF-8 JSON body.

Body is one object with a "type" field in {HELLO, TASK, RESULT, PING,
PONG, FIN}. Unknown types are protocol errors and close the connection.
"""

import json
import struct

PROTOCOL_VERSION = 1
DEFAULT_MAX_FRAME = 16 * 1024 * 1024

MESSAGE_TYPES = ("HELLO", "TASK", "RESULT", "PING", "PONG", "FIN")


class ProtocolError(Exception):
    pass


def frame_encode(message):
    """Encode one message into a length-prefixed frame."""
    _check(message)
    body = json.dumps(message, separators=(",", ":"), sort_keys=True).encode("utf-8")
    if len(body) >= 2**32:
        raise ProtocolError("payload too large for u32 length prefix")
    return struct.pack(">I", len(body)) + body


def frame_decode(data, max_frame=DEFAULT_MAX_FRAME):
    """Decode one complete frame; raises on truncation or oversize."""
    if len(data) < 4:
        raise ProtocolError("truncated frame header")
    (length,) = struct.unpack(">I", data[:4])
    if length > max_frame:
        raise ProtocolError(f"declared frame length {length} exceeds limit {max_frame}")
    if len(data) < 4 + length:
        raise ProtocolError("truncated frame body")
    message = json.loads(data[4:4 + length].decode("utf-8"))
    _check(message)
    return message


def _check(message):
    if not isinstance(message, dict) or message.get("type") not in MESSAGE_TYPES:
        raise ProtocolError(f"unknown message type: {message.get('type') if isinstance(message, dict) else message!r}")


def hello(worker_id):
    return {"type": "HELLO", "worker_id": worker_id, "protocol_version": PROTOCOL_VERSION}


def task(task_id, payload):
    return {"type": "TASK", "task_id": task_id, "payload": payload}


def result(task_id, ok, value=None, error=None):
    m = {"type": "RESULT", "task_id": task_id, "ok": bool(ok)}
    if ok:
        m["value"] = value
    else:
        m["error"] = error or "evaluation failed"
    return m


def ping(worker_id):
    return {"type": "PING", "worker_id": worker_id}


def pong(worker_id):
    return {"type": "PONG", "worker_id": worker_id}


def fin():
    return {"type": "FIN"}


def read_frame(sock, max_frame=DEFAULT_MAX_FRAME):
    """Read exactly one frame from a socket; None on clean EOF."""
    header = _read_exact(sock, 4)
    if header is None:
        return None
    (length,) = struct.unpack(">I", header)
    if length > max_frame:
        raise ProtocolError(f"declared frame length {length} exceeds limit {max_frame}")
    body = _read_exact(sock, length)
    if body is None:
        raise ProtocolError("truncated frame body")
    message = json.loads(body.decode("utf-8"))
    _check(message)
    return message


def write_frame(sock, message):
    sock.sendall(frame_encode(message))


def _read_exact(sock, n):
    buf = b""
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            if buf:
                raise ProtocolError("connection closed mid-frame")
            return None
        buf += chunk
    return buf
