"""Wire format: 4-byte big-endian length prefix, then one UTF-8 JSON object.

Messages::

    HELLO    {"type": "HELLO", "role": "detector-a"}             detector -> referee
    CONFIG   {"type": "CONFIG", "role": ..., "family": "cosine"} referee -> detector
    ASSIGN   {"type": "ASSIGN", "round_id": 3, "lambda": "0.52359877559829882"}
    OUTCOME  {"type": "OUTCOME", "round_id": 3, "s": 1}
    DONE     {"type": "DONE", "rounds": 10000}

``lambda`` is a decimal string with 17 significant digits so that every
float64 survives the round trip.
"""

from __future__ import annotations

import enum
import json
import math
import socket
import struct

from ..errors import ProtocolError

HEADER = struct.Struct(">I")
MAX_FRAME = 1 << 20


class MessageType(str, enum.Enum):
    HELLO = "HELLO"
    CONFIG = "CONFIG"
    ASSIGN = "ASSIGN"
    OUTCOME = "OUTCOME"
    DONE = "DONE"


_FIELDS = {
    MessageType.HELLO: {"role"},
    MessageType.CONFIG: {"role", "family"},
    MessageType.ASSIGN: {"round_id", "lambda"},
    MessageType.OUTCOME: {"round_id", "s"},
    MessageType.DONE: {"rounds"},
}


def format_lambda(x: float) -> str:
    return f"{x:.17g}"


def hello(role: str) -> dict:
    return {"type": "HELLO", "role": role}


def config(role: str, family: str) -> dict:
    return {"type": "CONFIG", "role": role, "family": family}


def assign(round_id: int, lam: float) -> dict:
    return {"type": "ASSIGN", "round_id": round_id, "lambda": format_lambda(lam)}


def outcome(round_id: int, s: int) -> dict:
    return {"type": "OUTCOME", "round_id": round_id, "s": s}


def done(rounds: int) -> dict:
    return {"type": "DONE", "rounds": rounds}


def check_message(msg) -> MessageType:
    """Validate the shape of a decoded message and return its type."""
    if not isinstance(msg, dict) or "type" not in msg:
        raise ProtocolError(f"frame is not a typed JSON object: {msg!r}")
    try:
        kind = MessageType(msg["type"])
    except ValueError:
        raise ProtocolError(f"unknown message type in frame {msg!r}") from None
    missing = _FIELDS[kind] - msg.keys()
    if missing:
        raise ProtocolError(f"{kind.value} frame missing {sorted(missing)}: {msg!r}")
    if kind is MessageType.ASSIGN:
        try:
            lam = float(msg["lambda"])
        except (TypeError, ValueError):
            raise ProtocolError(f"ASSIGN lambda is not a decimal: {msg!r}") from None
        if not (math.isfinite(lam) and -math.pi <= lam < math.pi):
            raise ProtocolError(f"ASSIGN lambda outside [-pi, pi): {msg!r}")
    if kind is MessageType.OUTCOME and (type(msg["s"]) is not int or msg["s"] not in (-1, 1)):
        raise ProtocolError(f"OUTCOME s must be -1 or +1: {msg!r}")
    return kind


def encode_frame(msg: dict) -> bytes:
    body = json.dumps(msg, separators=(",", ":")).encode("utf-8")
    return HEADER.pack(len(body)) + body


def decode_frame(frame: bytes) -> dict:
    if len(frame) < HEADER.size:
        raise ProtocolError("truncated frame header")
    (n,) = HEADER.unpack_from(frame)
    body = frame[HEADER.size:]
    if len(body) != n:
        raise ProtocolError(f"frame length {n} does not match payload of {len(body)} bytes")
    try:
        return json.loads(body.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ProtocolError(f"undecodable frame {body[:80]!r}") from exc


def send_msg(sock: socket.socket, msg: dict) -> None:
    sock.sendall(encode_frame(msg))


def _recv_exact(sock: socket.socket, n: int) -> bytes | None:
    buf = bytearray()
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            return None
        buf.extend(chunk)
    return bytes(buf)


def recv_frame(sock: socket.socket) -> bytes | None:
    """Read one raw frame; ``None`` on clean EOF before a header."""
    head = _recv_exact(sock, HEADER.size)
    if head is None:
        return None
    (n,) = HEADER.unpack(head)
    if n > MAX_FRAME:
        raise ProtocolError(f"frame of {n} bytes exceeds limit")
    body = _recv_exact(sock, n)
    if body is None:
        raise ProtocolError("connection closed mid-frame")
    return head + body


def recv_msg(sock: socket.socket, capture: list | None = None) -> dict | None:
    frame = recv_frame(sock)
    if frame is None:
        return None
    if capture is not None:
        capture.append(frame)
    msg = decode_frame(frame)
    check_message(msg)
    return msg
