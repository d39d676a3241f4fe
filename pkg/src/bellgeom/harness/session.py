"""Referee and detector loops for the distributed game."""

from __future__ import annotations

import logging
import socket
import time
from dataclasses import dataclass

from .. import _backend
from ..bell_game import OUTCOME_KEYS, SimulationSummary
from ..correlation_family import make_family
from ..errors import HarnessError, ProtocolError
from ..hidden_model import ModelContext, response
from ..rng import normalize_seed
from . import protocol
from .protocol import MessageType

log = logging.getLogger(__name__)

DETECTOR_ROLES = ("detector-a", "detector-b")
BATCH = 4096


def parse_address(text: str) -> tuple[str, int]:
    host, sep, port = text.rpartition(":")
    if not sep:
        raise ValueError(f"address must be host:port, got {text!r}")
    try:
        return host or "127.0.0.1", int(port)
    except ValueError:
        raise ValueError(f"bad port in address {text!r}") from None


@dataclass(frozen=True)
class SessionConfig:
    family: str = "cosine"
    theta: float = 0.0
    rounds: int = 1000
    seed: int = 0
    listen: tuple[str, int] = ("127.0.0.1", 0)
    connect: tuple[str, int] = ("127.0.0.1", 0)
    timeout: float = 10.0

    def __post_init__(self):
        if self.rounds < 1:
            raise ValueError("rounds must be at least 1")


class SessionAborted(HarnessError):
    """Transport failed mid-session; ``summary`` holds the rounds completed."""

    def __init__(self, message: str, summary: SimulationSummary | None):
        super().__init__(message)
        self.summary = summary


def _nodelay(sock: socket.socket) -> None:
    sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)


class Referee:
    """Listening end of a session. Binds on construction so the port is known."""

    def __init__(self, cfg: SessionConfig):
        self.cfg = cfg
        self.ctx = ModelContext(make_family(cfg.family), cfg.theta)
        self._server = socket.create_server(cfg.listen)
        self._server.settimeout(cfg.timeout)

    @property
    def address(self) -> tuple[str, int]:
        return self._server.getsockname()[:2]

    def close(self) -> None:
        self._server.close()

    def _accept_detectors(self) -> dict[str, socket.socket]:
        peers: dict[str, socket.socket] = {}
        deadline = time.monotonic() + self.cfg.timeout
        while len(peers) < 2:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                break
            self._server.settimeout(remaining)
            try:
                conn, _ = self._server.accept()
            except socket.timeout:
                break
            _nodelay(conn)
            conn.settimeout(self.cfg.timeout)
            msg = protocol.recv_msg(conn)
            if msg is None or msg["type"] != MessageType.HELLO:
                conn.close()
                raise ProtocolError(f"expected HELLO, got {msg!r}")
            role = msg["role"]
            if role not in DETECTOR_ROLES or role in peers:
                conn.close()
                raise ProtocolError(f"unexpected or duplicate role in HELLO frame {msg!r}")
            peers[role] = conn
        if len(peers) < 2:
            for conn in peers.values():
                conn.close()
            raise HarnessError(f"only {len(peers)} of 2 detectors connected before timeout")
        return peers

    def _summary(self, counts: list[int], played: int, partial: bool) -> SimulationSummary:
        return SimulationSummary(
            rounds=played,
            seed=normalize_seed(self.cfg.seed),
            theta=self.ctx.theta,
            counts=dict(zip(OUTCOME_KEYS, counts)),
            partial=partial,
        )

    def run(self) -> SimulationSummary:
        cfg = self.cfg
        try:
            peers = self._accept_detectors()
        finally:
            self.close()
        a, b = peers["detector-a"], peers["detector-b"]
        counts = [0, 0, 0, 0]
        played = 0
        try:
            for role, conn in peers.items():
                protocol.send_msg(conn, protocol.config(role, cfg.family))
            for lo in range(0, cfg.rounds, BATCH):
                hi = min(lo + BATCH, cfg.rounds)
                lam_a, lam_b = _backend.round_lambdas(self.ctx, cfg.seed, lo, hi)
                for k in range(hi - lo):
                    rid = lo + k
                    protocol.send_msg(a, protocol.assign(rid, float(lam_a[k])))
                    protocol.send_msg(b, protocol.assign(rid, float(lam_b[k])))
                    s_a = self._collect(a, rid)
                    s_b = self._collect(b, rid)
                    counts[2 * (s_a < 0) + (s_b < 0)] += 1
                    played += 1
            for conn in peers.values():
                protocol.send_msg(conn, protocol.done(cfg.rounds))
        except (OSError, HarnessError) as exc:
            raise SessionAborted(
                f"session aborted after {played} rounds: {exc}",
                self._summary(counts, played, partial=True) if played else None,
            ) from exc
        finally:
            for conn in peers.values():
                conn.close()
        return self._summary(counts, played, partial=False)

    @staticmethod
    def _collect(conn: socket.socket, rid: int) -> int:
        msg = protocol.recv_msg(conn)
        if msg is None:
            raise HarnessError(f"detector disconnected before OUTCOME of round {rid}")
        if msg["type"] != MessageType.OUTCOME or msg["round_id"] != rid:
            raise ProtocolError(f"expected OUTCOME for round {rid}, got frame {msg!r}")
        return msg["s"]


def referee_run(cfg: SessionConfig) -> SimulationSummary:
    return Referee(cfg).run()


def _connect(address: tuple[str, int], timeout: float) -> socket.socket:
    deadline = time.monotonic() + timeout
    while True:
        try:
            return socket.create_connection(address, timeout=timeout)
        except OSError:
            if time.monotonic() >= deadline:
                raise HarnessError(f"referee at {address[0]}:{address[1]} not reachable") from None
            time.sleep(0.05)


def detector_run(cfg: SessionConfig, role: str, capture: list | None = None) -> int:
    """Answer every ASSIGN with the sign of the delivered coordinate.

    ``capture`` collects every raw frame received, for inspection.
    Returns 0 after a clean DONE.
    """
    if role not in DETECTOR_ROLES:
        raise ValueError(f"role must be one of {DETECTOR_ROLES}")
    sock = _connect(cfg.connect, cfg.timeout)
    _nodelay(sock)
    with sock:
        protocol.send_msg(sock, protocol.hello(role))
        msg = protocol.recv_msg(sock, capture)
        if msg is None or msg["type"] != MessageType.CONFIG or msg["role"] != role:
            raise ProtocolError(f"expected CONFIG for {role}, got {msg!r}")
        last = -1
        while True:
            msg = protocol.recv_msg(sock, capture)
            if msg is None:
                raise HarnessError("referee closed the connection before DONE")
            kind = MessageType(msg["type"])
            if kind is MessageType.DONE:
                return 0
            if kind is not MessageType.ASSIGN:
                raise ProtocolError(f"unexpected frame {msg!r}")
            rid = msg["round_id"]
            if rid <= last:
                raise ProtocolError(f"round ids must increase, got {rid} after {last}")
            last = rid
            protocol.send_msg(sock, protocol.outcome(rid, response(float(msg["lambda"]))))
