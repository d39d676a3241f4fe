"""Three-process run of the game over TCP: a referee and two detectors.

The referee draws every round, applies the chart change and hands each
detector nothing but its own hidden coordinate. Detectors answer with the
sign of that coordinate. This models the construction; it is not a
loophole-free experiment.
"""

from .protocol import MessageType, decode_frame, encode_frame, recv_msg, send_msg
from .session import (
    DETECTOR_ROLES,
    Referee,
    SessionAborted,
    SessionConfig,
    detector_run,
    parse_address,
    referee_run,
)

__all__ = [
    "DETECTOR_ROLES",
    "MessageType",
    "Referee",
    "SessionAborted",
    "SessionConfig",
    "decode_frame",
    "detector_run",
    "encode_frame",
    "parse_address",
    "recv_msg",
    "referee_run",
    "send_msg",
]
