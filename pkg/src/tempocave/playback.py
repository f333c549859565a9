"""Authoritative synchronized-playback session state.

The server owns a single PlaybackState per session; clients only send
commands.  Manual steps CLAMP to the valid frame range (deliberate
stepping should stop at the ends) while timer ticks WRAP from the last
frame back to 0 (passive review loops).  The revision counter increments
exactly when some field changed, so receivers can discard stale or
duplicate broadcasts by comparing revisions.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Union

from .errors import InvalidCommand, InvalidSpeed, JumpOutOfRange

SPEED_MULTIPLIERS = (0.25, 0.5, 1.0, 2.0, 4.0)

ACTIONS = ("play", "pause", "step", "jump", "set_speed", "set_sync")

#: actions that carry a value, with the expected python type(s)
_VALUE_ACTIONS = {"step": int, "jump": int, "set_speed": (int, float), "set_sync": bool}


@dataclass(frozen=True)
class PlaybackState:
    datasets: tuple[str, ...] = ()
    frame: int = 0
    playing: bool = False
    speed: float = 1.0
    synced: bool = True
    revision: int = 0

    def to_dict(self) -> dict:
        return {
            "datasets": list(self.datasets),
            "frame": self.frame,
            "playing": self.playing,
            "speed": self.speed,
            "synced": self.synced,
            "revision": self.revision,
        }


@dataclass(frozen=True)
class PlaybackCommand:
    action: str
    value: Optional[Union[int, float, bool]] = None

    def __post_init__(self):
        if self.action not in ACTIONS:
            raise InvalidCommand(f"unknown action {self.action!r}")
        expected = _VALUE_ACTIONS.get(self.action)
        if expected is None:
            if self.value is not None:
                raise InvalidCommand(f"action {self.action!r} takes no value")
        else:
            if isinstance(self.value, bool) and expected is not bool:
                raise InvalidCommand(f"action {self.action!r} needs a numeric value")
            if not isinstance(self.value, expected):
                raise InvalidCommand(
                    f"action {self.action!r} requires a value of type "
                    f"{getattr(expected, '__name__', expected)}"
                )


def _bump(state: PlaybackState, **changes) -> PlaybackState:
    changed = any(getattr(state, k) != v for k, v in changes.items())
    if not changed:
        return state
    return replace(state, revision=state.revision + 1, **changes)


def session_apply(
    state: PlaybackState, command: PlaybackCommand, t_common: int
) -> PlaybackState:
    """Apply one client command; returns the (possibly unchanged) state.

    Raises JumpOutOfRange / InvalidSpeed without touching the state.
    The revision increments iff some field actually changed.
    """
    if command.action == "play":
        return _bump(state, playing=True)
    if command.action == "pause":
        return _bump(state, playing=False)
    if command.action == "step":
        frame = min(max(state.frame + command.value, 0), t_common - 1)
        return _bump(state, frame=frame)
    if command.action == "jump":
        if not 0 <= command.value < t_common:
            raise JumpOutOfRange(f"frame {command.value} outside [0, {t_common})")
        return _bump(state, frame=command.value)
    if command.action == "set_speed":
        speed = float(command.value)
        if speed not in SPEED_MULTIPLIERS:
            raise InvalidSpeed(f"speed must be one of {SPEED_MULTIPLIERS}, got {speed}")
        return _bump(state, speed=speed)
    if command.action == "set_sync":
        return _bump(state, synced=command.value)
    raise InvalidCommand(f"unknown action {command.action!r}")  # unreachable


def session_tick(state: PlaybackState, t_common: int) -> PlaybackState:
    """Advance one frame while playing, wrapping T-1 -> 0; no-op when paused."""
    if not state.playing:
        return state
    return _bump(state, frame=(state.frame + 1) % t_common)
