"""Synchronized playback: the state machine behind the web service.

One authoritative PlaybackState lives on the server.  Clients send
commands (play, pause, step, jump, set_speed, set_sync) over a
WebSocket; the server applies them in arrival order, its own timer
ticks the clock while playing, and every change is broadcast with a
strictly increasing revision, so any number of viewers stay in step.
Manual steps clamp at the ends; timer ticks wrap around for looping
review.

This demo drives the state machine directly.  To explore over HTTP:

    tempocave serve demos/output/data --port 8080
    curl localhost:8080/api/datasets
"""

from tempocave import PlaybackCommand, PlaybackState, session_apply, session_tick
from tempocave.errors import JumpOutOfRange

T = 200  # frames in the session's shortest dataset

state = PlaybackState(datasets=("p01_pre", "p01_post"))
print(f"start: {state.to_dict()}")

for action, value in [("play", None), ("set_speed", 2.0), ("jump", 195)]:
    state = session_apply(state, PlaybackCommand(action, value), T)
    print(f"after {action}{'' if value is None else f'({value})'}: "
          f"frame={state.frame} playing={state.playing} speed={state.speed} "
          f"rev={state.revision}")

print("\nsix timer ticks (note the wrap from 199 to 0):")
for _ in range(6):
    state = session_tick(state, T)
    print(f"  tick -> frame {state.frame} (rev {state.revision})")

state = session_apply(state, PlaybackCommand("pause"), T)
state = session_apply(state, PlaybackCommand("step", -5), T)
state = session_apply(state, PlaybackCommand("step", -5), T)
print(f"\npaused and stepped back twice: frame={state.frame} (clamped at 0? "
      f"{state.frame == 0})")

try:
    session_apply(state, PlaybackCommand("jump", T), T)
except JumpOutOfRange as exc:
    print(f"jump({T}) rejected: {exc} — state unchanged at rev {state.revision}")
