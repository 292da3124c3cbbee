"""Thread selected keyframes and non-keyframe captions into one temporally
ordered prompt plan.

Narratives are placed on a single uniform stride delta inside the eligible
gaps; delta is the smallest value whose narrative count fits the budget, found
by binary search over the monotone count function.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .errors import (
    BadTemplate,
    DuplicateIndex,
    EmptyKeyframes,
    IndexOutOfRange,
    MissingCaption,
    NegativeIndex,
)
from .store import CaptionSet


class Scope(str, Enum):
    BETWEEN_KEYFRAMES = "between"
    FULL_VIDEO = "full"


class Layout(str, Enum):
    INTERLEAVED = "interleaved"
    NARRATIVES_FIRST = "narratives_first"
    KEYFRAMES_FIRST = "keyframes_first"


@dataclass
class PlanItem:
    kind: str  # "frame" or "narrative"
    t: int
    text: str | None = None

    def to_dict(self) -> dict:
        d: dict = {"type": self.kind, "t": self.t}
        if self.kind == "narrative":
            d["text"] = self.text
        return d


@dataclass
class ThreadBudget:
    total_narratives: int = 210
    delta: int | None = None  # force a stride; None means solve for it


@dataclass
class InterleavePlan:
    items: list[PlanItem]
    scope: Scope
    layout: Layout
    delta: int | None  # stride used; None when no narratives were emitted

    def to_dict(self) -> dict:
        return {
            "scope": self.scope.value,
            "layout": self.layout.value,
            "delta": self.delta,
            "items": [it.to_dict() for it in self.items],
        }


def _check_keyframes(keyframes, scope: Scope, n_frames: int | None) -> list[int]:
    ys = [int(y) for y in keyframes]
    if not ys:
        raise EmptyKeyframes("at least one keyframe is required")
    seen: set[int] = set()
    for y in ys:
        if y < 0:
            raise NegativeIndex(f"keyframe {y}")
        if y in seen:
            raise DuplicateIndex(y)
        seen.add(y)
    ys = sorted(ys)
    if scope is Scope.FULL_VIDEO:
        if n_frames is None:
            raise ValueError("n_frames is required for full-video scope")
        if ys[-1] >= n_frames:
            raise IndexOutOfRange(f"keyframe {ys[-1]} outside [0, {n_frames})")
    return ys


def narrative_count(
    keyframes: list[int], delta: int, scope: Scope, n_frames: int | None = None
) -> int:
    """Number of narrative slots a stride of `delta` produces."""
    ys = _check_keyframes(keyframes, scope, n_frames)
    if delta < 1:
        raise ValueError(f"delta must be >= 1, got {delta}")
    count = 0
    for lo, hi in zip(ys, ys[1:]):
        count += (hi - lo - 1) // delta
    if scope is Scope.FULL_VIDEO:
        count += ys[0] // delta
        count += (n_frames - 1 - ys[-1]) // delta
    return count


def solve_delta(
    keyframes: list[int],
    budget: int,
    scope: Scope = Scope.BETWEEN_KEYFRAMES,
    n_frames: int | None = None,
) -> int | None:
    """Smallest stride whose narrative count fits the budget.

    budget == 0 returns None (the no-narratives sentinel); a finite stride is
    returned otherwise, minimal by binary search.
    """
    ys = _check_keyframes(keyframes, scope, n_frames)
    if budget < 0:
        raise ValueError(f"budget must be >= 0, got {budget}")
    if budget == 0:
        return None
    hi = 1
    while narrative_count(ys, hi, scope, n_frames) > budget:
        hi *= 2
    lo = max(1, hi // 2)
    while lo < hi:
        mid = (lo + hi) // 2
        if narrative_count(ys, mid, scope, n_frames) <= budget:
            hi = mid
        else:
            lo = mid + 1
    return lo


def _narrative_positions(
    ys: list[int], delta: int, scope: Scope, n_frames: int | None
) -> list[int]:
    positions: list[int] = []
    if scope is Scope.FULL_VIDEO:
        # Prefix slots anchor at the first keyframe and count downward.
        t = ys[0] - delta
        head = []
        while t >= 0:
            head.append(t)
            t -= delta
        positions.extend(reversed(head))
    for lo, hi in zip(ys, ys[1:]):
        t = lo + delta
        while t < hi:
            positions.append(t)
            t += delta
    if scope is Scope.FULL_VIDEO:
        t = ys[-1] + delta
        while t <= n_frames - 1:
            positions.append(t)
            t += delta
    return positions


def thread(
    keyframes: list[int],
    captions: CaptionSet,
    budget: ThreadBudget | None = None,
    scope: Scope = Scope.BETWEEN_KEYFRAMES,
    layout: Layout = Layout.INTERLEAVED,
    n_frames: int | None = None,
) -> InterleavePlan:
    """Build the interleaved plan for a selection and its caption set.

    Every keyframe appears exactly once as a Frame item; narratives fill the
    stride positions strictly inside the eligible gaps, each carrying its
    caption text. A forced budget.delta that would overflow the budget keeps
    the earliest slots.
    """
    if budget is None:
        budget = ThreadBudget()
    ys = _check_keyframes(keyframes, scope, n_frames)
    if budget.delta is not None:
        if budget.delta < 1:
            raise ValueError(f"delta must be >= 1, got {budget.delta}")
        delta: int | None = budget.delta
    else:
        delta = solve_delta(ys, budget.total_narratives, scope, n_frames)

    if delta is None:
        positions: list[int] = []
    else:
        positions = _narrative_positions(ys, delta, scope, n_frames)
        positions = positions[: budget.total_narratives]
    if not positions:
        delta = None

    narratives = []
    for t in positions:
        if t not in captions:
            raise MissingCaption(t)
        narratives.append(PlanItem("narrative", t, captions[t]))
    frames = [PlanItem("frame", y) for y in ys]

    if layout is Layout.INTERLEAVED:
        items = sorted(frames + narratives, key=lambda it: it.t)
    elif layout is Layout.NARRATIVES_FIRST:
        items = narratives + frames
    else:
        items = frames + narratives
    return InterleavePlan(items=items, scope=scope, layout=layout, delta=delta)


def render_plan(plan: InterleavePlan, frame_template: str = "<frame:{t}>") -> str:
    """Render a plan to text: one line per item, frames through the template,
    narratives as "[t=<t>] <text>"."""
    if "{t}" not in frame_template:
        raise BadTemplate(f"frame template must contain '{{t}}', got {frame_template!r}")
    lines = []
    for it in plan.items:
        if it.kind == "frame":
            try:
                lines.append(frame_template.format(t=it.t))
            except (KeyError, IndexError, ValueError) as e:
                raise BadTemplate(f"cannot format {frame_template!r}: {e}") from e
        else:
            lines.append(f"[t={it.t}] {it.text}")
    return "".join(line + "\n" for line in lines)
