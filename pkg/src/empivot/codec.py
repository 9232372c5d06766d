"""Wireless command encoding and maneuver timeline compilation.

Wire format, one 16-bit signed word per drive command:

    bits 0..3    electromagnet id, 1..12
    bits 4..13   cube id, 1..1023
    bits 14..15  polarity code: 00 = OFF, 01 = +1, 10 = -1, 11 = reserved

The reserved polarity code doubles as the PWM configuration marker: a
configuration message is two words, first ``11 | cube id | 0000`` and then a
bare duty word 0..255, occupying two consecutive message slots.  Messages are
serialized no closer than 20 ms apart (one transmission slot).

Timeline compilation walks a maneuver plan's phases and emits, at each phase
start, only the commands whose polarity changes (ON commands first, then the
releases, each group ordered by cube then electromagnet); a full-rebroadcast
mode re-sends the whole phase instead, for recovery after lost messages.
Every timeline ends with the still-energized electromagnets switched OFF,
back-scheduled so the last OFF lands exactly on the scheduled end of the
maneuver; the total span of a compiled plan therefore equals the sum of its
phase durations.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

from .planner import EmAssignment, ManeuverPlan

#: One radio transmission slot, milliseconds.
MESSAGE_SLOT_MS = 20

_POLARITY_TO_CODE = {0: 0, 1: 1, -1: 2}
_CODE_TO_POLARITY = {0: 0, 1: 1, 2: -1}
_RESERVED_CODE = 3

#: Count of distinct decodable command words: 1023 cubes x 12 magnets x 3 polarities.
VALID_COMMAND_COUNT = 1023 * 12 * 3


class MalformedCommandError(ValueError):
    """Raised when a 16-bit word is not a decodable drive command."""


class TimelineOverflowError(ValueError):
    """Raised when a phase is too short for its own command serialization."""


def _to_signed16(pattern: int) -> int:
    pattern &= 0xFFFF
    return pattern - 0x10000 if pattern >= 0x8000 else pattern


def _to_pattern(word: int) -> int:
    if not -0x8000 <= word <= 0xFFFF:
        raise MalformedCommandError(f"not a 16-bit word: {word}")
    return word & 0xFFFF


def encode_command(cube_id: int, em: int, polarity: int) -> int:
    """Encode a drive command as a signed 16-bit integer."""
    if not 1 <= cube_id <= 1023:
        raise ValueError(f"cube id out of range 1..1023: {cube_id}")
    if not 1 <= em <= 12:
        raise ValueError(f"electromagnet id out of range 1..12: {em}")
    if polarity not in _POLARITY_TO_CODE:
        raise ValueError(f"polarity must be -1, 0 or +1: {polarity}")
    return _to_signed16(
        (_POLARITY_TO_CODE[polarity] << 14) | (cube_id << 4) | em
    )


def encode_assignment(assignment: EmAssignment) -> int:
    return encode_command(assignment.cube_id, assignment.em, assignment.polarity)


def decode_command(word: int) -> EmAssignment:
    """Decode a 16-bit word; raises MalformedCommandError off the valid set."""
    pattern = _to_pattern(word)
    code = pattern >> 14
    cube_id = (pattern >> 4) & 0x3FF
    em = pattern & 0xF
    if code == _RESERVED_CODE:
        raise MalformedCommandError(f"reserved polarity code in {pattern:#06x}")
    if not 1 <= em <= 12:
        raise MalformedCommandError(f"electromagnet id {em} in {pattern:#06x}")
    if cube_id == 0:
        raise MalformedCommandError(f"cube id 0 in {pattern:#06x}")
    return EmAssignment(cube_id, em, _CODE_TO_POLARITY[code])


@dataclass(frozen=True)
class PwmConfig:
    """Drive duty-cycle setting for one cube's coil drivers."""

    cube_id: int
    duty: int

    def __post_init__(self):
        if not 1 <= self.cube_id <= 1023:
            raise ValueError(f"cube id out of range 1..1023: {self.cube_id}")
        if not 0 <= self.duty <= 255:
            raise ValueError(f"duty out of range 0..255: {self.duty}")


def encode_pwm(config: PwmConfig) -> tuple[int, int]:
    """The two words of a PWM configuration message: marker, then duty."""
    marker = _to_signed16((_RESERVED_CODE << 14) | (config.cube_id << 4))
    return marker, config.duty


def is_pwm_marker(word: int) -> bool:
    pattern = _to_pattern(word)
    return (pattern >> 14) == _RESERVED_CODE and (pattern & 0xF) == 0


@dataclass(frozen=True)
class TimelineEntry:
    time_ms: int
    word: int  # signed 16-bit

    def __post_init__(self):
        if self.time_ms < 0:
            raise ValueError("entry time must be >= 0")
        if not -0x8000 <= self.word <= 0x7FFF:
            raise ValueError(f"word out of signed 16-bit range: {self.word}")

    @property
    def pattern(self) -> int:
        return self.word & 0xFFFF


class CommandTimeline:
    """Ordered command words with enforced minimum message spacing."""

    def __init__(self, entries: Iterable[TimelineEntry], start_ms: int = 0):
        self.entries: tuple[TimelineEntry, ...] = tuple(entries)
        self.start_ms = int(start_ms)
        prev = None
        for e in self.entries:
            if prev is not None and e.time_ms - prev < MESSAGE_SLOT_MS:
                raise ValueError(
                    f"messages at {prev} and {e.time_ms} ms violate the "
                    f"{MESSAGE_SLOT_MS} ms spacing floor"
                )
            prev = e.time_ms

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, CommandTimeline)
            and self.entries == other.entries
            and self.start_ms == other.start_ms
        )

    @property
    def span_ms(self) -> int:
        """Time from schedule start to the last command."""
        if not self.entries:
            return 0
        return self.entries[-1].time_ms - self.start_ms

    def decoded(self) -> list[tuple[int, Union[EmAssignment, PwmConfig]]]:
        """Structured view: PWM marker+duty word pairs are recombined."""
        out: list[tuple[int, Union[EmAssignment, PwmConfig]]] = []
        i = 0
        while i < len(self.entries):
            e = self.entries[i]
            if is_pwm_marker(e.word):
                if i + 1 >= len(self.entries):
                    raise MalformedCommandError(
                        "configuration marker without a duty word"
                    )
                duty = self.entries[i + 1].word
                cube_id = (e.pattern >> 4) & 0x3FF
                out.append((e.time_ms, PwmConfig(cube_id, duty)))
                i += 2
                continue
            out.append((e.time_ms, decode_command(e.word)))
            i += 1
        return out

    def final_polarities(self) -> dict[tuple[int, int], int]:
        """Replay the stream; nonzero entries are magnets left energized."""
        current: dict[tuple[int, int], int] = {}
        for _, item in self.decoded():
            if isinstance(item, EmAssignment):
                if item.polarity == 0:
                    current.pop((item.cube_id, item.em), None)
                else:
                    current[(item.cube_id, item.em)] = item.polarity
        return current

    # -- serialization ------------------------------------------------------

    def to_text(self) -> str:
        buf = io.StringIO()
        buf.write("# empivot command timeline\n")
        buf.write(f"# start_ms: {self.start_ms}\n")
        buf.write("# columns: t_ms value_hex\n")
        for e in self.entries:
            buf.write(f"{e.time_ms} {e.pattern:04x}\n")
        return buf.getvalue()

    @classmethod
    def from_text(cls, text: str) -> "CommandTimeline":
        start_ms: Optional[int] = None
        entries = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("start_ms:"):
                    start_ms = int(body.split(":", 1)[1])
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"line {lineno}: expected 't_ms value_hex'")
            try:
                t = int(parts[0])
                word = _to_signed16(int(parts[1], 16))
            except ValueError:
                raise ValueError(f"line {lineno}: bad record {line!r}") from None
            entries.append(TimelineEntry(t, word))
        if start_ms is None:
            start_ms = entries[0].time_ms if entries else 0
        return cls(entries, start_ms=start_ms)

    def to_binary(self) -> bytes:
        out = bytearray()
        for e in self.entries:
            out += e.time_ms.to_bytes(4, "little")
            out += e.pattern.to_bytes(2, "little")
        return bytes(out)

    @classmethod
    def from_binary(cls, blob: bytes, start_ms: Optional[int] = None) -> "CommandTimeline":
        if len(blob) % 6 != 0:
            raise ValueError(
                f"binary timeline length {len(blob)} is not a whole number "
                f"of 6-byte records"
            )
        entries = []
        for off in range(0, len(blob), 6):
            t = int.from_bytes(blob[off : off + 4], "little")
            word = _to_signed16(int.from_bytes(blob[off + 4 : off + 6], "little"))
            entries.append(TimelineEntry(t, word))
        if start_ms is None:
            start_ms = entries[0].time_ms if entries else 0
        return cls(entries, start_ms=start_ms)


def _as_key(assignment: EmAssignment) -> tuple[int, int]:
    return (assignment.cube_id, assignment.em)


def compile_timeline(
    plan: Optional[ManeuverPlan],
    timings: Optional[Sequence[int]] = None,
    *,
    start_ms: int = 0,
    prior: Iterable[EmAssignment] = (),
    full_rebroadcast: bool = False,
) -> CommandTimeline:
    """Serialize a plan into timed command words.

    ``timings`` overrides the plan's phase durations (three positive
    millisecond values).  ``prior`` lists electromagnets already energized
    before this timeline starts; they are released at the first boundary
    they stop appearing in.  ``plan=None`` emits only the shutdown of
    ``prior`` (an empty timeline for a fresh system).
    """
    current: dict[tuple[int, int], int] = {}
    for a in prior:
        if a.polarity != 0:
            current[_as_key(a)] = a.polarity

    entries: list[TimelineEntry] = []

    if plan is None:
        t = start_ms
        for cube_id, em in sorted(current):
            entries.append(TimelineEntry(t, encode_command(cube_id, em, 0)))
            t += MESSAGE_SLOT_MS
        return CommandTimeline(entries, start_ms=start_ms)

    if timings is None:
        durations = tuple(p.duration_ms for p in plan.phases)
    else:
        durations = tuple(int(d) for d in timings)
        if len(durations) != len(plan.phases):
            raise ValueError("need one duration per phase")
        if any(d <= 0 for d in durations):
            raise ValueError("phase durations must be positive")

    boundary = start_ms
    for phase, duration in zip(plan.phases, durations):
        target = {
            _as_key(a): a.polarity
            for a in phase.assignments
            if a.polarity != 0
        }
        if full_rebroadcast:
            turn_on = sorted(target)
        else:
            turn_on = sorted(
                k for k, pol in target.items() if current.get(k) != pol
            )
        turn_off = sorted(k for k in current if k not in target)
        commands = [(k, target[k]) for k in turn_on] + [
            (k, 0) for k in turn_off
        ]
        if len(commands) * MESSAGE_SLOT_MS > duration:
            raise TimelineOverflowError(
                f"{phase.name} phase: {len(commands)} commands do not fit in "
                f"{duration} ms at {MESSAGE_SLOT_MS} ms per message"
            )
        for i, ((cube_id, em), pol) in enumerate(commands):
            entries.append(
                TimelineEntry(
                    boundary + i * MESSAGE_SLOT_MS,
                    encode_command(cube_id, em, pol),
                )
            )
            if pol == 0:
                current.pop((cube_id, em), None)
            else:
                current[(cube_id, em)] = pol
        boundary += duration

    still_on = sorted(current)
    if still_on:
        first = boundary - MESSAGE_SLOT_MS * (len(still_on) - 1)
        if entries and first - entries[-1].time_ms < MESSAGE_SLOT_MS:
            raise TimelineOverflowError(
                "closing OFF sequence collides with the last phase commands"
            )
        for i, (cube_id, em) in enumerate(still_on):
            entries.append(
                TimelineEntry(
                    first + i * MESSAGE_SLOT_MS, encode_command(cube_id, em, 0)
                )
            )
        current.clear()

    return CommandTimeline(entries, start_ms=start_ms)


def pwm_timeline(
    configs: Iterable[PwmConfig], start_ms: int = 0
) -> CommandTimeline:
    """Serialize duty-cycle configuration messages, two slots each."""
    entries = []
    t = start_ms
    for cfg in configs:
        marker, duty = encode_pwm(cfg)
        entries.append(TimelineEntry(t, marker))
        entries.append(TimelineEntry(t + MESSAGE_SLOT_MS, duty))
        t += 2 * MESSAGE_SLOT_MS
    return CommandTimeline(entries, start_ms=start_ms)
