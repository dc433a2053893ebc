"""Landmark-enriched turn-by-turn instructions.

For each turning point the angle between the outgoing heading and the
bearing towards the landmark picks one of eight 45-degree sectors, and the
sector picks the wording. If the landmark cannot be seen at the turning
point but can be seen where the street ends, the hint is deferred to the end
of the street; if neither, a plain turn instruction is used.
"""
from __future__ import annotations

import enum
import json
import logging
from dataclasses import dataclass
from typing import Optional

from .errors import CoincidentPoints, InvalidParams, LandmarkCoincidesWithPoint
from .geodesy import (Bearing, GeoPoint, destination_point, haversine_distance,
                      initial_bearing, midpoint_along, normalize_relative)
from .route import Route, TurnClass, TurningPoint, extract_turning_points, segment_headings
from .visibility import Landmark, Visibility, VisibilityMap, lookup_visibility

log = logging.getLogger(__name__)

DEFAULT_TRIGGER_OFFSET_M = 5.0
MIN_LANDMARK_DISTANCE_M = 1.0
COORD_DECIMALS = 7


class RelativeSector(enum.Enum):
    AHEAD = "Ahead"
    AHEAD_RIGHT = "AheadRight"
    RIGHT = "Right"
    BEHIND_RIGHT = "BehindRight"
    BEHIND = "Behind"
    BEHIND_LEFT = "BehindLeft"
    LEFT = "Left"
    AHEAD_LEFT = "AheadLeft"


_MIRROR = {
    RelativeSector.AHEAD_RIGHT: RelativeSector.AHEAD_LEFT,
    RelativeSector.RIGHT: RelativeSector.LEFT,
    RelativeSector.BEHIND_RIGHT: RelativeSector.BEHIND_LEFT,
}
_MIRROR.update({v: k for k, v in _MIRROR.items()})


def mirror_sector(s: RelativeSector) -> RelativeSector:
    return _MIRROR.get(s, s)


class InstructionKind(enum.Enum):
    TURN_WITH_LANDMARK = "TurnWithLandmark"
    IN_SEGMENT = "InSegment"
    END_OF_STREET = "EndOfStreet"
    PLAIN_TBT = "PlainTBT"
    START = "Start"
    ARRIVE = "Arrive"


class Tense(enum.Enum):
    FUTURE = "Future"
    PRESENT = "Present"


# EndOfStreet announces a turn, so it vibrates like the other turn kinds
_NOTIFYING = {InstructionKind.START, InstructionKind.TURN_WITH_LANDMARK,
              InstructionKind.END_OF_STREET, InstructionKind.PLAIN_TBT,
              InstructionKind.ARRIVE}


@dataclass(frozen=True)
class Instruction:
    kind: InstructionKind
    turn_class: TurnClass
    sector: Optional[RelativeSector]
    text: str
    trigger_location: GeoPoint
    tense: Tense

    @property
    def notify(self) -> bool:
        return self.kind in _NOTIFYING


# clockwise order starting at Ahead = [-22.5, 22.5)
_SECTORS = [RelativeSector.AHEAD, RelativeSector.AHEAD_RIGHT, RelativeSector.RIGHT,
            RelativeSector.BEHIND_RIGHT, RelativeSector.BEHIND, RelativeSector.BEHIND_LEFT,
            RelativeSector.LEFT, RelativeSector.AHEAD_LEFT]


def sector_of(rel) -> RelativeSector:
    """45-degree band containing a relative angle; boundaries go clockwise."""
    deg = rel.deg if hasattr(rel, "deg") else normalize_relative(rel).deg
    shifted = (deg + 22.5) % 360.0
    return _SECTORS[int(shifted // 45.0) % 8]


_FUTURE = {
    RelativeSector.AHEAD: "Head towards {name}",
    RelativeSector.BEHIND: "Head away from {name}",
    RelativeSector.RIGHT: "{name} will be on your right",
    RelativeSector.LEFT: "{name} will be on your left",
    RelativeSector.AHEAD_RIGHT: "{name} will be in front of you to your right",
    RelativeSector.AHEAD_LEFT: "{name} will be in front of you to your left",
    RelativeSector.BEHIND_RIGHT: "{name} will be behind you on your right",
    RelativeSector.BEHIND_LEFT: "{name} will be behind you on your left",
}

_PRESENT = {s: t.replace("will be", "is") for s, t in _FUTURE.items()}
_PRESENT[RelativeSector.AHEAD] = "{name} is in front of you"
_PRESENT[RelativeSector.BEHIND] = "{name} is behind you"

# "Head towards" reads as an order, which makes no sense for a spot further down the street
_END_OF_STREET = dict(_FUTURE)
_END_OF_STREET[RelativeSector.AHEAD] = "{name} will be in front of you"
_END_OF_STREET[RelativeSector.BEHIND] = "{name} will be behind you"


def _sentence_case(text: str) -> str:
    return text[:1].upper() + text[1:]


def render_landmark_phrase(sector: RelativeSector, tense, landmark_name: str,
                           sentence_start: bool = True) -> str:
    """Landmark hint for ``sector``; the name is inserted verbatim."""
    if not landmark_name:
        raise InvalidParams("landmark name must be non-empty")
    table = _FUTURE if Tense(tense) is Tense.FUTURE else _PRESENT
    text = table[sector].format(name=landmark_name)
    return _sentence_case(text) if sentence_start else text


_TURN_PHRASES = {
    TurnClass.STRAIGHT: "Continue straight",
    TurnClass.SOFT_LEFT: "Turn soft left",
    TurnClass.SOFT_RIGHT: "Turn soft right",
    TurnClass.LEFT: "Turn left",
    TurnClass.RIGHT: "Turn right",
    TurnClass.SHARP_LEFT: "Turn sharp left",
    TurnClass.SHARP_RIGHT: "Turn sharp right",
    TurnClass.U_TURN: "Make a U-turn",
}


def turn_phrase(turn_class: TurnClass, street: Optional[str] = None) -> str:
    phrase = _TURN_PHRASES[turn_class]
    return f"{phrase} onto {street}" if street else phrase


_COMPASS = ["north", "northeast", "east", "southeast",
            "south", "southwest", "west", "northwest"]


def compass_word(heading: Bearing) -> str:
    return _COMPASS[int(((heading.deg + 22.5) % 360.0) // 45.0) % 8]


def relative_sector_at(point: GeoPoint, heading: Bearing, landmark: Landmark) -> RelativeSector:
    if haversine_distance(point, landmark.location) < MIN_LANDMARK_DISTANCE_M:
        raise LandmarkCoincidesWithPoint(f"landmark {landmark.id} coincides with {point}")
    try:
        to_landmark = initial_bearing(point, landmark.location)
    except CoincidentPoints as exc:
        raise LandmarkCoincidesWithPoint(str(exc)) from None
    return sector_of(normalize_relative(to_landmark.deg - heading.deg))


def _visible(vmap: Optional[VisibilityMap], p: GeoPoint) -> bool:
    # Unknown counts as not visible
    return vmap is not None and lookup_visibility(vmap, p) is Visibility.VISIBLE


def instruction_for_turning_point(tp: TurningPoint, landmark: Landmark,
                                  vmap: Optional[VisibilityMap], segment_end: GeoPoint,
                                  street: Optional[str] = None,
                                  trigger_location: Optional[GeoPoint] = None) -> Instruction:
    """Turn instruction for ``tp``, enriched with the landmark where it is visible.

    ``segment_end`` is where the street after the turn ends (the next turning
    point); it is the fallback checkpoint when the landmark is hidden at ``tp``.
    Passing ``vmap=None`` yields the plain turn-by-turn instruction.
    """
    if tp.outgoing_heading is None:
        raise InvalidParams("turning point has no outgoing heading")
    trigger = trigger_location or tp.location
    base = turn_phrase(tp.turn_class, street)
    plain = Instruction(InstructionKind.PLAIN_TBT, tp.turn_class, None, base, trigger,
                        Tense.FUTURE)
    try:
        if _visible(vmap, tp.location):
            sector = relative_sector_at(tp.location, tp.outgoing_heading, landmark)
            text = f"{base}. {render_landmark_phrase(sector, Tense.FUTURE, landmark.name)}"
            return Instruction(InstructionKind.TURN_WITH_LANDMARK, tp.turn_class, sector,
                               text, trigger, Tense.FUTURE)
        if _visible(vmap, segment_end):
            sector = relative_sector_at(segment_end, tp.outgoing_heading, landmark)
            hint = _END_OF_STREET[sector].format(name=landmark.name)
            text = f"{base}. At the end of the street, {hint}"
            return Instruction(InstructionKind.END_OF_STREET, tp.turn_class, sector,
                               text, trigger, Tense.FUTURE)
    except LandmarkCoincidesWithPoint as exc:
        log.warning("%s; falling back to plain instruction", exc)
    return plain


def in_segment_instruction(prev: Instruction, midpoint: GeoPoint, heading: Bearing,
                           landmark: Landmark, vmap: Optional[VisibilityMap]) -> Instruction:
    """Between-turns variant of ``prev``: straight-ahead, present tense, silent."""
    if prev.kind not in (InstructionKind.TURN_WITH_LANDMARK, InstructionKind.END_OF_STREET,
                         InstructionKind.PLAIN_TBT):
        raise InvalidParams(f"in-segment instructions follow turns, not {prev.kind.value}")
    text = turn_phrase(TurnClass.STRAIGHT)
    sector = None
    if _visible(vmap, midpoint):
        try:
            sector = relative_sector_at(midpoint, heading, landmark)
            text = f"{text}. {render_landmark_phrase(sector, Tense.PRESENT, landmark.name)}"
        except LandmarkCoincidesWithPoint as exc:
            log.warning("%s; omitting landmark hint", exc)
    return Instruction(InstructionKind.IN_SEGMENT, TurnClass.STRAIGHT, sector, text,
                       midpoint, Tense.PRESENT)


def start_instruction(route: Route, landmark: Landmark,
                      vmap: Optional[VisibilityMap]) -> Instruction:
    origin = route.waypoints[0]
    heading = segment_headings(route)[0]
    text = f"Head {compass_word(heading)}"
    street = route.street(0)
    if street:
        text += f" on {street}"
    sector = None
    if _visible(vmap, origin):
        try:
            sector = relative_sector_at(origin, heading, landmark)
        except LandmarkCoincidesWithPoint as exc:
            log.warning("%s; omitting landmark hint", exc)
    if sector is RelativeSector.AHEAD:
        text = render_landmark_phrase(sector, Tense.FUTURE, landmark.name)
    elif sector is not None:
        text = f"{text}. {render_landmark_phrase(sector, Tense.FUTURE, landmark.name)}"
    return Instruction(InstructionKind.START, TurnClass.START, sector, text, origin,
                       Tense.FUTURE)


def _trigger_before(route: Route, k: int, offset_m: float) -> GeoPoint:
    # never further back than a quarter of the incoming segment, so the trigger
    # stays after the previous segment's midpoint instruction
    w = route.waypoints
    back = min(offset_m, haversine_distance(w[k - 1], w[k]) / 4.0)
    if back == 0:
        return w[k]
    return destination_point(w[k], initial_bearing(w[k], w[k - 1]), back)


def generate_route_instructions(route: Route, landmark: Landmark,
                                vmap: Optional[VisibilityMap],
                                trigger_offset_m: float = DEFAULT_TRIGGER_OFFSET_M,
                                landmark_phrases: bool = True) -> list:
    """Full instruction sequence: start, (turn, in-segment) per turn, arrival.

    ``landmark_phrases=False`` produces the plain turn-by-turn baseline with
    the same structure.
    """
    if not trigger_offset_m >= 0:
        raise InvalidParams(f"trigger offset must be >= 0, got {trigger_offset_m}")
    if not landmark_phrases:
        vmap = None
    tps = extract_turning_points(route)
    w = route.waypoints
    out = [start_instruction(route, landmark, vmap)]
    for i in range(1, len(tps) - 1):
        tp, nxt = tps[i], tps[i + 1]
        k = tp.index
        turn = instruction_for_turning_point(
            tp, landmark, vmap, nxt.location, street=route.street(k),
            trigger_location=_trigger_before(route, k, trigger_offset_m))
        out.append(turn)
        out.append(in_segment_instruction(turn, midpoint_along(w[k], w[k + 1]),
                                          tp.outgoing_heading, landmark, vmap))
    out.append(Instruction(InstructionKind.ARRIVE, TurnClass.END, None, "You have arrived",
                           w[-1], Tense.PRESENT))
    return out


def instruction_record(seq: int, instr: Instruction) -> dict:
    return {
        "seq": seq,
        "kind": instr.kind.value,
        "turn_class": instr.turn_class.value,
        "sector": instr.sector.value if instr.sector else None,
        "text": instr.text,
        "trigger_lat": round(instr.trigger_location.lat_deg, COORD_DECIMALS),
        "trigger_lon": round(instr.trigger_location.lon_deg, COORD_DECIMALS),
        "notify": instr.notify,
        "tense": instr.tense.value,
    }


def dumps_jsonl(instructions) -> str:
    """One JSON object per line, ``seq`` counting from 1."""
    return "".join(json.dumps(instruction_record(i, ins), ensure_ascii=False) + "\n"
                   for i, ins in enumerate(instructions, start=1))
