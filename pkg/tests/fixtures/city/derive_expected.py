"""Hand derivation of the expected instruction sequence for the city fixture.

Independent of the pharos package. Visibility per checkpoint follows from
the ridge geometry (see make_fixture.py): a point P east of the ridge is
hidden iff the sight line from P to the tower crosses the ridge band
(east 450..460 m) at a northing >= 100 m, i.e. north(P) * 460 / east(P) >= 100.
Only the nearest 100 m lattice node counts, so every checkpoint is judged at
its lattice node; all nodes clear that boundary by more than 30 m.

    checkpoint        node        crossing north   verdict
    W0 start          (500,-100)  < 0              visible
    W1                (500,   0)  0                visible
    W2                (600,   0)  0                visible
    mid W1-W2         (600,   0)  0                visible
    mid W2-W3         (600, 200)  150..153         hidden
    W3                (600, 300)  225..230         hidden
    mid W3-W4         (700, 300)  193..197         hidden
    W4                (700, 300)  193..197         hidden
    mid W4-W5         (700, 200)  129..131         hidden
    W5                (700, 100)  64..66           visible
    mid W5-W6, W6     (800, 100)  56..58           visible
    mid W6-W7         (800, 100)                   visible
    W7                (800,   0)  0                visible
    mid W7-W8         (900,   0)  0                visible

Relative bearings (tower bearing minus walking heading), sectors 45 deg wide:
    start W0 heading N:  tower at 277.7 -> -82.3  Left
    W1 out E:  266.7 - 90  = 176.7   Behind
    W2 out N:  267.2 - 0   = -92.8   Left
    W3: hidden here and at W4 -> plain
    W4 out S: hidden, visible at W5: 259.8 - 180 = 79.8  Right (end of street)
    W5 out E:  259.8 - 90  = 169.8   Behind
    W6 out S:  260.9 - 180 = 80.9    Right
    W7 out E:  267.9 - 90  = 177.9   Behind
    midpoints: E-bound legs ~ Behind, S-bound leg W6-W7 (820,80) ~ 84.4 Right

Trigger points: 5 m back along the incoming leg (legs are 100..300 m, so the
quarter-leg cap never binds); in-segment points at the leg midpoint.
"""
import json
import math

M_PER_DEG = math.pi / 180 * 6_371_000.0

route = json.load(open("route.geojson"))
W = [(lat, lon) for lon, lat in route["geometry"]["coordinates"]]
ST = route["properties"]["streets"]
T = "the TV tower"


def back5(k):
    (lat0, lon0), (lat1, lon1) = W[k - 1], W[k]
    if lon0 == lon1:  # north/south leg
        return lat1 - math.copysign(5 / M_PER_DEG, lat1 - lat0), lon1
    return lat1, lon1 - math.copysign(5 / (M_PER_DEG * math.cos(math.radians(lat1))), lon1 - lon0)


def mid(k):
    return (W[k][0] + W[k + 1][0]) / 2, (W[k][1] + W[k + 1][1]) / 2


rows = [("Start", "Start", "Left", f"Head north on {ST[0]}. The TV tower will be on your left", W[0], True, "Future")]
turns = [
    # k, class, kind, sector, landmark text, in-segment sector, in-segment text
    (1, "Right", "TurnWithLandmark", "Behind", f"Head away from {T}", "Behind", "The TV tower is behind you"),
    (2, "Left", "TurnWithLandmark", "Left", "The TV tower will be on your left", None, None),
    (3, "Right", "PlainTBT", None, None, None, None),
    (4, "Right", "EndOfStreet", "Right", f"At the end of the street, {T} will be on your right", None, None),
    (5, "Left", "TurnWithLandmark", "Behind", f"Head away from {T}", "Behind", "The TV tower is behind you"),
    (6, "Right", "TurnWithLandmark", "Right", "The TV tower will be on your right", "Right", "The TV tower is on your right"),
    (7, "Left", "TurnWithLandmark", "Behind", f"Head away from {T}", "Behind", "The TV tower is behind you"),
]
for k, tc, kind, sector, hint, msector, mhint in turns:
    text = f"Turn {tc.lower()} onto {ST[k]}" + (f". {hint}" if hint else "")
    rows.append((kind, tc, sector, text, back5(k), True, "Future"))
    mtext = "Continue straight" + (f". {mhint}" if mhint else "")
    rows.append(("InSegment", "Straight", msector, mtext, mid(k), False, "Present"))
rows.append(("Arrive", "End", None, "You have arrived", W[-1], True, "Present"))


def dump(rows, path):
    with open(path, "w", newline="\n") as fh:
        for seq, (kind, tc, sector, text, (lat, lon), notify, tense) in enumerate(rows, start=1):
            fh.write(json.dumps({"seq": seq, "kind": kind, "turn_class": tc, "sector": sector,
                                 "text": text, "trigger_lat": round(lat, 7),
                                 "trigger_lon": round(lon, 7), "notify": notify,
                                 "tense": tense}, ensure_ascii=False) + "\n")


dump(rows, "expected_instructions.jsonl")

# baseline: same structure, no landmark wording
plain = [("Start", "Start", None, f"Head north on {ST[0]}", W[0], True, "Future")]
for k, tc, *_ in turns:
    plain.append(("PlainTBT", tc, None, f"Turn {tc.lower()} onto {ST[k]}", back5(k), True, "Future"))
    plain.append(("InSegment", "Straight", None, "Continue straight", mid(k), False, "Present"))
plain.append(rows[-1])
dump(plain, "expected_instructions_plain.jsonl")
