#!/usr/bin/env python3
"""Regenerates vectors-mini.txt, the tiny word-vector fixture used by tests.

Each token is a weighted sum of hand-assigned topic axes plus small seeded
noise, so related vocabulary lands close together. Output is deterministic.
"""
import random

DIM = 16
AXES = {
    "device": 0, "on": 1, "off": 2, "time": 3, "event": 4, "air": 5,
    "pressure": 6, "quality": 7, "up": 8, "down": 9, "file": 10,
    "social": 11, "web": 12, "organize": 13, "media": 14, "place": 15,
}

TOPICS = {
    # device / power
    "device": {"device": 1.0}, "devices": {"device": 1.0},
    "c": {"device": 0.8, "air": 0.5}, "ac": {"device": 0.8, "air": 0.5},
    "purifier": {"device": 0.7, "air": 0.7}, "lights": {"device": 0.8, "on": 0.2},
    "light": {"device": 0.8, "on": 0.2}, "lamp": {"device": 0.8},
    "switch": {"device": 0.9, "on": 0.3, "off": 0.3}, "button": {"device": 0.5, "place": 0.6},
    "turned": {"device": 0.6, "on": 0.3, "off": 0.3}, "turn": {"device": 0.6, "on": 0.3, "off": 0.3},
    "on": {"on": 1.0}, "off": {"off": 1.0}, "enabled": {"on": 0.8, "device": 0.3},
    "disabled": {"off": 0.8, "device": 0.3}, "blink": {"device": 0.6, "on": 0.5},
    "brightness": {"device": 0.5, "down": 0.2, "up": 0.2}, "display": {"device": 0.6, "media": 0.4},
    "temperature": {"device": 0.5, "air": 0.4}, "ringtone": {"device": 0.6, "media": 0.3},
    "volume": {"device": 0.5, "media": 0.3}, "filter": {"air": 0.6, "device": 0.5},
    "cleaning": {"device": 0.5, "event": 0.4}, "door": {"device": 0.6, "place": 0.5},
    "window": {"device": 0.5, "place": 0.5}, "opened": {"on": 0.5, "event": 0.4},
    "pressed": {"event": 0.5, "device": 0.4}, "tap": {"event": 0.5, "device": 0.4},
    # time / events
    "every": {"time": 0.9}, "time": {"time": 1.0}, "day": {"time": 0.9},
    "week": {"time": 0.9}, "year": {"time": 0.9}, "temporal": {"time": 0.9, "event": 0.2},
    "tomorrow": {"time": 0.9}, "sunrise": {"time": 0.8, "place": 0.2}, "sunset": {"time": 0.8, "place": 0.2},
    "event": {"event": 1.0, "time": 0.4}, "starts": {"event": 0.9, "on": 0.2},
    "started": {"event": 0.9, "on": 0.2}, "start": {"event": 0.9, "on": 0.2},
    "activity": {"event": 0.9}, "moving": {"event": 0.6, "place": 0.6},
    "focusing": {"event": 0.5, "organize": 0.3}, "cooking": {"event": 0.6},
    "calendar": {"organize": 0.9, "time": 0.4}, "forecast": {"time": 0.6, "air": 0.4},
    "rain": {"air": 0.6, "time": 0.2},
    # air / sensing
    "air": {"air": 1.0}, "pressure": {"pressure": 1.0, "air": 0.4},
    "quality": {"quality": 1.0, "air": 0.4}, "sensed": {"device": 0.3, "event": 0.4},
    "drops": {"down": 1.0}, "below": {"down": 0.9}, "decreased": {"down": 1.0},
    "rises": {"up": 1.0}, "above": {"up": 0.9}, "increased": {"up": 1.0},
    "changed": {"up": 0.5, "down": 0.5, "event": 0.3}, "needs": {"event": 0.3},
    # files / storage
    "file": {"file": 1.0}, "files": {"file": 1.0}, "folder": {"file": 0.9},
    "save": {"file": 0.8, "organize": 0.3}, "saved": {"file": 0.8, "organize": 0.3},
    "upload": {"file": 0.8, "web": 0.4}, "attachment": {"file": 0.8, "social": 0.3},
    "share": {"social": 0.8, "file": 0.4}, "shared": {"social": 0.8, "file": 0.3},
    "information": {"file": 0.4, "web": 0.4}, "get": {"file": 0.3, "web": 0.3},
    "add": {"organize": 0.8, "file": 0.3}, "item": {"organize": 0.6, "file": 0.3},
    "list": {"organize": 0.8}, "reading": {"organize": 0.5, "media": 0.3},
    "remind": {"organize": 0.9, "time": 0.3}, "reminder": {"organize": 0.9, "time": 0.3},
    "contact": {"organize": 0.6, "social": 0.6}, "favorites": {"organize": 0.6, "media": 0.4},
    "mix": {"media": 0.8}, "track": {"media": 0.8},
    # social / messaging
    "message": {"social": 1.0}, "send": {"social": 0.8}, "notification": {"social": 0.8, "device": 0.3},
    "email": {"social": 0.9}, "sms": {"social": 0.9, "device": 0.3}, "tweet": {"social": 0.9},
    "post": {"social": 0.9}, "status": {"social": 0.7}, "profile": {"social": 0.8},
    "update": {"social": 0.4, "event": 0.4}, "like": {"social": 0.8}, "received": {"social": 0.6, "event": 0.3},
    "inbox": {"social": 0.8, "file": 0.3}, "feed": {"social": 0.6, "web": 0.5},
    # web
    "web": {"web": 1.0}, "bookmark": {"web": 0.9, "organize": 0.3}, "site": {"web": 0.9},
    "url": {"web": 0.9}, "service": {"web": 0.8}, "connect": {"web": 0.6, "social": 0.3},
    "search": {"web": 0.8}, "diy": {"web": 0.5, "device": 0.3},
    # media
    "photo": {"media": 1.0}, "image": {"media": 1.0}, "audio": {"media": 0.9},
    "media": {"media": 1.0}, "taken": {"media": 0.6, "event": 0.4}, "animal": {"media": 0.3, "place": 0.5},
    "seen": {"media": 0.5, "event": 0.4},
    # place / location
    "position": {"place": 1.0}, "registration": {"place": 0.5, "organize": 0.4},
    "area": {"place": 0.9}, "enter": {"place": 0.8}, "exit": {"place": 0.8},
    "outside": {"place": 0.8}, "location": {"place": 1.0},
}

# Function words: small vectors with no dominant topic.
FUNCTION = ["a", "an", "the", "to", "from", "for", "by", "in", "of", "is", "any",
            "new", "has", "been", "your", "you", "me", "with", "s", "quick", "set",
            "calls", "and", "or", "at", "it", "this", "that", "be", "are"]

# Filler vocabulary so the fixture resembles a real (if tiny) vocabulary.
FILLER = ["alpha", "bravo", "charlie", "delta", "echo", "foxtrot", "golf", "hotel",
          "india", "juliet", "kilo", "lima", "mike", "november", "oscar", "papa",
          "quebec", "romeo", "sierra", "tango", "uniform", "victor", "whiskey",
          "xray", "yankee", "zulu", "red", "green", "blue", "yellow", "black",
          "white", "purple", "orange", "north", "south", "east", "west", "one",
          "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
          "kitchen", "garden", "office", "garage", "bedroom", "hallway", "roof",
          "battery", "signal", "network", "router", "camera", "speaker", "plug",
          "thermostat", "sensor", "motion", "humidity", "water", "leak", "smoke",
          "alarm", "lock", "unlock", "vacuum", "oven"]


def main():
    rng = random.Random(20170501)
    rows = []
    for tok, weights in TOPICS.items():
        vec = [rng.gauss(0.0, 0.05) for _ in range(DIM)]
        for axis, w in weights.items():
            vec[AXES[axis]] += w
        rows.append((tok, vec))
    for tok in FUNCTION:
        rows.append((tok, [rng.gauss(0.0, 0.12) for _ in range(DIM)]))
    for tok in FILLER:
        vec = [rng.gauss(0.0, 0.3) for _ in range(DIM)]
        rows.append((tok, vec))
    with open("vectors-mini.txt", "w") as fh:
        fh.write("%d %d\n" % (len(rows), DIM))
        for tok, vec in rows:
            fh.write(tok + " " + " ".join("%.6f" % x for x in vec) + "\n")


if __name__ == "__main__":
    main()
