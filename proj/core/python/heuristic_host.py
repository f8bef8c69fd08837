#!/usr/bin/env python3
"""Serves a generated value heuristic over newline-delimited JSON.

The strategy file must define evaluate_state(state) returning
(values, intermediates). GOPS states arrive as the nine-field tuple (also
readable by field name); Avalon states arrive as a dict.
"""

import collections
import json
import math
import sys
import traceback

GopsState = collections.namedtuple(
    "GopsState",
    [
        "score_cards",
        "player_0_played_cards",
        "player_1_played_cards",
        "is_turn",
        "player_0_score",
        "player_1_score",
        "score_deck",
        "player_0_hand",
        "player_1_hand",
    ],
)


def to_gops_tuple(state):
    return GopsState(
        list(state["score_cards"]),
        list(state["player_0_played_cards"]),
        list(state["player_1_played_cards"]),
        bool(state["is_turn"]),
        state["player_0_score"],
        state["player_1_score"],
        set(state["score_deck"]),
        set(state["player_0_hand"]),
        set(state["player_1_hand"]),
    )


def number(x):
    if isinstance(x, bool):
        return int(x)
    if isinstance(x, int):
        return x
    x = float(x)
    if not math.isfinite(x):
        raise ValueError("non-finite value %r" % x)
    return x


def normalise(result):
    if not isinstance(result, (tuple, list)) or len(result) != 2:
        raise ValueError("evaluate_state must return (values, intermediates)")
    values, intermediates = result
    if isinstance(values, dict):
        values = [values[k] for k in sorted(values)]
    values = [number(v) for v in values]
    if intermediates is None:
        intermediates = {}
    if not isinstance(intermediates, dict):
        raise ValueError("intermediates must be a dict")
    out = {}
    for key, value in intermediates.items():
        try:
            out[str(key)] = number(value)
        except (TypeError, ValueError):
            continue
    return {"values": values, "intermediates": out}


def main():
    path = sys.argv[1]
    hello = json.loads(sys.stdin.readline())
    game = hello.get("hello", {}).get("game")
    namespace = {"__name__": "strategy"}
    try:
        with open(path) as f:
            exec(compile(f.read(), path, "exec"), namespace)
        fn = namespace["evaluate_state"]
    except Exception as exc:  # noqa: BLE001 - reported to the caller
        print(json.dumps({"ok": False, "error": repr(exc)}), flush=True)
        return
    print(json.dumps({"ok": True}), flush=True)
    for line in sys.stdin:
        if not line.strip():
            continue
        try:
            state = json.loads(line)["state"]
            if game == "gops":
                state = to_gops_tuple(state)
            reply = normalise(fn(state))
        except Exception as exc:  # noqa: BLE001
            reply = {"error": repr(exc), "trace": traceback.format_exc(limit=3)}
        print(json.dumps(reply), flush=True)


if __name__ == "__main__":
    main()
