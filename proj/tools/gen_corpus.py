#!/usr/bin/env python3
"""Regenerates corpus/pong-v1 program files from the reference definition.

Variants and mutants are single edits of the reference so a diff of two
generated files shows exactly what changed. The checked-in JSON is what the
tests read; run this after editing and commit both.
"""
import copy
import json
import pathlib

ROOT = pathlib.Path(__file__).resolve().parent.parent / "corpus" / "pong-v1"
FORMAT = "stagecheck-program/1"


def prop(name, of=None):
    return {"prop": name, "of": of} if of else {"prop": name}


def var(name):
    return {"var": name}


def op(tag, a, b):
    return {tag: [a, b]}


def up_script(body):
    return {"hat": "when_key_pressed", "key": "up-arrow", "body": body}


def down_script(body):
    return {"hat": "when_key_pressed", "key": "down-arrow", "body": body}


UP_GUARDED = [{"op": "if", "cond": op("<", prop("y"), 140), "then": [{"op": "change_y", "by": 10}]}]
DOWN_GUARDED = [{"op": "if", "cond": op(">", prop("y"), -140), "then": [{"op": "change_y", "by": -10}]}]

LAUNCH = {"op": "point_in_direction", "value": op("random", 45, 135)}

PADDLE_HIT = {"op": "if",
              "cond": {"and": [{"touching": "paddle"}, op("<", prop("direction"), 180)]},
              "then": [{"op": "point_in_direction", "value": op("-", 0, prop("direction"))},
                       {"op": "change_var", "var": "score", "by": 1}]}

BACK_WALL = {"op": "if", "cond": op(">", prop("x", "ball"), 230),
             "then": [{"op": "set_var", "var": "score", "value": 0},
                      {"op": "go_to", "x": 0, "y": 0},
                      LAUNCH]}

MOVE = {"op": "if", "cond": op("=", var("running"), 1),
        "then": [{"op": "move", "steps": 6}, {"op": "if_on_edge_bounce"}]}


def reference():
    return {
        "format": FORMAT,
        "name": "reference",
        "stage": {
            "globals": {"score": 0},
            "sprites": [
                {"name": "paddle", "x": 220, "y": 0, "direction": 0, "width": 10, "height": 80,
                 "vars": {},
                 "scripts": [
                     {"hat": "when_green_flag", "body": [{"op": "go_to", "x": 220, "y": 0}]},
                     up_script(copy.deepcopy(UP_GUARDED)),
                     down_script(copy.deepcopy(DOWN_GUARDED)),
                 ]},
                {"name": "ball", "x": 0, "y": 0, "direction": 90, "width": 10, "height": 10,
                 "vars": {"running": 0},
                 "scripts": [
                     # collision and back wall run before movement each frame
                     {"hat": "when_green_flag", "body": [
                         {"op": "go_to", "x": 0, "y": 0},
                         {"op": "set_var", "var": "score", "value": 0},
                         {"op": "set_var", "var": "running", "value": 0},
                         {"op": "forever", "body": [copy.deepcopy(PADDLE_HIT)]}]},
                     {"hat": "when_green_flag", "body": [
                         {"op": "forever", "body": [copy.deepcopy(BACK_WALL)]}]},
                     {"hat": "when_green_flag", "body": [
                         {"op": "forever", "body": [copy.deepcopy(MOVE)]}]},
                     {"hat": "when_key_pressed", "key": "space", "body": [
                         {"op": "if", "cond": op("=", var("running"), 0),
                          "then": [copy.deepcopy(LAUNCH),
                                   {"op": "set_var", "var": "running", "value": 1}]}]},
                 ]},
            ],
        },
    }


def sprite(prog, name):
    return next(s for s in prog["stage"]["sprites"] if s["name"] == name)


def key_script(prog, key):
    return next(s for s in sprite(prog, "paddle")["scripts"] if s.get("key") == key)


def ball_loop(prog, index):
    """Body of the forever loop of the index-th ball green-flag script."""
    return sprite(prog, "ball")["scripts"][index]["body"][-1]["body"]


def edit(name, fn):
    p = reference()
    p["name"] = name
    fn(p)
    return p


# Four ways to stop the paddle at the top of the stage.
def v_clamp(p):
    key_script(p, "up-arrow")["body"] = [
        {"op": "change_y", "by": 10},
        {"op": "if", "cond": op(">", prop("y"), 140), "then": [{"op": "set_y", "value": 140}]}]


def v_glide(p):
    key_script(p, "up-arrow")["body"] = [
        {"op": "glide_to", "x": prop("x", "paddle"), "y": 140, "steps": 14}]


def v_bounce(p):
    key_script(p, "up-arrow")["body"] = [{"op": "change_y", "by": 10}, {"op": "if_on_edge_bounce"}]


def v_stop(p):
    key_script(p, "up-arrow")["body"] = [
        {"op": "if", "cond": op(">=", prop("y"), 140), "then": [{"op": "stop_this_script"}]},
        {"op": "change_y", "by": 10}]


def m_no_key_up(p):
    scripts = sprite(p, "paddle")["scripts"]
    scripts.remove(key_script(p, "up-arrow"))


def m_no_key_down(p):
    scripts = sprite(p, "paddle")["scripts"]
    scripts.remove(key_script(p, "down-arrow"))


def m_no_upper(p):
    key_script(p, "up-arrow")["body"] = [{"op": "change_y", "by": 10}]


def m_no_lower(p):
    key_script(p, "down-arrow")["body"] = [{"op": "change_y", "by": -10}]


def m_no_space_wait(p):
    first = sprite(p, "ball")["scripts"][0]["body"]
    first[2] = {"op": "set_var", "var": "running", "value": 1}
    first.insert(3, copy.deepcopy(LAUNCH))


def m_edge_reverse(p):
    ball_loop(p, 2)[0]["then"][1] = {
        "op": "if", "cond": {"and": [{"touching_edge": True}, op("<", prop("x"), 230)]},
        "then": [{"op": "turn", "degrees": 180}]}


def m_no_paddle_bounce(p):
    del ball_loop(p, 0)[0]["then"][0]


def m_no_paddle_score(p):
    del ball_loop(p, 0)[0]["then"][1]


def m_no_reset_score(p):
    del ball_loop(p, 1)[0]["then"][0]


def m_no_reset_ball(p):
    del ball_loop(p, 1)[0]["then"][1:]


VARIANTS = [
    ("clamp-bound", "move then clamp with set y", v_clamp),
    ("glide-bound", "glide to a fixed target", v_glide),
    ("bounce-bound", "move then bounce off the edge", v_bounce),
    ("stop-bound", "stop the script at the limit", v_stop),
]

MUTANTS = [
    ("no-key-up", "key_up", m_no_key_up),
    ("no-key-down", "key_down", m_no_key_down),
    ("no-upper-bound", "upper_bound", m_no_upper),
    ("no-lower-bound", "lower_bound", m_no_lower),
    ("no-space-wait", "space_start", m_no_space_wait),
    ("edge-reverse", "edge_bounce", m_edge_reverse),
    ("no-paddle-bounce", "paddle_bounce", m_no_paddle_bounce),
    ("no-paddle-score", "paddle_score", m_no_paddle_score),
    ("no-reset-score", "reset_score", m_no_reset_score),
    ("no-reset-ball", "reset_ball", m_no_reset_ball),
]


RUBRIC = ["key_up", "key_down", "upper_bound", "lower_bound", "space_start",
          "edge_bounce", "paddle_bounce", "paddle_score", "reset_ball", "reset_score"]

# Items a mutant loses besides the one it breaks, and why.
COUPLED = {
    "no-key-up": {"upper_bound": "the paddle never reaches the top, so the bound is never exercised"},
    "no-key-down": {"lower_bound": "the paddle never reaches the bottom"},
    "no-paddle-score": {"reset_score": "score stays 0, so a miss never has a score to reset"},
    "edge-reverse": {"reset_score": "reversed balls retrace their path back onto the paddle and "
                                    "never miss after scoring"},
}


def entry(name, kind, **extra):
    e = {"id": name, "program": f"programs/{name}.json", "kind": kind}
    e.update(extra)
    broken = set()
    if "breaks" in e:
        broken = {e["breaks"], *COUPLED.get(name, {})}
        if name in COUPLED:
            e["coupled"] = COUPLED[name]
    e["expect"] = {item: ("not-satisfied" if item in broken else "satisfied") for item in RUBRIC}
    return e


def manifest():
    entries = [entry("reference", "reference")]
    entries += [entry(n, "variant", strategy=s) for n, s, _ in VARIANTS]
    entries += [entry(n, "mutant", breaks=b) for n, b, _ in MUTANTS]
    return {
        "format": "stagecheck-corpus/1",
        "version": "pong-v1",
        "protocol": {
            "suite": "pong.suite",
            "series": {
                "up": "inputs/up.json",
                "down": "inputs/down.json",
                "follow": {"triggers": ["press_space", "follow_up", "follow_down", "stop_follow"]},
            },
            "seeds": [1, 2, 3],
            "max_steps": 3000,
            "threshold": 0.1,
        },
        "rubric": RUBRIC,
        "entries": entries,
    }


def write(prog):
    path = ROOT / "programs" / f"{prog['name']}.json"
    path.write_text(json.dumps(prog, indent=2) + "\n")


def main():
    write(reference())
    for name, _, fn in VARIANTS:
        write(edit(name, fn))
    for name, _, fn in MUTANTS:
        write(edit(name, fn))
    (ROOT / "manifest.json").write_text(json.dumps(manifest(), indent=2) + "\n")


if __name__ == "__main__":
    main()
