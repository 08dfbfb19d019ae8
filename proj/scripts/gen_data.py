#!/usr/bin/env python3
"""Regenerates the shipped dataset, scripted transcripts, and tabletop scenarios.

Outputs (all committed):
  data/dataset/tasks.jsonl
  data/transcripts/*.jsonl
  data/tabletop/*.json
"""
import json
import os

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
DATASET = os.path.join(ROOT, "data", "dataset")
TRANSCRIPTS = os.path.join(ROOT, "data", "transcripts")
TABLETOP = os.path.join(ROOT, "data", "tabletop")

DISPLAY = {
    "breadslice": "bread slice",
    "coffeepot": "coffee pot",
    "coffeetable": "coffee table",
    "kitchentable": "kitchen table",
    "bathroomcounter": "bathroom counter",
    "remotecontrol": "remote control",
    "trashcan": "trash can",
    "toothbrush": "toothbrush",
}


def disp(name):
    return DISPLAY.get(name, name)


def write_jsonl(path, rows):
    with open(path, "w") as f:
        for row in rows:
            f.write(json.dumps(row) + "\n")


def exchange(response):
    return {"request": {"messages": []}, "response": response,
            "latency_ms": 0.0, "backend": "scripted"}


# ---------------------------------------------------------------------------
# TRAIN / VALIDATION tuples: simple single-revision household tasks whose
# plan steps map one-to-one onto the reference script.
# ---------------------------------------------------------------------------

def move_task(obj, src, dst):
    plan = [
        f"Walk to the {disp(src)}",
        f"Grab the {disp(obj)}",
        f"Walk to the {disp(dst)}",
        f"Put the {disp(obj)} on the {disp(dst)}",
    ]
    script = [
        f"[WALK] <{src}> (1)",
        f"[GRAB] <{obj}> (1)",
        f"[WALK] <{dst}> (1)",
        f"[PUTON] <{obj}> (1) <{dst}> (1)",
    ]
    return f"Move the {disp(obj)} to the {disp(dst)}", plan, script


def stow_task(obj, src, container):
    plan = [
        f"Walk to the {disp(src)}",
        f"Grab the {disp(obj)}",
        f"Walk to the {disp(container)}",
        f"Open the {disp(container)}",
        f"Put the {disp(obj)} in the {disp(container)}",
        f"Close the {disp(container)}",
    ]
    script = [
        f"[WALK] <{src}> (1)",
        f"[GRAB] <{obj}> (1)",
        f"[WALK] <{container}> (1)",
        f"[OPEN] <{container}> (1)",
        f"[PUTBACK] <{obj}> (1) <{container}> (1)",
        f"[CLOSE] <{container}> (1)",
    ]
    return f"Put the {disp(obj)} in the {disp(container)}", plan, script


def build_train_val():
    tasks = []
    surfaces = {
        "salmon": "counter", "coffeepot": "counter", "cupcake": "counter",
        "apple": "kitchentable", "plate": "kitchentable",
        "toothbrush": "bathroomcounter", "toothpaste": "bathroomcounter",
        "remotecontrol": "coffeetable",
    }
    # A handful of canonical exemplar tasks first: they seed the in-context
    # examples for planning and translation.
    tasks.append(("train_switch_off_tv",
                  "Turn off the tv after it was left on",
                  ["Walk to the tv", "Switch off the tv"],
                  ["[WALK] <tv> (1)", "[SWITCHOFF] <tv> (1)"]))
    tasks.append(("train_fetch_milk",
                  "Take the milk out of the fridge",
                  ["Walk to the fridge", "Open the fridge", "Grab the milk"],
                  ["[WALK] <fridge> (1)", "[OPEN] <fridge> (1)", "[GRAB] <milk> (1)"]))
    tasks.append(("train_apple_to_counter",
                  "Move the apple to the counter",
                  ["Walk to the kitchen table", "Grab the apple",
                   "Walk to the counter", "Put the apple on the counter"],
                  ["[WALK] <kitchentable> (1)", "[GRAB] <apple> (1)",
                   "[WALK] <counter> (1)", "[PUTON] <apple> (1) <counter> (1)"]))
    tasks.append(("train_sit_chair",
                  "Take a seat on the chair",
                  ["Walk to the chair", "Sit on the chair"],
                  ["[WALK] <chair> (1)", "[SIT] <chair> (1)"]))
    tasks.append(("train_drink_coffee",
                  "Drink from the coffee pot",
                  ["Walk to the counter", "Grab the coffee pot", "Drink from the coffee pot"],
                  ["[WALK] <counter> (1)", "[GRAB] <coffeepot> (1)", "[DRINK] <coffeepot> (1)"]))

    for name in ["fridge", "cabinet", "trashcan", "microwave"]:
        tasks.append((f"train_open_{name}",
                      f"Open the {disp(name)}",
                      [f"Walk to the {disp(name)}", f"Open the {disp(name)}"],
                      [f"[WALK] <{name}> (1)", f"[OPEN] <{name}> (1)"]))

    for obj, src in surfaces.items():
        for dst in ["kitchentable", "coffeetable", "counter", "bathroomcounter"]:
            if dst == src:
                continue
            desc, plan, script = move_task(obj, src, dst)
            tasks.append((f"move_{obj}_{dst}", desc, plan, script))

    for obj, src in surfaces.items():
        for container in ["fridge", "trashcan", "cabinet"]:
            desc, plan, script = stow_task(obj, src, container)
            tasks.append((f"stow_{obj}_{container}", desc, plan, script))

    tasks.append(("train_switch_on_toaster",
                  "Switch on the toaster",
                  ["Walk to the toaster", "Switch on the toaster"],
                  ["[WALK] <toaster> (1)", "[SWITCHON] <toaster> (1)"]))
    tasks.append(("train_sit_sofa",
                  "Relax on the sofa",
                  ["Walk to the sofa", "Sit on the sofa"],
                  ["[WALK] <sofa> (1)", "[SIT] <sofa> (1)"]))
    tasks.append(("train_drink_milk",
                  "Drink the milk from the fridge",
                  ["Walk to the fridge", "Open the fridge", "Grab the milk",
                   "Drink the milk"],
                  ["[WALK] <fridge> (1)", "[OPEN] <fridge> (1)", "[GRAB] <milk> (1)",
                   "[DRINK] <milk> (1)"]))

    tuples = []
    for i, (tid, desc, plan, script) in enumerate(tasks[:60]):
        tuples.append({
            "id": tid,
            "description": desc,
            "plan": plan,
            "script": script,
            "split": "TRAIN" if i < 35 else "VALIDATION",
            "relevant_objects": [],
            "scene": "apartment.json",
        })
    assert len(tuples) == 60, len(tuples)
    return tuples


# ---------------------------------------------------------------------------
# TEST tasks with scripted Brain/Body transcripts. Each entry:
#   brain: one completion per plan revision (in request order)
#   body:  one completion per translated step (in request order)
# One K=3 transcript serves every smaller K: a lower budget consumes a prefix.
# ---------------------------------------------------------------------------

TEST_TASKS = [
    {
        "id": "turn_off_light",
        "description": "Turn off the light",
        "relevant": ["light (1)"],
        "script": ["[WALK] <light> (1)", "[SWITCHOFF] <light> (1)"],
        "plan": ["Walk to the light", "Switch off the light"],
        "brain": ["1. Walk to the light\n2. Switch off the light"],
        "body": ["[WALK] <light> (1)", "[SWITCHOFF] <light> (1)"],
    },
    {
        "id": "watch_tv",
        "description": "Watch tv from the sofa",
        "relevant": ["tv (1)"],
        "script": ["[WALK] <tv> (1)", "[SWITCHON] <tv> (1)",
                   "[WALK] <sofa> (1)", "[SIT] <sofa> (1)"],
        "plan": ["Walk to the tv", "Switch on the tv",
                 "Walk to the sofa", "Sit on the sofa"],
        "brain": ["1. Walk to the tv\n2. Switch on the tv\n"
                  "3. Walk to the sofa\n4. Sit on the sofa\n5. Enjoy the show"],
        "body": ["[WALK] <tv> (1)", "[SWITCHON] <tv> (1)",
                 "[WALK] <sofa> (1)", "[SIT] <sofa> (1)", "[Pass]"],
    },
    {
        "id": "brush_teeth",
        "description": "Brush teeth at the bathroom sink",
        "relevant": ["toothbrush (1)", "faucet (1)"],
        "script": ["[WALK] <bathroomcounter> (1)", "[GRAB] <toothbrush> (1)",
                   "[WALK] <faucet> (1)", "[SWITCHON] <faucet> (1)"],
        "plan": ["Walk to the bathroom counter", "Grab the toothbrush",
                 "Walk to the faucet", "Switch on the faucet"],
        "brain": ["1. Walk to the bathroom counter\n2. Grab the toothbrush\n"
                  "3. Walk to the faucet\n4. Switch on the faucet"],
        "body": ["[WALK] <bathroomcounter> (1)", "[GRAB] <toothbrush> (1)",
                 "[WALK] <faucet> (1)", "[SWITCHON] <faucet> (1)"],
    },
    {
        "id": "bring_coffeepot",
        "description": "Bring the coffee pot and the cupcake to the coffee table",
        "relevant": ["coffeepot (1)", "cupcake (1)"],
        "script": ["[WALK] <counter> (1)", "[GRAB] <coffeepot> (1)",
                   "[GRAB] <cupcake> (1)", "[WALK] <coffeetable> (1)",
                   "[PUTON] <coffeepot> (1) <coffeetable> (1)",
                   "[PUTON] <cupcake> (1) <coffeetable> (1)"],
        "plan": ["Walk to the counter", "Grab the coffee pot", "Grab the cupcake",
                 "Walk to the coffee table", "Put the coffee pot on the coffee table",
                 "Put the cupcake on the coffee table"],
        "brain": [
            "1. Grab the coffee pot\n2. Grab the cupcake\n3. Walk to the coffee table\n"
            "4. Put the coffee pot on the coffee table\n5. Put the cupcake on the coffee table",
            "1. Walk to the counter\n2. Grab the coffee pot\n3. Grab the cupcake\n"
            "4. Walk to the coffee table\n5. Put the coffee pot on the coffee table\n"
            "6. Put the cupcake on the coffee table",
        ],
        "body": [
            # revision 0: fails at step 1 (agent is still at the door)
            "[GRAB] <coffeepot> (1)",
            # revision 1
            "[WALK] <counter> (1)", "[GRAB] <coffeepot> (1)", "[GRAB] <cupcake> (1)",
            "[WALK] <coffeetable> (1)", "[PUTON] <coffeepot> (1) <coffeetable> (1)",
            "[PUTON] <cupcake> (1) <coffeetable> (1)",
        ],
    },
    {
        "id": "eat_chips",
        "description": "Eat chips from the cabinet",
        "relevant": ["chips (1)"],
        "script": ["[WALK] <cabinet> (1)", "[OPEN] <cabinet> (1)", "[GRAB] <chips> (1)"],
        "plan": ["Walk to the cabinet", "Open the cabinet", "Grab the chips"],
        "brain": [
            "1. Walk to the cabinet\n2. Grab the chips",
            "1. Walk to the cabinet\n2. Open the cabinet\n3. Grab the chips",
        ],
        "body": [
            # revision 0: the closed cabinet blocks the grab
            "[WALK] <cabinet> (1)", "[GRAB] <chips> (1)",
            # revision 1
            "[WALK] <cabinet> (1)", "[OPEN] <cabinet> (1)", "[GRAB] <chips> (1)",
        ],
    },
    {
        "id": "make_toast",
        "description": "Make toast with a slice of bread",
        "relevant": ["breadslice (1)", "toaster (1)"],
        "script": ["[WALK] <cabinet> (1)", "[OPEN] <cabinet> (1)",
                   "[GRAB] <breadslice> (1)", "[WALK] <toaster> (1)",
                   "[PUTON] <breadslice> (1) <toaster> (1)", "[SWITCHON] <toaster> (1)"],
        "plan": ["Walk to the cabinet", "Open the cabinet", "Grab the bread slice",
                 "Walk to the toaster", "Put the bread slice on the toaster",
                 "Switch on the toaster"],
        "brain": [
            "1. Walk to the cabinet\n2. Grab the bread slice\n3. Walk to the toaster\n"
            "4. Put the bread slice on the toaster\n5. Switch on the toaster",
            "1. Walk to the cabinet\n2. Open the cabinet\n3. Grab the bread slice\n"
            "4. Walk to the toaster\n5. Put the bread slice on the toaster\n"
            "6. Switch on the toaster",
        ],
        "body": [
            "[WALK] <cabinet> (1)", "[GRAB] <breadslice> (1)",
            "[WALK] <cabinet> (1)", "[OPEN] <cabinet> (1)", "[GRAB] <breadslice> (1)",
            "[WALK] <toaster> (1)", "[PUTON] <breadslice> (1) <toaster> (1)",
            "[SWITCHON] <toaster> (1)",
        ],
    },
    {
        "id": "put_salmon_fridge",
        "description": "Put the salmon in the fridge",
        "relevant": ["salmon (1)"],
        "script": ["[WALK] <counter> (1)", "[GRAB] <salmon> (1)", "[WALK] <fridge> (1)",
                   "[OPEN] <fridge> (1)", "[PUTBACK] <salmon> (1) <fridge> (1)",
                   "[CLOSE] <fridge> (1)"],
        "plan": ["Walk to the counter", "Grab the salmon", "Walk to the fridge",
                 "Open the fridge", "Put the salmon in the fridge", "Close the fridge"],
        "brain": [
            "1. Walk to the counter\n2. Grab the salmon\n3. Walk to the fridge\n"
            "4. Put the salmon in the fridge",
            "1. Open the fridge\n2. Put the salmon in the fridge\n3. Close the fridge",
        ],
        "body": [
            "[WALK] <counter> (1)", "[GRAB] <salmon> (1)", "[WALK] <fridge> (1)",
            "[PUTBACK] <salmon> (1) <fridge> (1)",
            "[OPEN] <fridge> (1)", "[PUTBACK] <salmon> (1) <fridge> (1)",
            "[CLOSE] <fridge> (1)",
        ],
    },
    {
        "id": "microwave_salmon",
        "description": "Microwave the salmon",
        "relevant": ["salmon (1)", "microwave (1)"],
        "script": ["[WALK] <counter> (1)", "[GRAB] <salmon> (1)", "[WALK] <microwave> (1)",
                   "[OPEN] <microwave> (1)", "[PUTBACK] <salmon> (1) <microwave> (1)",
                   "[CLOSE] <microwave> (1)", "[SWITCHON] <microwave> (1)"],
        "plan": ["Walk to the counter", "Grab the salmon", "Walk to the microwave",
                 "Open the microwave", "Put the salmon in the microwave",
                 "Close the microwave", "Switch on the microwave"],
        "brain": [
            "1. Walk to the counter\n2. Grab the salmon\n3. Walk to the microwave\n"
            "4. Put the salmon in the microwave\n5. Switch on the microwave",
            "1. Open the microwave\n2. Put the salmon in the microwave\n"
            "3. Switch on the microwave",
            "1. Close the microwave\n2. Switch on the microwave",
        ],
        "body": [
            "[WALK] <counter> (1)", "[GRAB] <salmon> (1)", "[WALK] <microwave> (1)",
            "[PUTBACK] <salmon> (1) <microwave> (1)",
            "[OPEN] <microwave> (1)", "[PUTBACK] <salmon> (1) <microwave> (1)",
            "[SWITCHON] <microwave> (1)",
            "[CLOSE] <microwave> (1)", "[SWITCHON] <microwave> (1)",
        ],
    },
    {
        "id": "throw_away_apple",
        "description": "Throw the apple in the trash can",
        "relevant": ["apple (1)"],
        "script": ["[WALK] <kitchentable> (1)", "[GRAB] <apple> (1)",
                   "[WALK] <trashcan> (1)", "[OPEN] <trashcan> (1)",
                   "[PUTBACK] <apple> (1) <trashcan> (1)", "[CLOSE] <trashcan> (1)"],
        "plan": ["Walk to the kitchen table", "Grab the apple", "Walk to the trash can",
                 "Open the trash can", "Put the apple in the trash can",
                 "Close the trash can"],
        "brain": [
            "1. Walk to the kitchen table\n2. Grab the apple\n3. Walk to the trash can\n"
            "4. Put the apple in the trash can",
            "1. Open the trash can\n2. Put the apple in the trash can\n3. Close the trash can",
            "1. Open the lid of the trash can\n2. Drop the apple into the trash can\n"
            "3. Shut the trash can",
        ],
        "body": [
            "[WALK] <kitchentable> (1)", "[GRAB] <apple> (1)", "[WALK] <trashcan> (1)",
            "[PUTBACK] <apple> (1) <trashcan> (1)",
            # revision 1: translator drops the command syntax entirely
            "open the trashcan",
            # revision 2
            "[OPEN] <trashcan> (1)", "[PUTBACK] <apple> (1) <trashcan> (1)",
            "[CLOSE] <trashcan> (1)",
        ],
    },
    {
        "id": "wash_plate",
        "description": "Wash the plate in the sink",
        "relevant": ["plate (1)"],
        "script": ["[WALK] <kitchentable> (1)", "[GRAB] <plate> (1)", "[WALK] <sink> (1)",
                   "[PUTBACK] <plate> (1) <sink> (1)", "[SWITCHON] <faucet> (1)",
                   "[SWITCHOFF] <faucet> (1)"],
        "plan": ["Walk to the kitchen table", "Grab the plate", "Walk to the sink",
                 "Put the plate in the sink", "Switch on the faucet",
                 "Switch off the faucet"],
        "brain": [
            "1. Grab the plate\n2. Put the plate in the sink",
            "1. Walk to the kitchen table\n2. Grab the plate\n3. Put the plate in the sink",
            # revision 2 arrives as prose and is rejected by the plan parser
            "I will carry the plate over to the sink, rinse it under the faucet, "
            "and leave it there to dry.",
            "1. Walk to the sink\n2. Put the plate in the sink\n"
            "3. Switch on the faucet\n4. Switch off the faucet",
        ],
        "body": [
            "[GRAB] <plate> (1)",
            "[WALK] <kitchentable> (1)", "[GRAB] <plate> (1)",
            "[PUTBACK] <plate> (1) <sink> (1)",
            "[WALK] <sink> (1)", "[PUTBACK] <plate> (1) <sink> (1)",
            "[SWITCHON] <faucet> (1)", "[SWITCHOFF] <faucet> (1)",
        ],
    },
]


def build_test_tuples():
    tuples = []
    for t in TEST_TASKS:
        tuples.append({
            "id": t["id"],
            "description": t["description"],
            "plan": t["plan"],
            "script": t["script"],
            "split": "TEST",
            "relevant_objects": t["relevant"],
            "scene": "apartment.json",
        })
    return tuples


def write_transcripts():
    for t in TEST_TASKS:
        write_jsonl(os.path.join(TRANSCRIPTS, t["id"] + ".brain.jsonl"),
                    [exchange(r) for r in t["brain"]])
        write_jsonl(os.path.join(TRANSCRIPTS, t["id"] + ".body.jsonl"),
                    [exchange(r) for r in t["body"]])

    # Oscillation demo: the revised plan repeats the failed one verbatim
    # (modulo case and punctuation), so the guard must fire.
    write_jsonl(os.path.join(TRANSCRIPTS, "oscillation_demo.brain.jsonl"), [
        exchange("1. Walk to the cabinet\n2. Grab the chips"),
        exchange("1. Walk to the Cabinet.\n2. Grab the chips!"),
    ])
    write_jsonl(os.path.join(TRANSCRIPTS, "oscillation_demo.body.jsonl"), [
        exchange("[WALK] <cabinet> (1)"),
        exchange("[GRAB] <chips> (1)"),
    ])

    # Plus-sign arm task: the first placement targets an unreachable cell;
    # the revised plan re-centers the figure and finishes.
    write_jsonl(os.path.join(TRANSCRIPTS, "plus_sign.brain.jsonl"), [
        exchange("1. Pick up the red cube\n2. Place it at the center of the plus (6, 2)\n"
                 "3. Pick up the blue cube\n4. Place it above the center (6, 1)\n"
                 "5. Pick up the green cube\n6. Place it below the center (6, 3)\n"
                 "7. Pick up the yellow cube\n8. Place it left of the center (5, 2)\n"
                 "9. Pick up the purple cube\n10. Place it right of the center (7, 2)"),
        exchange("1. Place the red cube at the new center (4, 2)\n"
                 "2. Pick up the blue cube\n3. Place it above the center (4, 1)\n"
                 "4. Pick up the green cube\n5. Place it below the center (4, 3)\n"
                 "6. Pick up the yellow cube\n7. Place it left of the center (3, 2)\n"
                 "8. Pick up the purple cube\n9. Place it right of the center (5, 2)\n"
                 "10. Return the arm to its home position"),
    ])
    write_jsonl(os.path.join(TRANSCRIPTS, "plus_sign.body.jsonl"), [
        exchange("[PICK] <red_cube> (1)"),
        exchange("[PLACE] (6, 2)"),
        exchange("[PLACE] (4, 2)"),
        exchange("[PICK] <blue_cube> (1)"),
        exchange("[PLACE] (4, 1)"),
        exchange("[PICK] <green_cube> (1)"),
        exchange("[PLACE] (4, 3)"),
        exchange("[PICK] <yellow_cube> (1)"),
        exchange("[PLACE] (3, 2)"),
        exchange("[PICK] <purple_cube> (1)"),
        exchange("[PLACE] (5, 2)"),
        exchange("[HOME]"),
    ])


# ---------------------------------------------------------------------------
# Tabletop scenarios (9x5 grid). Reference commands reach the goal; for
# scenarios with unreachable cells the naive commands ignore reachability and
# hit at least one Unreachable error.
# ---------------------------------------------------------------------------

def cube(name, color, col, row, shape="CUBE"):
    return {"name": name, "id": 1, "shape": shape, "color": color, "cell": [col, row]}


SCENARIOS = {
    "s1_right_side.json": {
        "description": "Move the cubes to the right side of the environment only.",
        "difficulty": "Easy",
        "objects": [cube("red_cube", "red", 0, 0),
                    cube("green_cube", "green", 1, 2),
                    cube("blue_cube", "blue", 2, 4)],
        "unreachable_cells": [],
        "goal": {"all": [{"type": "in_region", "filter": {"shapes": ["CUBE"]},
                          "region": "RIGHT_HALF"}]},
        "reference_commands": [
            "[PICK] <red_cube> (1)", "[PLACE] (5, 0)",
            "[PICK] <green_cube> (1)", "[PLACE] (6, 2)",
            "[PICK] <blue_cube> (1)", "[PLACE] (7, 4)", "[HOME]"],
        "naive_commands": [],
    },
    "s2_letter_l.json": {
        "description": "Use the cubes to form the shape of the capital letter 'L'. "
                       "The shape consists of a horizontal and a vertical line "
                       "intersecting at a right angle.",
        "difficulty": "Medium",
        "objects": [cube("red_cube", "red", 0, 4),
                    cube("yellow_cube", "yellow", 2, 4),
                    cube("green_cube", "green", 4, 4),
                    cube("blue_cube", "blue", 6, 4),
                    cube("violet_cube", "violet", 8, 4)],
        "unreachable_cells": [],
        "goal": {"all": [{"type": "pattern", "filter": {"shapes": ["CUBE"]},
                          "offsets": [[0, 0], [0, 1], [0, 2], [1, 2], [2, 2]]}]},
        "reference_commands": [
            "[PICK] <red_cube> (1)", "[PLACE] (1, 0)",
            "[PICK] <yellow_cube> (1)", "[PLACE] (1, 1)",
            "[PICK] <green_cube> (1)", "[PLACE] (1, 2)",
            "[PICK] <blue_cube> (1)", "[PLACE] (2, 2)",
            "[PICK] <violet_cube> (1)", "[PLACE] (3, 2)", "[HOME]"],
        "naive_commands": [],
    },
    "s3_spectrum_line.json": {
        "description": "Arrange cubes in a horizontal line in the center of the work "
                       "space, ordering them from left to right based on their color "
                       "in sequence of the visible spectrum.",
        "difficulty": "Medium",
        "objects": [cube("red_cube", "red", 1, 0),
                    cube("yellow_cube", "yellow", 3, 0),
                    cube("green_cube", "green", 5, 0),
                    cube("blue_cube", "blue", 7, 0)],
        "unreachable_cells": [[8, 2]],
        "goal": {"all": [
            {"type": "ordered", "filter": {"shapes": ["CUBE"]}, "axis": "x"},
            {"type": "in_region", "filter": {"shapes": ["CUBE"]}, "region": "CENTER_BAND"}]},
        "reference_commands": [
            "[PICK] <red_cube> (1)", "[PLACE] (1, 2)",
            "[PICK] <yellow_cube> (1)", "[PLACE] (3, 2)",
            "[PICK] <green_cube> (1)", "[PLACE] (5, 2)",
            "[PICK] <blue_cube> (1)", "[PLACE] (7, 2)", "[HOME]"],
        "naive_commands": [
            "[PICK] <red_cube> (1)", "[PLACE] (1, 2)",
            "[PICK] <yellow_cube> (1)", "[PLACE] (3, 2)",
            "[PICK] <green_cube> (1)", "[PLACE] (5, 2)",
            "[PICK] <blue_cube> (1)", "[PLACE] (8, 2)", "[HOME]"],
    },
    "s4_one_each_side.json": {
        "description": "Arrange objects in the scene such that left and right side of "
                       "the environment has exactly one cube and one cylinder. Each "
                       "object needs to be assigned a unique location.",
        "difficulty": "Medium",
        "objects": [cube("red_cube", "red", 0, 0),
                    cube("green_cube", "green", 2, 0),
                    cube("blue_cylinder", "blue", 1, 1, "CYLINDER"),
                    cube("yellow_cylinder", "yellow", 3, 1, "CYLINDER")],
        "unreachable_cells": [[1, 1]],
        "goal": {"all": [
            {"type": "count", "filter": {"shapes": ["CUBE"]}, "region": "LEFT_HALF", "count": 1},
            {"type": "count", "filter": {"shapes": ["CUBE"]}, "region": "RIGHT_HALF", "count": 1},
            {"type": "count", "filter": {"shapes": ["CYLINDER"]}, "region": "LEFT_HALF", "count": 1},
            {"type": "count", "filter": {"shapes": ["CYLINDER"]}, "region": "RIGHT_HALF", "count": 1}]},
        "reference_commands": [
            "[PICK] <green_cube> (1)", "[PLACE] (6, 0)",
            "[PICK] <yellow_cylinder> (1)", "[PLACE] (7, 1)", "[HOME]"],
        "naive_commands": [
            "[PICK] <blue_cylinder> (1)", "[PLACE] (6, 2)",
            "[PICK] <green_cube> (1)", "[PLACE] (6, 0)", "[HOME]"],
    },
    "s5_red_triangle.json": {
        "description": "Create a triangle in the right part of the working space using "
                       "reddish cubes.",
        "difficulty": "Hard",
        "objects": [cube("red_cube", "red", 0, 0),
                    cube("orange_cube", "orange", 0, 2),
                    cube("pink_cube", "pink", 0, 4),
                    cube("blue_cube", "blue", 4, 2)],
        "unreachable_cells": [[8, 2]],
        "goal": {"all": [
            {"type": "pattern", "filter": {"colors": ["red", "orange", "pink"]},
             "offsets": [[0, 0], [2, 0], [1, 1]]},
            {"type": "in_region", "filter": {"colors": ["red", "orange", "pink"]},
             "region": "RIGHT_HALF"}]},
        "reference_commands": [
            "[PICK] <red_cube> (1)", "[PLACE] (5, 1)",
            "[PICK] <orange_cube> (1)", "[PLACE] (7, 1)",
            "[PICK] <pink_cube> (1)", "[PLACE] (6, 2)", "[HOME]"],
        "naive_commands": [
            "[PICK] <red_cube> (1)", "[PLACE] (5, 1)",
            "[PICK] <orange_cube> (1)", "[PLACE] (7, 1)",
            "[PICK] <pink_cube> (1)", "[PLACE] (8, 2)", "[HOME]"],
    },
    "s6_plus_sign.json": {
        "description": "Create a plus sign in the working place using the cubes.",
        "difficulty": "Hard",
        "objects": [cube("red_cube", "red", 0, 0),
                    cube("blue_cube", "blue", 2, 0),
                    cube("green_cube", "green", 0, 4),
                    cube("yellow_cube", "yellow", 2, 4),
                    cube("purple_cube", "purple", 0, 2)],
        "unreachable_cells": [[6, 2]],
        "goal": {"all": [{"type": "pattern", "filter": {"shapes": ["CUBE"]},
                          "offsets": [[0, 0], [0, 1], [0, -1], [1, 0], [-1, 0]]}]},
        "reference_commands": [
            "[PICK] <red_cube> (1)", "[PLACE] (4, 2)",
            "[PICK] <blue_cube> (1)", "[PLACE] (4, 1)",
            "[PICK] <green_cube> (1)", "[PLACE] (4, 3)",
            "[PICK] <yellow_cube> (1)", "[PLACE] (3, 2)",
            "[PICK] <purple_cube> (1)", "[PLACE] (5, 2)", "[HOME]"],
        "naive_commands": [
            "[PICK] <red_cube> (1)", "[PLACE] (6, 2)", "[HOME]"],
    },
    "s7_segregate.json": {
        "description": "Segregate objects based on geometric shapes into left and right "
                       "part of work space. Objects of different shapes should not be "
                       "on the same part of work space.",
        "difficulty": "Hard",
        "objects": [cube("red_cube", "red", 5, 0),
                    cube("green_cube", "green", 4, 4),
                    cube("blue_cylinder", "blue", 1, 3, "CYLINDER"),
                    cube("yellow_cylinder", "yellow", 0, 1, "CYLINDER")],
        "unreachable_cells": [[7, 4]],
        "goal": {"all": [
            {"type": "segregated", "shape": "CUBE", "region": "LEFT_HALF"},
            {"type": "segregated", "shape": "CYLINDER", "region": "RIGHT_HALF"}]},
        "reference_commands": [
            "[PICK] <red_cube> (1)", "[PLACE] (1, 0)",
            "[PICK] <green_cube> (1)", "[PLACE] (2, 4)",
            "[PICK] <blue_cylinder> (1)", "[PLACE] (6, 3)",
            "[PICK] <yellow_cylinder> (1)", "[PLACE] (5, 1)", "[HOME]"],
        "naive_commands": [
            "[PICK] <red_cube> (1)", "[PLACE] (1, 0)",
            "[PICK] <blue_cylinder> (1)", "[PLACE] (7, 4)", "[HOME]"],
    },
}


def write_tabletop():
    for name, scenario in SCENARIOS.items():
        doc = {"grid": {"width": 9, "height": 5}}
        doc.update(scenario)
        with open(os.path.join(TABLETOP, name), "w") as f:
            json.dump(doc, f, indent=2)
            f.write("\n")


def main():
    for d in (DATASET, TRANSCRIPTS, TABLETOP):
        os.makedirs(d, exist_ok=True)
    tuples = build_train_val() + build_test_tuples()
    write_jsonl(os.path.join(DATASET, "tasks.jsonl"), tuples)
    write_transcripts()
    write_tabletop()
    splits = {}
    for t in tuples:
        splits[t["split"]] = splits.get(t["split"], 0) + 1
    print("dataset:", splits)


if __name__ == "__main__":
    main()
