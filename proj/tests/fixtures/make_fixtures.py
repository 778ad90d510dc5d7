#!/usr/bin/env python3
"""Regenerates the committed session fixtures. Deterministic (fixed seeds)."""
import json
import os
import random

HERE = os.path.dirname(os.path.abspath(__file__))
ROOT = os.path.dirname(os.path.dirname(HERE))

GRADES = [
    {"label": "Excellent", "score": 90},
    {"label": "Good", "score": 75},
    {"label": "Fair", "score": 60},
    {"label": "Poor", "score": 45},
    {"label": "Very Poor", "score": 30},
]

ENV = {
    "ambient_noise_dba": 55,
    "snr_db": 20,
    "mic_distance_overhead_cm": 45,
    "mic_distance_dashboard_cm": 70,
    "video_positions": 2,
    "audio_points": 1,
    "capture_fps": 60,
}

FUZZY_STEPS = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]


def internal_nodes(node):
    if node["children"]:
        yield node
        for c in node["children"]:
            yield from internal_nodes(c)


def leaves(node):
    if not node["children"]:
        yield node
    for c in node["children"]:
        yield from leaves(c)


def write(name, doc):
    with open(os.path.join(HERE, name), "w") as f:
        json.dump(doc, f, indent=2)
        f.write("\n")


def fuzzy_panel(hierarchy, experts, seed):
    rng = random.Random(seed)
    # shared latent importance per child, perturbed per expert
    latent = {n["id"]: [rng.uniform(0.2, 1.0) for _ in n["children"]] for n in internal_nodes(hierarchy)}
    quality = {l["id"]: rng.uniform(0.0, 1.5) for l in leaves(hierarchy)}
    out = []
    for k in range(experts):
        judgments = {}
        for node in internal_nodes(hierarchy):
            v = [x * rng.uniform(0.8, 1.25) for x in latent[node["id"]]]
            pairs = []
            n = len(v)
            for i in range(n):
                for j in range(i + 1, n):
                    raw = 0.5 + 0.4 * (v[i] - v[j]) / (v[i] + v[j]) * 2.0
                    value = min(FUZZY_STEPS, key=lambda s: abs(s - raw))
                    pairs.append([i + 1, j + 1, value])
            judgments[node["id"]] = pairs
        ratings = {}
        for leaf in leaves(hierarchy):
            g = int(round(quality[leaf["id"]] + rng.gauss(0.0, 0.8)))
            ratings[leaf["id"]] = min(5, max(1, g + 1))
        out.append({"expert_id": "expert-%02d" % (k + 1), "judgments": judgments, "ratings": ratings})
    return out


def main():
    with open(os.path.join(ROOT, "samples", "pcafe_hierarchy.json")) as f:
        pcafe = json.load(f)

    write("pcafe_fuzzy_10.json", {
        "session_id": "pcafe-fuzzy-10",
        "scale": "fuzzy_01_09",
        "hierarchy": pcafe,
        "evaluation_set": GRADES,
        "environment": ENV,
        "experts": fuzzy_panel(pcafe, 10, 20240611),
    })

    # every judgment neutral, every rating the best grade
    uniform = []
    for k in range(4):
        uniform.append({
            "expert_id": "u%d" % (k + 1),
            "judgments": {n["id"]: [[i + 1, j + 1, 0.5] for i in range(len(n["children"]))
                                    for j in range(i + 1, len(n["children"]))] for n in internal_nodes(pcafe)},
            "ratings": {l["id"]: 1 for l in leaves(pcafe)},
        })
    write("unanimity.json", {
        "session_id": "unanimity",
        "scale": "fuzzy_01_09",
        "hierarchy": pcafe,
        "evaluation_set": GRADES,
        "experts": uniform,
    })

    small = {
        "id": "goal", "label": "Goal", "children": [
            {"id": "speech", "label": "Speech", "metric_kind": "accuracy", "children": []},
            {"id": "vision", "label": "Vision", "metric_kind": "accuracy", "children": []},
            {"id": "latency", "label": "Latency", "metric_kind": "efficiency", "children": []},
        ],
    }
    crisp_experts = [
        {"expert_id": "a", "judgments": {"goal": [[1, 2, 2], [1, 3, 4], [2, 3, 2]]},
         "ratings": {"speech": 1, "vision": 2, "latency": 3}},
        {"expert_id": "b", "judgments": {"goal": [[1, 2, 3], [1, 3, 5], [2, 3, 2]]},
         "ratings": {"speech": 2, "vision": 2, "latency": 3}},
        {"expert_id": "c", "judgments": {"goal": [[1, 2, 1], [1, 3, 3], [2, 3, 3]]},
         "ratings": {"speech": 1, "vision": 3, "latency": 4}},
    ]
    write("crisp_small.json", {
        "session_id": "crisp-small",
        "scale": "crisp_1_9",
        "hierarchy": small,
        "evaluation_set": GRADES,
        "environment": ENV,
        "experts": crisp_experts,
    })

    cyclic = json.loads(json.dumps(crisp_experts))
    cyclic[1]["judgments"]["goal"] = [[1, 2, 3], [1, 3, 0.2], [2, 3, 3]]
    write("crisp_cyclic.json", {
        "session_id": "crisp-cyclic",
        "scale": "crisp_1_9",
        "hierarchy": small,
        "evaluation_set": GRADES,
        "experts": cyclic,
    })

    incomplete = json.loads(json.dumps(crisp_experts))
    incomplete[2]["judgments"]["goal"] = [[1, 2, 1], [1, 3, 3]]
    del incomplete[0]["ratings"]["latency"]
    write("crisp_incomplete.json", {
        "session_id": "crisp-incomplete",
        "scale": "crisp_1_9",
        "hierarchy": small,
        "evaluation_set": GRADES,
        "experts": incomplete,
    })

    # two leaves of nearly equal weight with opposite verdicts; sqrt(9/8) ~ 1.06
    tie = {
        "id": "goal", "label": "Goal", "children": [
            {"id": "left", "label": "Left", "metric_kind": "subjective", "children": []},
            {"id": "right", "label": "Right", "metric_kind": "subjective", "children": []},
        ],
    }
    write("near_tie.json", {
        "session_id": "near-tie",
        "scale": "crisp_1_9",
        "hierarchy": tie,
        "evaluation_set": GRADES,
        "experts": [
            {"expert_id": "p", "judgments": {"goal": [[1, 2, 9]]}, "ratings": {"left": 1, "right": 3}},
            {"expert_id": "q", "judgments": {"goal": [[1, 2, 0.125]]}, "ratings": {"left": 1, "right": 3}},
        ],
    })

    with open(os.path.join(HERE, "malformed.json"), "w") as f:
        f.write('{"session_id": "broken", "scale": "fuzzy_01_09", "hierarchy": {"id": "g",')


if __name__ == "__main__":
    main()
