#!/usr/bin/env python3
"""Runs every --json command against the fixtures and validates the output against schemas/."""
import json
import pathlib
import subprocess
import sys

import jsonschema
from referencing import Registry, Resource

cli = sys.argv[1]
root = pathlib.Path(__file__).resolve().parent.parent
fixtures = root / "tests" / "fixtures"

schemas = {}
for path in sorted((root / "schemas").glob("*.schema.json")):
    doc = json.loads(path.read_text())
    jsonschema.Draft202012Validator.check_schema(doc)
    schemas[path.name.split(".")[0]] = doc
registry = Registry().with_resources((s["$id"], Resource.from_contents(s)) for s in schemas.values())

cases = [
    ("report", ["evaluate", "pcafe_fuzzy_10.json"], 0),
    ("report", ["evaluate", "pcafe_fuzzy_10.json", "--method", "linear"], 0),
    ("report", ["evaluate", "crisp_small.json"], 0),
    ("report", ["evaluate", "unanimity.json"], 0),
    ("weights", ["weights", "pcafe_fuzzy_10.json"], 0),
    ("weights", ["weights", "pcafe_fuzzy_10.json", "--method", "linear", "--theta", "20"], 0),
    ("weights", ["weights", "near_tie.json"], 0),
    ("sensitivity", ["sensitivity", "pcafe_fuzzy_10.json", "--epsilon", "0.1", "--trials", "20"], 0),
    ("sensitivity", ["sensitivity", "crisp_cyclic.json", "--epsilon", "0.5", "--trials", "20"], 0),
    ("validate", ["validate", "pcafe_fuzzy_10.json"], 0),
    ("validate", ["validate", "crisp_cyclic.json"], 3),
    ("validate", ["validate", "crisp_incomplete.json"], 4),
    ("error", ["validate", "malformed.json"], 2),
    ("error", ["evaluate", "crisp_incomplete.json"], 4),
    ("error", ["weights", "pcafe_fuzzy_10.json", "--method", "linear", "--theta", "0"], 5),
    ("hierarchy", ["preset", "pcafe"], 0),
]

failed = 0
for schema, args, want in cases:
    argv = [cli, "--json"] + [str(fixtures / a) if a.endswith(".json") else a for a in args]
    proc = subprocess.run(argv, capture_output=True, text=True)
    label = "%-11s %s" % (schema, " ".join(args))
    try:
        if proc.returncode != want:
            raise ValueError("exit %d, expected %d" % (proc.returncode, want))
        jsonschema.Draft202012Validator(schemas[schema], registry=registry).validate(json.loads(proc.stdout))
        print("ok   " + label)
    except Exception as e:  # noqa: BLE001
        failed += 1
        print("FAIL %s: %s" % (label, str(e).splitlines()[0]))
sys.exit(1 if failed else 0)
