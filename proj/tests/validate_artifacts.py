#!/usr/bin/env python3
"""Runs every CLI command on small inputs, validates each JSON artifact
against its schema and checks byte-identical reruns."""
import filecmp
import json
import pathlib
import subprocess
import sys

import jsonschema

cli, schema_dir, work = sys.argv[1], pathlib.Path(sys.argv[2]), pathlib.Path(sys.argv[3])
work.mkdir(parents=True, exist_ok=True)
schemas = {p.name.split(".")[0]: json.loads(p.read_text()) for p in schema_dir.glob("*.schema.json")}


def run(*args, expect=0):
    r = subprocess.run([cli, *args], capture_output=True, text=True)
    if r.returncode != expect:
        sys.exit(f"{' '.join(args)}: exit {r.returncode}, expected {expect}\n{r.stderr}")


runs = {
    "spectrum": ["spectrum", "--mesh", "torus:16", "--k", "4"],
    "nodal": ["nodal", "--mesh", "icosphere:2"],
    "classify": ["classify", "--mesh", "torus:16", "--metric", "bump:1:0.8"],
    "sweep": ["certify-sweep", "--mesh", "torus:16", "--a-grid", "0,1", "--sigma-grid", "0.8", "--seed", "3",
              "--shears", "10", "--flows", "2", "--samples", "10"],
    "audit": ["audit-s2", "--subdiv", "2", "--trials", "3", "--seed", "9"],
}
for name, args in runs.items():
    for rep in ("a", "b"):
        run(*args, "--out", str(work / name / rep))
run("orbit-test", "--certificate", str(work / "sweep" / "a" / "certificate.json"), "--samples", "10", "--flows", "2",
    "--seed", "4", "--out", str(work / "orbit" / "a"))

count = 0
for path in sorted(work.rglob("*.json")):
    doc = json.loads(path.read_text())
    jsonschema.validate(doc, schemas[doc["artifact"]])
    count += 1
    twin = pathlib.Path(str(path).replace("/a/", "/b/"))
    if "/a/" in str(path) and twin.exists():
        if not filecmp.cmp(path, twin, shallow=False):
            sys.exit(f"rerun differs: {path}")
kinds = {json.loads(p.read_text())["artifact"] for p in work.rglob("*.json")}
missing = set(schemas) - kinds
if missing:
    sys.exit(f"no artifact produced for schemas {sorted(missing)}")
for path in work.rglob("*.csv"):
    twin = pathlib.Path(str(path).replace("/a/", "/b/"))
    if "/a/" in str(path) and not filecmp.cmp(path, twin, shallow=False):
        sys.exit(f"rerun differs: {path}")
print(f"{count} artifacts valid, reruns byte-identical")
