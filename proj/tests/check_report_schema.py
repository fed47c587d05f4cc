# SPDX-License-Identifier: Apache-2.0
"""Runs the CLI and validates its JSON output against the shipped schemas."""
import json
import pathlib
import subprocess
import sys

import jsonschema

cli, root = sys.argv[1], pathlib.Path(sys.argv[2])
report_schema = json.loads((root / "schemas/validate_report.schema.json").read_text())
curve_schema = json.loads((root / "schemas/curve.schema.json").read_text())

runs = [
    (["validate", "--samples", "20000"], report_schema, (0, 1)),
    (["validate", "--config", str(root / "scenarios/wide_jitter.json"), "--samples", "20000"], report_schema, (0, 1)),
    (["pattern", "--format", "json", "--resolution", "20"], curve_schema, (0,)),
    (["pointing", "--format", "json", "--points", "20", "--samples", "20000"], curve_schema, (0,)),
    (["outage", "--format", "json", "--samples", "20000"], curve_schema, (0,)),
]
for args, schema, codes in runs:
    proc = subprocess.run([cli, *args], capture_output=True, text=True)
    if proc.returncode not in codes:
        sys.exit(f"{args}: exit {proc.returncode}: {proc.stderr}")
    doc = json.loads(proc.stdout)
    jsonschema.validate(doc, schema)
    if schema is report_schema and doc["passed"] != (proc.returncode == 0):
        sys.exit(f"{args}: 'passed' disagrees with the exit code")
    print("ok", " ".join(args))
