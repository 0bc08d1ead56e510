"""Spec/command pairs shared by the CLI tests and the determinism check."""
import os
import subprocess
import sys
from pathlib import Path

SPECS = Path(__file__).parent / "specs"

CASES = [
    ("c4.json", ["group", "show"]),
    ("s3.json", ["group", "normals"]),
    ("c2xc4.json", ["group", "ep"]),
    ("s3.json", ["group", "homs", "--params", '{"domain": "S3", "codomain": "S3"}']),
    ("c4.json", ["system", "build"]),
    ("s3.json", ["system", "lattice"]),
    ("s3.json", ["system", "query", "--relation", "C", "--params", '{"elements": [[0, 1], [1, 0]]}']),
    ("s3.json", ["system", "dual", "--params", '{"map": "sign"}']),
    ("s3.json", ["system", "types-equal",
                 "--params", '{"beta": [[0, 1]], "gamma": [[0, 2]], "subsystem": 1}']),
    ("amalgam.json", ["amalgam", "fiber"]),
    ("amalgam.json", ["amalgam", "theta"]),
    ("fields.json", ["field", "build"]),
    ("fields.json", ["field", "minpoly"]),
    ("fields.json", ["field", "irreducible"]),
    ("fields.json", ["field", "galois", "--params", '{"extension": "gf16"}']),
    ("fields.json", ["field", "galois", "--params", '{"extension": "s3"}']),
    ("code_biquadratic.json", ["code", "encode"]),
    ("two_code.json", ["code", "validate2"]),
    (None, ["kummer", "example"]),
    ("kummer_variant.json", ["kummer", "run"]),
    ("s3.json", ["imaginary", "canonical", "--params", '{"set": "three_cycles"}']),
    ("s3.json", ["imaginary", "closure", "--params", '{"set": "three_cycle"}']),
]


def argv(case):
    spec, args = case
    return args + (["--spec", str(SPECS / spec)] if spec else [])


def run_subprocess(args, **env):
    full = dict(os.environ, **env)
    return subprocess.run([sys.executable, "-m", "galsys", *args], capture_output=True, env=full,
                          timeout=600)
