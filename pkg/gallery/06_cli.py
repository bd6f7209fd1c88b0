"""Driving the command-line tool from Python on the shipped demo config.

Run: python3 gallery/06_cli.py
The same runs are available as `maxreg <command> --config configs/demo_scalar.json`.
"""
import json
import os
import tempfile

from maxreg.cli import main

here = os.path.dirname(os.path.abspath(__file__))
config = os.path.join(here, "..", "configs", "demo_scalar.json")

with tempfile.TemporaryDirectory() as tmp:
    for command in ("solve", "certify", "regularity", "weights"):
        out = os.path.join(tmp, command)
        code = main([command, "--config", config, "--out", out])
        print(f"maxreg {command}: exit {code}, files {sorted(os.listdir(out))}")

    with open(os.path.join(tmp, "solve", "summary.json")) as fh:
        s = json.load(fh)
    print(f"solve residual {s['residual_sup']:.1e}, max condition {s['condition']['max']:.3f}")
    with open(os.path.join(tmp, "certify", "certificates.json")) as fh:
        c = json.load(fh)
    print(f"certify: route {c['route']}, [a] tilde order 2 = {c['route_i']['a']['constant']:.4f}")
    with open(os.path.join(tmp, "weights", "weights.json")) as fh:
        w = json.load(fh)
    print(f"weights: [w]_A2 = {w['ap_constant']:.3f} within bound {w['ap_bound']}: {w['within_bound']}")
