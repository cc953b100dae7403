#!/usr/bin/env python3
"""Regenerate the committed fixtures and their golden CLI outputs.

Run explicitly from the repo root:

    python3 scripts/make_fixtures.py

Goldens are byte-exact expected reports; tests never regenerate them.
"""

import json
import pathlib
import subprocess
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"
GOLDEN = FIXTURES / "golden"

sys.path.insert(0, str(ROOT / "src"))

from pmlkit import geometric_binary_model, discretize_poisson_binomial  # noqa: E402
from pmlkit.modelio import save_model_json  # noqa: E402


def write(path, text):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    print(f"wrote {path.relative_to(ROOT)}")


def main():
    FIXTURES.mkdir(exist_ok=True)
    GOLDEN.mkdir(exist_ok=True)

    save_model_json(geometric_binary_model(0.3, 0.5), FIXTURES / "geometric_binary_p03_q05.json")
    save_model_json(discretize_poisson_binomial(2.0, 0.5, 10), FIXTURES / "poisson_binomial_lam2_p05.json")

    identity4 = {
        "alphabet_x": ["a", "b", "c", "d"],
        "alphabet_y": ["a", "b", "c", "d"],
        "prior": [0.25, 0.25, 0.25, 0.25],
        "channel": [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ],
    }
    write(FIXTURES / "identity4.json", json.dumps(identity4, indent=2, sort_keys=True) + "\n")

    write(
        FIXTURES / "identity4_channel.csv",
        "a,b,c,d\n1.0,0.0,0.0,0.0\n0.0,1.0,0.0,0.0\n0.0,0.0,1.0,0.0\n0.0,0.0,0.0,1.0\n",
    )
    write(FIXTURES / "identity4_prior.csv", "a,0.25\nb,0.25\nc,0.25\nd,0.25\n")

    bad = dict(identity4)
    bad["channel"] = [row[:] for row in identity4["channel"]]
    bad["channel"][1][1] = 0.97
    write(FIXTURES / "bad_rowsum.json", json.dumps(bad, indent=2, sort_keys=True) + "\n")

    families = {
        "additive_gaussian": {"family": "additive_gaussian", "params": {"sigma_x": 1.0, "sigma_n": 1.0}},
        "bivariate_gaussian": {"family": "bivariate_gaussian", "params": {"sigma_x": 1.0, "sigma_y": 1.0, "rho": 0.5}},
        "gaussian_mixture": {"family": "gaussian_mixture", "params": {"sigma": 1.0}},
        "poisson_binomial": {"family": "poisson_binomial", "params": {"lam": 2.0, "p": 0.5}},
        "geometric_binary": {"family": "geometric_binary", "params": {"p": 0.3, "q": 0.5}},
    }
    for name, spec in families.items():
        write(FIXTURES / f"family_{name}.json", json.dumps(spec, indent=2, sort_keys=True) + "\n")

    goldens = {
        "compute_geometric_binary.json": [
            "compute", str(FIXTURES / "geometric_binary_p03_q05.json"),
        ],
        "compute_identity4.json": ["compute", str(FIXTURES / "identity4.json")],
        "tail_identity4.json": [
            "tail", str(FIXTURES / "identity4.json"), "--eps", "1.0", "--eps", "1.3862943611198906",
        ],
        "continuous_additive_gaussian.json": [
            "continuous", "--family", str(FIXTURES / "family_additive_gaussian.json"),
            "--outcome", "0", "--check-grid",
        ],
        "continuous_gaussian_mixture.json": [
            "continuous", "--family", str(FIXTURES / "family_gaussian_mixture.json"),
            "--outcome", "0.5",
        ],
    }
    for name, argv in goldens.items():
        proc = subprocess.run(
            [sys.executable, "-m", "pmlkit.cli"] + argv,
            capture_output=True, text=True, cwd=ROOT,
            env={"PATH": "/usr/bin:/bin", "PYTHONPATH": str(ROOT / "src")},
        )
        if proc.returncode != 0:
            raise SystemExit(f"golden {name} failed: {proc.stderr}")
        write(GOLDEN / name, proc.stdout)


if __name__ == "__main__":
    main()
