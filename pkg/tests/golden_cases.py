"""Seeded CLI invocations with recorded output under tests/golden/.

Run this file directly to rewrite the recordings after an intended change.
"""

from __future__ import annotations

import contextlib
import io
import os
import subprocess
import sys
from pathlib import Path

from compotest.cli import main

GOLDEN_DIR = Path(__file__).parent / "golden"

CASES = {
    "check_eco_fig3": ["check-eco", "figs/fig3s.lts", "figs/fig3e.lts"],
    "check_eco_fig5": ["check-eco", "fig5i", "fig5e"],
    "check_ma_fig9": ["check-ma", "fig9s", "fig9e"],
    "check_uioco_fig7": ["check-uioco", "figs/fig7is.lts", "figs/fig7s.lts"],
    "check_uioco_fig9_component": ["check-uioco", "fig9is", "fig9s"],
    "utrace_closed_fig8e": ["check-utrace-closed", "fig8e"],
    "utrace_closed_fig3e": ["check-utrace-closed", "fig3e"],
    "compose_fig3": ["compose", "fig3s", "fig3e"],
    "compose_fig7": ["compose", "fig7s", "fig7e"],
    "validate_fig7s": ["validate", "fig7s"],
    "gen_eco_fig5_directed": ["gen-test", "eco", "--env", "fig5e", "--sut", "fig5i",
                              "--mode", "directed", "--steps", "C>a,E:r,C"],
    "gen_eco_fig5_random": ["gen-test", "eco", "--env", "fig5e", "--sut", "fig5i", "--seed", "3"],
    "gen_eco_fig7_random": ["gen-test", "eco", "--env", "fig7e", "--inputs", "a b r",
                            "--outputs", "x", "--seed", "11", "--depth", "4"],
    "gen_cioco_fig9_exhaustive": ["gen-test", "cioco", "--spec", "fig9s", "--env", "fig9e",
                                  "--mode", "exhaustive", "--depth", "1"],
    "gen_cioco_fig3_exhaustive": ["gen-test", "cioco", "--spec", "fig3s", "--env", "fig3e",
                                  "--mode", "exhaustive", "--depth", "3"],
    "gen_cioco_fig7_random": ["gen-test", "cioco", "--spec", "fig7s", "--env", "fig7e", "--seed", "5"],
    "otf_eco_fig5": ["otf", "eco", "--sut", "fig5i", "--env", "fig5e", "--seed", "2"],
    "otf_uioco_fig7": ["otf", "uioco", "--sut", "fig7is", "--spec", "fig7s", "--seed", "2"],
    "otf_cioco_fig7": ["otf", "cioco", "--sut", "fig7is", "--spec", "fig7s", "--env", "fig7e",
                       "--seed", "7", "--steps", "40"],
    "otf_cioco_fig9": ["otf", "cioco", "--sut", "figs/fig9is.lts", "--spec", "figs/fig9s.lts",
                       "--env", "figs/fig9e.lts", "--seed", "1"],
    "otf_eco_fig7_weights": ["otf", "eco", "--sut", "fig7is", "--env", "fig7ie", "--seed", "3",
                             "--weights", "A=0.05,E=1", "--input-wins", "0.9"],
}


def render(out: str, code: int) -> str:
    return f"{out}[exit {code}]\n"


def run_inprocess(argv) -> str:
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(list(argv))
    return render(buf.getvalue(), code)


def run_subprocess(argv, hash_seed: str) -> str:
    env = {**os.environ, "PYTHONHASHSEED": hash_seed}
    env.pop("COMPOTEST_SEED", None)
    proc = subprocess.run(
        [sys.executable, "-m", "compotest.cli", *argv],
        capture_output=True, text=True, env=env, cwd=GOLDEN_DIR.parent.parent,
    )
    return render(proc.stdout, proc.returncode)


def recorded(name: str) -> str:
    return (GOLDEN_DIR / f"{name}.txt").read_text(encoding="utf-8")


if __name__ == "__main__":
    os.chdir(GOLDEN_DIR.parent.parent)
    GOLDEN_DIR.mkdir(exist_ok=True)
    for name, argv in CASES.items():
        (GOLDEN_DIR / f"{name}.txt").write_text(run_inprocess(argv), encoding="utf-8")
        print(name)
