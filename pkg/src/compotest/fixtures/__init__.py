"""Example systems shipped with the package, one ``.lts`` file each."""

from __future__ import annotations

from importlib import resources

from ..io import parse_lts
from ..lts import Lts


def names() -> list[str]:
    return sorted(p.name[:-4] for p in resources.files(__name__).iterdir() if p.name.endswith(".lts"))


def text(name: str) -> str:
    return resources.files(__name__).joinpath(f"{name}.lts").read_text(encoding="utf-8")


def load(name: str) -> Lts:
    if name not in names():
        raise KeyError(f"no fixture {name!r}")
    return parse_lts(text(name))
