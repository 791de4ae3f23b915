"""Labeled spectra shared by every engine.

A :class:`Spectrum` stores one entry per *state*: a doubly degenerate level
appears twice (``s = 1`` and ``s = 2``), each entry carrying the level's
multiplicity.  Indexing a spectrum therefore counts states, which is the
convention behind "the first 2000 states".
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

__all__ = ["LabeledLevel", "Spectrum"]


@dataclass(frozen=True)
class LabeledLevel:
    energy: float
    labels: tuple = ()
    s: Optional[int] = None
    multiplicity: int = 1
    engine: str = ""

    def sort_key(self):
        return (self.energy, self.labels, self.s or 0)


@dataclass(frozen=True)
class Spectrum:
    levels: tuple[LabeledLevel, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "levels",
                           tuple(sorted(self.levels, key=LabeledLevel.sort_key)))

    @classmethod
    def from_energies(cls, energies: Iterable[float], engine: str = "") -> "Spectrum":
        return cls(tuple(LabeledLevel(float(e), engine=engine) for e in energies))

    @property
    def energies(self) -> np.ndarray:
        return np.array([lv.energy for lv in self.levels], dtype=float)

    def __len__(self) -> int:
        return len(self.levels)

    def __iter__(self):
        return iter(self.levels)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return Spectrum(self.levels[i])
        return self.levels[i]

    def first(self, n: int) -> "Spectrum":
        return Spectrum(self.levels[:n])

    def count_below(self, e: float) -> int:
        """Number of states with energy <= e."""
        return int(np.searchsorted(self.energies, e, side="right"))

    def multiplicities(self) -> list[int]:
        """Multiplicity of each distinct level, in ascending order."""
        out: list[int] = []
        prev: Sequence = ()
        for lv in self.levels:
            key = (lv.energy, lv.labels)
            if key != prev:
                out.append(lv.multiplicity)
                prev = key
        return out
