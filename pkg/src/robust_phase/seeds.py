"""Deterministic seed derivation: a master seed mixed with cell indices
through splitmix64, so parallel experiment cells get independent,
reproducible streams."""

from __future__ import annotations

_MASK = (1 << 64) - 1


def splitmix64(state: int) -> int:
    z = (state + 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return (z ^ (z >> 31)) & _MASK


def derive_seed(master: int, *indices: int) -> int:
    """Mix a master seed with any number of cell indices."""
    s = master & _MASK
    for ix in indices:
        s = splitmix64(s ^ ((ix + 0x9E3779B97F4A7C15) & _MASK))
    return s
