"""Cached groups, KL data and cactus objects shared by the tests, plus oracle glue."""
from __future__ import annotations

from functools import lru_cache
from pathlib import Path

from cactus_hecke.cactus import Cactus
from cactus_hecke.coxeter import CoxGroup, group_from_spec

GOLDEN = Path(__file__).parent / "golden"

# (label, oracle kind, oracle rank parameter)
ORACLE_GROUPS = [("A1", "A", 1), ("A2", "A", 2), ("A3", "A", 3), ("B2", "B", 2), ("I2(5)", "I", 5)]


@lru_cache(maxsize=None)
def group(label: str) -> CoxGroup:
    return group_from_spec(label)


@lru_cache(maxsize=None)
def cactus(label: str) -> Cactus:
    return Cactus(group(label))


def kl(label: str):
    return cactus(label).kl


def jring(label: str):
    return cactus(label).jring


@lru_cache(maxsize=None)
def brute(kind: str, n: int):
    from oracle import BruteGroup, BruteHecke, perm_gens

    return BruteHecke(BruteGroup(perm_gens(kind, n)))


def to_brute(label: str, kind: str, n: int) -> dict:
    """Package element id -> oracle permutation."""
    g, H = group(label), brute(kind, n)
    return {x: H.G.from_word(g.words[x]) for x in g}
