"""Slow, obviously-correct reference implementations used by the tests."""
from __future__ import annotations

from itertools import permutations


def brute_force_ordering(bids: dict[int, float]) -> list[int]:
    """The unique permutation with bids non-increasing and ties by ascending id."""
    valid = []
    for perm in permutations(bids):
        ok = True
        for x, y in zip(perm, perm[1:]):
            if bids[x] < bids[y] or (bids[x] == bids[y] and x > y):
                ok = False
                break
        if ok:
            valid.append(list(perm))
    assert len(valid) == 1
    return valid[0]


def brute_force_charges(bids: dict[int, float], cp: str) -> dict[int, float]:
    if cp == "avp":
        return dict(bids)
    winner = brute_force_ordering(bids)[0]
    return {winner: bids[winner]}
