"""Closed-form quantities for simulating erasure channels with codes."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np


def _check_q(q):
    q = float(q)
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"erasure probability must lie in [0, 1], got {q}")
    return q


def erasure_capacity(q: float, d: int) -> float:
    """max(0, (1 - 2q) log2 d) in qubits per use."""
    q = _check_q(q)
    if d < 2:
        raise ValueError(f"dimension must be at least 2, got {d}")
    return max(0.0, (1.0 - 2.0 * q) * math.log2(d))


def q4(q: float) -> float:
    """Effective erasure probability after encoding into the [[4,1,2]] code.

    Two or more of the four erasures lose the logical qudit.
    """
    q = _check_q(q)
    p = 1.0 - q
    return 6.0 * q * q * p * p + 4.0 * q**3 * p + q**4


def improvement_threshold() -> float:
    """Nonzero fixed point of q4 below 1/2; the code helps strictly below it."""
    return (5.0 - math.sqrt(13.0)) / 6.0


@dataclass(frozen=True)
class ErasureReport:
    q: float
    simulated_q: float
    improvement: float
    # True once q is at or past the threshold, where encoding stops helping
    threshold_crossed: bool


def simulate_412(q: float) -> ErasureReport:
    s = q4(q)
    return ErasureReport(q, s, q - s, q >= improvement_threshold())


def r4_bound(q: float) -> float:
    """Best recovery probability for deterministic four-qudit schemes."""
    q = _check_q(q)
    p = 1.0 - q
    return p * p * (3.0 * q * q + 4.0 * q * p + p * p)


def _log_comb(n: int, k: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def _term(coef_n: int, coef_k: int, q: float, n: int, ell: int, log_space: bool) -> float:
    # coefficient C(coef_n, coef_k) times q^(n-ell) (1-q)^ell
    p = 1.0 - q
    if not log_space:
        return math.comb(coef_n, coef_k) * q ** (n - ell) * p**ell
    if (q == 0.0 and n - ell > 0) or (p == 0.0 and ell > 0):
        return 0.0
    logv = _log_comb(coef_n, coef_k)
    if n - ell:
        logv += (n - ell) * math.log(q)
    if ell:
        logv += ell * math.log(p)
    return math.exp(logv)


def ekr_recovery_bound(n: int, q: float) -> float:
    """Cap on recovery from n erasures for codes with deterministic recovery sets.

    Surviving sets of size l <= n/2 form an intersecting family, so at most
    C(n-1, l-1) of them count; larger sizes are capped by C(n, l).
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    q = _check_q(q)
    log_space = n > 50
    half = n // 2
    total = 0.0
    for ell in range(1, n + 1):
        if ell <= half:
            total += _term(n - 1, ell - 1, q, n, ell, log_space)
        else:
            total += _term(n, ell, q, n, ell, log_space)
    return min(total, 1.0)


def set_partitions(items):
    """All partitions of a list into nonempty blocks."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for k in range(len(part)):
            yield part[:k] + [[first] + part[k]] + part[k + 1:]
        yield [[first]] + part


def _masks_of_partitions(n: int) -> list[list[int]]:
    out = []
    for part in set_partitions(range(n)):
        out.append([sum(1 << i for i in block) for block in part])
    return out


def recovery_probability(gamma: dict, n: int, q: float) -> float:
    """sum_S gamma_S q^(n-|S|) (1-q)^|S| over surviving sets S (bitmasks)."""
    total = 0.0
    for mask, g in gamma.items():
        k = bin(mask).count("1")
        total += g * q ** (n - k) * (1.0 - q) ** k
    return total


def partition_feasible(gamma: dict, n: int, tol: float = 1e-12) -> bool:
    """No partition of the n qudits may carry total recovery weight above 1."""
    for blocks in _masks_of_partitions(n):
        if sum(gamma.get(m, 0.0) for m in blocks) > 1.0 + tol:
            return False
    return True


@dataclass(frozen=True)
class PartitionReport:
    n: int
    families: int
    feasible: int
    violations: int
    max_ratio: float


def exhaustive_partition_check(n: int, qs, singletons_zero: bool = False) -> PartitionReport:
    """Enumerate every 0/1 recovery family on n <= 4 qudits and compare with the caps.

    With singletons_zero the cap is r4 (n = 4 only), otherwise the EKR bound.
    """
    if not 1 <= n <= 4:
        raise ValueError("exhaustive enumeration is limited to n <= 4")
    sets = list(range(1, 1 << n))
    partitions = _masks_of_partitions(n)
    qs = [float(q) for q in qs]
    if singletons_zero:
        if n != 4:
            raise ValueError("the r4 cap applies to n = 4")
        caps = [r4_bound(q) for q in qs]
    else:
        caps = [ekr_recovery_bound(n, q) for q in qs]
    weights = np.array([[q ** (n - bin(s).count("1")) * (1 - q) ** bin(s).count("1") for s in sets] for q in qs])
    families = 0
    feasible = 0
    violations = 0
    max_ratio = 0.0
    for bits in itertools.product((0, 1), repeat=len(sets)):
        families += 1
        chosen = {s for s, b in zip(sets, bits) if b}
        if singletons_zero and any(bin(s).count("1") == 1 for s in chosen):
            continue
        if any(sum(m in chosen for m in blocks) > 1 for blocks in partitions):
            continue
        feasible += 1
        vals = weights @ np.array(bits, dtype=float)
        for v, cap in zip(vals, caps):
            if v > cap + 1e-12:
                violations += 1
            if cap > 0:
                max_ratio = max(max_ratio, v / cap)
    return PartitionReport(n, families, feasible, violations, max_ratio)
