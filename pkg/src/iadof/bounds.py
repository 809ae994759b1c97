"""Exact degrees-of-freedom bounds for the K-user MxN interference channel.

Everything in this module is exact rational arithmetic.  Floats only appear
in formatting helpers, never in a comparison that decides a bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

BRUTE_FORCE_MAX_K = 64


def _roles(M: int, N: int) -> tuple[int, int, int]:
    """(smaller side, larger side, gcd) with validation."""
    if M < 1 or N < 1:
        raise ValueError(f"antenna counts must be >= 1, got M={M} N={N}")
    mn, mx = sorted((M, N))
    return mn, mx, math.gcd(M, N)


def fraction_str(x: Fraction) -> str:
    """Canonical rational rendering: p/q, or a bare integer when q = 1."""
    return str(Fraction(x))


def fraction_dec(x: Fraction) -> str:
    return f"{float(x):.12g}"


def fraction_json(x: Fraction) -> dict:
    x = Fraction(x)
    return {"num": x.numerator, "den": x.denominator, "decimal": fraction_dec(x)}


def two_user_dof(m1: int, m2: int, n1: int, n2: int) -> int:
    """Sum DoF of the two-user MIMO interference channel with antenna
    profile (m1, n1), (m2, n2).  Zero counts are allowed so pooled-user
    partitions can degenerate to one side."""
    for v in (m1, m2, n1, n2):
        if v < 0:
            raise ValueError("antenna counts must be >= 0")
    return min(m1 + m2, n1 + n2, max(m1, n2), max(m2, n1))


def achievable_dof(M: int, N: int, K: int) -> Fraction:
    """Total DoF achieved by the asymptotic alignment scheme: K*MN/(M+N)."""
    _roles(M, N)
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    return Fraction(M * N * K, M + N)


def partition_bound(M: int, N: int, K: int, l1: int, l2: int) -> Fraction:
    """Upper bound on total DoF from one pooled-user partition.

    l1 users pool their transmit arrays against l2 users; the two-user
    region of the pooled pair caps the group's sum, and scaling by
    K/(l1+l2) caps the total.  Order of l1, l2 does not matter.
    """
    mn, mx, _ = _roles(M, N)
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    if l1 < 0 or l2 < 0:
        raise ValueError(f"partition sizes must be >= 0, got ({l1}, {l2})")
    total = l1 + l2
    if total == 0 or total > K:
        raise ValueError(f"need 1 <= l1+l2 <= K, got {total} (K={K})")
    l_min, l_max = sorted((l1, l2))
    return Fraction(K * max(mx * l_min, mn * l_max), total)


def solve_partition_balance(
    M: int, N: int, K: int, mu: int, sign: str
) -> tuple[frozenset[int], int]:
    """Partitions sitting exactly mu balance steps off the even split.

    sign="minus" solves mx*l_min = mn*l_max - g*mu and returns the feasible
    l_min values; sign="plus" solves mx*l_min = mn*l_max + g*mu and returns
    the feasible l_max values.  The extremal is the maximum, or 0 for an
    empty set (the degenerate convention used by the bound).
    """
    mn, mx, g = _roles(M, N)
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    if mu < 1:
        raise ValueError(f"mu must be >= 1, got {mu}")
    if sign not in ("minus", "plus"):
        raise ValueError(f"sign must be 'minus' or 'plus', got {sign!r}")
    offset = -g * mu if sign == "minus" else g * mu
    values = []
    for l_max in range(0, K + 1):
        num = mn * l_max + offset
        if num < 0 or num % mx:
            continue
        l_min = num // mx
        if l_min <= l_max and l_min + l_max <= K:
            values.append(l_min if sign == "minus" else l_max)
    if not values:
        return frozenset(), 0
    return frozenset(values), max(values)


def _balance_pair(
    M: int, N: int, mu: int, sign: str, extremal: int
) -> tuple[int, int]:
    """Recover the (l_min, l_max) pair behind an extremal balance value."""
    mn, mx, g = _roles(M, N)
    if sign == "minus":
        l_min = extremal
        l_max, rem = divmod(mx * l_min + g * mu, mn)
    else:
        l_max = extremal
        l_min, rem = divmod(mn * l_max + g * mu, mx)
    assert rem == 0, "extremal value does not satisfy its balance equation"
    return l_min, l_max


def _oriented(M: int, N: int, l_min: int, l_max: int) -> tuple[int, int]:
    """(l1, l2) with l1 counting users pooled on the M side.

    The balance equations pair l_min with the larger array, so the side
    with more antennas is the one pooling fewer users.
    """
    return (l_min, l_max) if M >= N else (l_max, l_min)


@dataclass(frozen=True)
class PartitionWitness:
    """The partition attaining the reported upper bound.

    l1/l2 are the M-side/N-side group sizes; l_min/l_max the same pair
    sorted.  sign is "exact" on the large-K branch where the balanced
    partition is feasible and mu is meaningless.
    """

    l1: int
    l2: int
    l_min: int
    l_max: int
    mu: Optional[int]
    sign: str
    bound_value: Fraction

    def to_json_dict(self) -> dict:
        return {
            "l1": self.l1,
            "l2": self.l2,
            "l_min": self.l_min,
            "l_max": self.l_max,
            "mu": self.mu,
            "sign": self.sign,
            "bound": fraction_json(self.bound_value),
        }


def _witness(
    M: int, N: int, l_min: int, l_max: int, mu: Optional[int], sign: str,
    value: Fraction,
) -> PartitionWitness:
    l1, l2 = _oriented(M, N, l_min, l_max)
    return PartitionWitness(
        l1=l1, l2=l2, l_min=l_min, l_max=l_max, mu=mu, sign=sign,
        bound_value=value,
    )


def dof_upper_bound(M: int, N: int, K: int) -> tuple[Fraction, PartitionWitness]:
    """Tightest partition upper bound on total DoF, with its witness.

    For K >= (M+N)/gcd(M,N) the balanced partition is feasible and the
    bound is exactly K*MN/(M+N).  Below that threshold the bound is the
    minimum over both off-balance families with mu capped where each
    family provably empties out.
    """
    mn, mx, g = _roles(M, N)
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    threshold = (M + N) // g
    if K >= threshold:
        bound = Fraction(M * N * K, M + N)
        return bound, _witness(M, N, mn // g, mx // g, None, "exact", bound)

    best: Optional[tuple[Fraction, PartitionWitness]] = None
    for sign in ("minus", "plus"):
        if sign == "minus":
            mu_cap = (mn * K) // g
        else:
            mu_cap = ((mx - mn) * K) // (2 * g)
        if mu_cap > (M + N) * K:  # pragma: no cover - scan size sanity check
            raise RuntimeError(f"balance scan cap {mu_cap} out of range")
        for mu in range(1, mu_cap + 1):
            members, ext = solve_partition_balance(M, N, K, mu, sign)
            if not members:
                continue
            side = mn if sign == "minus" else mx
            term = Fraction(
                K * (M * N * ext + mu * side * g), (M + N) * ext + mu * g
            )
            if best is None or term < best[0]:
                l_min, l_max = _balance_pair(M, N, mu, sign, ext)
                best = (term, _witness(M, N, l_min, l_max, mu, sign, term))
    if best is None:  # pragma: no cover - minus family is never globally empty
        raise RuntimeError(f"no partition candidate for M={M} N={N} K={K}")
    return best


def brute_force_upper_bound(M: int, N: int, K: int) -> Fraction:
    """Minimum of partition_bound over every admissible partition.

    Independent of the balance-family scan; intended as a small-K oracle.
    """
    _roles(M, N)
    if not 1 <= K <= BRUTE_FORCE_MAX_K:
        raise ValueError(f"K must be in 1..{BRUTE_FORCE_MAX_K}, got {K}")
    return min(
        partition_bound(M, N, K, l1, total - l1)
        for total in range(1, K + 1)
        for l1 in range(0, total + 1)
    )


def gou_jafar_reference(M: int, N: int, K: int) -> tuple[Fraction, Fraction]:
    """(achievable, upper) totals from the decomposition-based reference
    analysis that keeps only the integer part of the array-size ratio."""
    mn, mx, _ = _roles(M, N)
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    R = mx // mn
    if K <= R:
        exact = Fraction(K * mn)
        return exact, exact
    return Fraction(R * mn * K, R + 1), Fraction(mx * K, R + 1)


def regime_classify(M: int, N: int, K: int) -> str:
    """One of exact_small_K, exact_large_K, open_gap.

    Small K: everyone gets min(M, N) and interference costs nothing.
    Large K: the balanced partition pins the bound to the achievable value.
    The regimes cannot overlap because floor(mx/mn) < (M+N)/gcd always.
    """
    mn, mx, g = _roles(M, N)
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    if K <= mx // mn:
        return "exact_small_K"
    if K >= (M + N) // g:
        return "exact_large_K"
    return "open_gap"


@dataclass(frozen=True)
class DofReport:
    """Everything the bounds CLI shows for one (M, N, K)."""

    M: int
    N: int
    K: int
    achievable_total: Fraction
    upper_total: Fraction
    witness: PartitionWitness
    gj_achievable: Fraction
    gj_upper: Fraction
    regime: str

    def __post_init__(self) -> None:
        if self.achievable_total > self.upper_total:
            raise ValueError(
                f"achievable {self.achievable_total} exceeds upper bound "
                f"{self.upper_total} for M={self.M} N={self.N} K={self.K}"
            )

    @property
    def achievable_per_user(self) -> Fraction:
        return self.achievable_total / self.K

    @property
    def upper_per_user(self) -> Fraction:
        return self.upper_total / self.K

    def to_json_dict(self) -> dict:
        out = {
            "M": self.M,
            "N": self.N,
            "K": self.K,
            "regime": self.regime,
            "witness": self.witness.to_json_dict(),
        }
        for name, val in (
            ("achievable_total", self.achievable_total),
            ("upper_total", self.upper_total),
            ("achievable_per_user", self.achievable_per_user),
            ("upper_per_user", self.upper_per_user),
            ("gj_achievable", self.gj_achievable),
            ("gj_upper", self.gj_upper),
        ):
            out[name] = fraction_json(val)
        return out


def dof_report(M: int, N: int, K: int) -> DofReport:
    upper, witness = dof_upper_bound(M, N, K)
    gj_ach, gj_up = gou_jafar_reference(M, N, K)
    return DofReport(
        M=M,
        N=N,
        K=K,
        achievable_total=achievable_dof(M, N, K),
        upper_total=upper,
        witness=witness,
        gj_achievable=gj_ach,
        gj_upper=gj_up,
        regime=regime_classify(M, N, K),
    )
