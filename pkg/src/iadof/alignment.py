"""Monomial direction construction and symbolic alignment verification.

Each transmit stream gets a finite set of monomial directions built from
coefficient pairs; receivers then see desired streams on squared direct
gains and interference confined (by construction) to a common reference
family per receive antenna.  Verification is exact: set relations are
checked on exponent vectors, never on evaluated floats.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Optional

from .channel import CoefficientId, SystemConfig
from .directions import Direction, DirectionSet, direction, mono_mul

# (k, m, n): stream of user k, transmit antenna m, destined receive antenna n
Stream = tuple[int, int, int]
# (j, mp, np, i): direct gain of tx j antenna mp paired with the gain from
# that same antenna into receive antenna np of user i
PairFamily = tuple[int, int, int, int]

DEFAULT_STREAM_BUDGET = 10**6
DEFAULT_REFERENCE_BUDGET = 10**6


class EnumerationBudgetError(RuntimeError):
    """Raised before starting an enumeration whose exact size is over budget."""

    def __init__(self, required: int, budget: int, what: str = "enumeration"):
        super().__init__(
            f"{what} would produce {required} directions, budget is {budget}"
        )
        self.required = required
        self.budget = budget


@lru_cache(maxsize=None)
def families(K: int, M: int, N: int, dest: int) -> tuple[PairFamily, ...]:
    """All pair families feeding receive antenna dest, in lexicographic order.

    i == j with np == dest would square one direct coefficient instead of
    pairing two distinct ones, so that diagonal is excluded; KM(KN-1)
    families remain.
    """
    if not 1 <= dest <= N:
        raise IndexError(f"dest antenna {dest} out of range (N={N})")
    out = []
    for j in range(1, K + 1):
        for mp in range(1, M + 1):
            for np_ in range(1, N + 1):
                for i in range(1, K + 1):
                    if i == j and np_ == dest:
                        continue
                    out.append((j, mp, np_, i))
    return tuple(out)


def family_pair(fam: PairFamily, dest: int) -> tuple[CoefficientId, CoefficientId]:
    """The two coefficient ids multiplied by one unit of this family."""
    j, mp, np_, i = fam
    return (j, j, dest, mp), (i, j, np_, mp)


def stream_family_cap(stream: Stream, fam: PairFamily, gamma: int) -> int:
    """Largest exponent stream (k, m, n) may put on fam within its dest system.

    Own-antenna families stop one step early so interference can take the
    final step and still land inside the reference family; other antennas of
    the same user stay silent; other users' families run the full range.
    """
    k, m, _ = stream
    j, mp = fam[0], fam[1]
    if j == k:
        return gamma - 1 if mp == m else 0
    return gamma


def closed_form_counts(config: SystemConfig) -> tuple[int, int]:
    """(directions per stream, interference dimension bound per antenna)."""
    K, M, N, G = config.K, config.M, config.N, config.gamma
    own = K * N - 1
    other = (K - 1) * M * own
    L = G**own * (G + 1) ** other
    l_prime = (M - 1) * L + N * (G + 1) ** (own + other)
    return L, l_prime


def per_antenna_dof_gamma(config: SystemConfig) -> Fraction:
    """Exact DoF of one receive antenna at finite gamma."""
    K, M, N, G = config.K, config.M, config.N, config.gamma
    own = K * N - 1
    other = (K - 1) * M * own
    L = G**own * (G + 1) ** other
    return Fraction(M * L, 1 + M * L + N * (G + 1) ** (own + other))


def achievable_dof_gamma(config: SystemConfig) -> Fraction:
    """Total DoF of the scheme at finite gamma; tends to K*MN/(M+N)."""
    return config.K * config.N * per_antenna_dof_gamma(config)


@dataclass(frozen=True)
class TransmitPlan:
    """Direction sets for every stream of a config.

    truncation_cap is None for the full construction, or the per-stream cap
    applied by truncate_plan.
    """

    config: SystemConfig
    streams: dict[Stream, DirectionSet]
    truncation_cap: Optional[int] = None

    @property
    def gamma(self) -> int:
        return self.config.gamma

    def stream(self, k: int, m: int, n: int) -> DirectionSet:
        return self.streams[(k, m, n)]


def _build_stream(config: SystemConfig, k: int, m: int, n: int) -> DirectionSet:
    active = []
    for fam in families(config.K, config.M, config.N, n):
        cap = stream_family_cap((k, m, n), fam, config.gamma)
        if cap > 0:
            active.append((family_pair(fam, n), cap))
    members = []
    for choice in itertools.product(*(range(cap + 1) for _, cap in active)):
        exps: dict[CoefficientId, int] = {}
        for (pair, _), e in zip(active, choice):
            if e:
                a_cid, b_cid = pair
                exps[a_cid] = exps.get(a_cid, 0) + e
                exps[b_cid] = exps.get(b_cid, 0) + e
        members.append(direction(exps))
    return DirectionSet(members)


def build_transmit_directions(
    config: SystemConfig, budget: int = DEFAULT_STREAM_BUDGET
) -> TransmitPlan:
    """Enumerate every stream's direction set exactly.

    The size is known in closed form before enumerating, so a config over
    budget fails fast with the required count attached.
    """
    L, _ = closed_form_counts(config)
    if L > budget:
        raise EnumerationBudgetError(L, budget, "per-stream enumeration")
    streams = {
        (k, m, n): _build_stream(config, k, m, n)
        for k in range(1, config.K + 1)
        for m in range(1, config.M + 1)
        for n in range(1, config.N + 1)
    }
    return TransmitPlan(config=config, streams=streams, truncation_cap=None)


def truncate_plan(plan: TransmitPlan, cap: int) -> TransmitPlan:
    """Keep only the first cap directions of every stream (canonical order)."""
    if cap < 1:
        raise ValueError(f"cap must be >= 1, got {cap}")
    return TransmitPlan(
        config=plan.config,
        streams={s: ds.head(cap) for s, ds in plan.streams.items()},
        truncation_cap=cap,
    )


class ReferenceFamily:
    """Membership tests for the per-antenna interference superset.

    The superset at dest is every product of dest families with exponents in
    [0, gamma].  Membership needs no enumeration: second factors pin their
    family's exponent uniquely, so a direction is inside iff those pinned
    exponents stay within gamma and, per transmit antenna block, add up to
    the direct-coefficient exponent they must have produced.
    """

    __slots__ = ("config",)

    def __init__(self, config: SystemConfig):
        self.config = config

    def contains_at(self, d: Direction, dest: int) -> bool:
        gamma = self.config.gamma
        need: Counter = Counter()
        have: Counter = Counter()
        for (r, t, a, m), e in d.exponents().items():
            if r == t and a == dest:
                need[(t, m)] += e
            else:
                if e > gamma:
                    return False
                have[(t, m)] += e
        return need == have

    def contains(self, d: Direction) -> bool:
        return any(self.contains_at(d, dest) for dest in range(1, self.config.N + 1))

    def materialize(
        self, dest: int, budget: int = DEFAULT_REFERENCE_BUDGET
    ) -> DirectionSet:
        """Explicit enumeration of the dest superset; small configs only."""
        c = self.config
        fams = families(c.K, c.M, c.N, dest)
        size = (c.gamma + 1) ** len(fams)
        if size > budget:
            raise EnumerationBudgetError(size, budget, "reference enumeration")
        members = []
        for choice in itertools.product(range(c.gamma + 1), repeat=len(fams)):
            exps: dict[CoefficientId, int] = {}
            for fam, e in zip(fams, choice):
                if e:
                    a_cid, b_cid = family_pair(fam, dest)
                    exps[a_cid] = exps.get(a_cid, 0) + e
                    exps[b_cid] = exps.get(b_cid, 0) + e
            members.append(direction(exps))
        return DirectionSet(members)


@dataclass(frozen=True)
class ReceiverProfile:
    """Everything one receive antenna observes under a plan.

    desired maps each own transmit antenna m to its arrived direction set
    (stream set times the squared direct gain); interference is the union of
    all other arrivals; multiplicity counts, per interference direction, the
    number of stream arrivals aligned onto it.
    """

    k: int
    n: int
    desired: dict[int, DirectionSet]
    interference: DirectionSet
    multiplicity: dict[Direction, int]
    reference: ReferenceFamily
    l_total: int
    l_prime: int

    @property
    def m_star(self) -> int:
        """Observed interference dimension (honest union size)."""
        return len(self.interference)

    def desired_union(self) -> DirectionSet:
        return reduce(DirectionSet.union, self.desired.values(), DirectionSet())


def expand_received(plan: TransmitPlan, k: int, n: int) -> ReceiverProfile:
    """Propagate every stream to receive antenna (k, n) symbolically."""
    config = plan.config
    if not 1 <= k <= config.K:
        raise IndexError(f"user {k} out of range (K={config.K})")
    if not 1 <= n <= config.N:
        raise IndexError(f"antenna {n} out of range (N={config.N})")
    L, l_prime = closed_form_counts(config)

    desired = {}
    for m in range(1, config.M + 1):
        tag = direction({(k, k, n, m): 2})
        desired[m] = plan.streams[(k, m, n)].scale(tag)

    counts: Counter = Counter()
    for (j, mp, np_), base in plan.streams.items():
        if j == k and np_ == n:
            continue
        if j == k:
            tag = direction({(k, k, np_, mp): 1, (k, k, n, mp): 1})
        else:
            tag = direction({(j, j, np_, mp): 1, (k, j, n, mp): 1})
        for d in base:
            counts[mono_mul(d, tag)] += 1

    return ReceiverProfile(
        k=k,
        n=n,
        desired=desired,
        interference=DirectionSet(counts.keys()),
        multiplicity=dict(counts),
        reference=ReferenceFamily(config),
        l_total=L,
        l_prime=l_prime,
    )


CHECK_NAMES = (
    "desired_pairwise_disjoint",
    "desired_disjoint_from_interference",
    "interference_within_reference",
    "l_prime_within_bound",
    "stream_counts_match",
)


@dataclass(frozen=True)
class AntennaVerdict:
    k: int
    n: int
    l_observed: int
    l_prime_observed: int
    checks: dict[str, bool]

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_json_dict(self) -> dict:
        return {
            "k": self.k,
            "n": self.n,
            "L_observed": self.l_observed,
            "L_prime_observed": self.l_prime_observed,
            "checks": dict(self.checks),
        }


@dataclass(frozen=True)
class AlignmentReport:
    config: SystemConfig
    antennas: tuple[AntennaVerdict, ...]

    @property
    def passed(self) -> bool:
        return all(a.ok for a in self.antennas)

    def to_json_dict(self) -> dict:
        c = self.config
        return {
            "config": {"K": c.K, "M": c.M, "N": c.N, "gamma": c.gamma},
            "per_antenna": [a.to_json_dict() for a in self.antennas],
            "pass": self.passed,
        }


def verify_alignment(plan: TransmitPlan) -> AlignmentReport:
    """Run every symbolic check at every receive antenna.

    All checks are exact.  A failed check is reported, not raised; callers
    that need a hard failure (the CLI verify path) inspect .passed.
    """
    config = plan.config
    L, l_prime = closed_form_counts(config)
    expected = L if plan.truncation_cap is None else min(plan.truncation_cap, L)
    verdicts = []
    for k in range(1, config.K + 1):
        for n in range(1, config.N + 1):
            prof = expand_received(plan, k, n)
            ms = list(prof.desired)
            pairwise = all(
                not prof.desired[m1].intersect(prof.desired[m2])
                for m1, m2 in itertools.combinations(ms, 2)
            )
            du = prof.desired_union()
            separated = not du.intersect(prof.interference)
            within = all(prof.reference.contains(d) for d in prof.interference)
            counts_ok = all(len(prof.desired[m]) == expected for m in ms) and all(
                len(plan.streams[(k, m, n)]) == expected for m in ms
            )
            checks = {
                "desired_pairwise_disjoint": pairwise,
                "desired_disjoint_from_interference": separated,
                "interference_within_reference": within,
                "l_prime_within_bound": prof.m_star <= l_prime,
                "stream_counts_match": counts_ok,
            }
            verdicts.append(
                AntennaVerdict(
                    k=k,
                    n=n,
                    l_observed=sum(len(ds) for ds in prof.desired.values()),
                    l_prime_observed=prof.m_star,
                    checks=checks,
                )
            )
    return AlignmentReport(config=config, antennas=tuple(verdicts))
