"""Exact pointwise envelopes of the quantile TV denoising solution set.

For data y, level tau in (0,1) and penalty lam >= 0, the set of optimal
fitted values at a location i is a closed interval [L_i, U_i] whose
endpoints admit exact order-statistic formulas over nested interval
pairs:

    U_i = min over J containing i  of  max over I <= J containing i
            of  y_{I,(floor(u_{I,J}) + 1)},
    L_i = max over J containing i  of  min over I <= J containing i
            of  y_{I,(ceil(l_{I,J}))},

with adjusted levels u_{I,J} = tau*|I| - 2*lam*C_{I,J} and
l_{I,J} = tau*|I| + 2*lam*C_{I,J}, where C_{I,J} is the boundary
constant of the nested pair (see `qtvd.intervals`).

This module evaluates both formulas by full enumeration, organised so
the inner max/min is accumulated incrementally: inner intervals are
grouped by which endpoints they share with the outer interval (the
boundary constant only depends on that), and running extrema over the
free endpoint are reused across outer intervals.  No pruning or early
exit is applied; every nested pair participates in the extremum.

Arithmetic is exact end to end.  Values are mapped to ranks in the
sorted distinct-value list, the enumeration runs on small ints, and
ranks map back to exact data values at the end.  Infinities from the
extended order-statistic convention propagate through min/max via the
`ExtendedValue` total order (encoded as off-range ranks internally; no
float sentinels).

Per-location computations are independent and share only the
read-only slice memo, so they are safe to run concurrently.

Computation is O(n^3)-ish with full memoisation; the soft cap keeps
accidental huge inputs out (the chain solver covers large n).
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Sequence

from .intervals import (
    ExtendedValue,
    NEG_INF,
    POS_INF,
    _as_rational,
    ceil_index,
    floor_index,
)

__all__ = [
    "Envelope",
    "envelope",
    "upper_envelope_at",
    "lower_envelope_at",
    "reflection_check",
    "SOFT_CAP",
]

#: Largest n accepted without `allow_large_n=True`.
SOFT_CAP = 64


@dataclass(frozen=True)
class Envelope:
    """Per-location lower/upper bounds of the solution set.

    L_i <= U_i always; for tau in (0,1) every entry is finite and equals
    some data value.  tau = 0 with lam > 0 gives L = -inf, U = min(y);
    tau = 1 with lam > 0 mirrors that.
    """

    lower: tuple[ExtendedValue, ...]
    upper: tuple[ExtendedValue, ...]

    def __len__(self) -> int:
        return len(self.lower)


class _EnvelopeComputation:
    """Shared exact state: rank encoding, sorted rank slices, level tables."""

    def __init__(self, y: Sequence, tau, lam):
        self.y = tuple(_as_rational(v, "data value") for v in y)
        self.tau = _as_rational(tau, "tau")
        self.lam = _as_rational(lam, "lam")
        if not 0 <= self.tau <= 1:
            raise ValueError(f"tau must be in [0, 1], got {self.tau}")
        if self.lam < 0:
            raise ValueError(f"lam must be >= 0, got {self.lam}")
        n = len(self.y)
        if n == 0:
            raise ValueError("data vector must be non-empty")
        self.n = n
        self.uniq = sorted(set(self.y))
        self.pos_rank = len(self.uniq)  # rank sentinel for +inf
        self.neg_rank = -1  # rank sentinel for -inf
        rank_of = {v: r for r, v in enumerate(self.uniq)}
        ranks = [rank_of[v] for v in self.y]
        # slices[c][d] = sorted ranks of y_c..y_d (1-based endpoints)
        slices: list[list[tuple[int, ...] | None] | None] = [None] * (n + 1)
        for c in range(1, n + 1):
            row: list[tuple[int, ...] | None] = [None] * (n + 1)
            cur: list[int] = []
            for d in range(c, n + 1):
                bisect.insort(cur, ranks[d - 1])
                row[d] = tuple(cur)
            slices[c] = row
        self.slices = slices
        # Order-statistic index per (twice-the-boundary-constant, |I|):
        # upper side floor(tau*m - lam*c2) + 1, lower side ceil(tau*m + lam*c2).
        tau_, lam_ = self.tau, self.lam
        self.k_upper = [
            [0] + [floor_index(tau_ * m - lam_ * c2) + 1 for m in range(1, n + 1)]
            for c2 in (-2, -1, 0, 1, 2)
        ]
        self.k_lower = [
            [0] + [ceil_index(tau_ * m + lam_ * c2) for m in range(1, n + 1)]
            for c2 in (-2, -1, 0, 1, 2)
        ]

    def _rank_value(self, c: int, d: int, ktab: list[int]) -> int:
        """Rank of the selected order statistic of y_c..y_d, off-range for +-inf."""
        m = d - c + 1
        k = ktab[m]
        if k <= 0:
            return self.neg_rank
        if k > m:
            return self.pos_rank
        return self.slices[c][d][k - 1]

    def bounds_at(self, i: int) -> tuple[int, int]:
        """(lower_rank, upper_rank) at location i, sentinels included."""
        n = self.n
        if not 1 <= i <= n:
            raise ValueError(f"location {i} outside [1:{n}]")
        ku, kl = self.k_upper, self.k_lower
        # c2 -> table index is c2 + 2
        up0, up1, up2 = ku[2], ku[3], ku[4]
        lo0, lo1, lo2 = kl[2], kl[3], kl[4]
        val = self._rank_value
        NEG, POS = self.neg_rank, self.pos_rank

        # Running extrema over inner intervals sharing the left endpoint
        # (I = [a:d], i <= d <= h) for the two boundary constants that class
        # can take, and symmetrically for the right-shared class.
        shl_up0, shl_up1, shl_lo0, shl_lo1 = {}, {}, {}, {}
        for a in range(1, i + 1):
            ru0 = ru1 = NEG
            rl0 = rl1 = POS
            for d in range(i, n + 1):
                v = val(a, d, up0)
                if v > ru0:
                    ru0 = v
                v = val(a, d, up1)
                if v > ru1:
                    ru1 = v
                v = val(a, d, lo0)
                if v < rl0:
                    rl0 = v
                v = val(a, d, lo1)
                if v < rl1:
                    rl1 = v
                shl_up0[a, d] = ru0
                shl_up1[a, d] = ru1
                shl_lo0[a, d] = rl0
                shl_lo1[a, d] = rl1
        shr_up0, shr_up1, shr_lo0, shr_lo1 = {}, {}, {}, {}
        for b in range(i, n + 1):
            ru0 = ru1 = NEG
            rl0 = rl1 = POS
            for c in range(i, 0, -1):
                v = val(c, b, up0)
                if v > ru0:
                    ru0 = v
                v = val(c, b, up1)
                if v > ru1:
                    ru1 = v
                v = val(c, b, lo0)
                if v < rl0:
                    rl0 = v
                v = val(c, b, lo1)
                if v < rl1:
                    rl1 = v
                shr_up0[c, b] = ru0
                shr_up1[c, b] = ru1
                shr_lo0[c, b] = rl0
                shr_lo1[c, b] = rl1
        # Strictly interior inner intervals always carry boundary constant 1.
        # First a running extremum over the right endpoint per left endpoint,
        # then accumulate over the left endpoint.
        int_up, int_lo = {}, {}
        for c in range(1, i + 1):
            ru, rl = NEG, POS
            for d in range(i, n + 1):
                v = val(c, d, up2)
                if v > ru:
                    ru = v
                v = val(c, d, lo2)
                if v < rl:
                    rl = v
                int_up[c, d] = ru
                int_lo[c, d] = rl
        for d in range(i, n + 1):
            for c in range(i - 1, 0, -1):
                nxt_u = int_up[c + 1, d]
                if nxt_u > int_up[c, d]:
                    int_up[c, d] = nxt_u
                nxt_l = int_lo[c + 1, d]
                if nxt_l < int_lo[c, d]:
                    int_lo[c, d] = nxt_l

        upper_rank = POS
        lower_rank = NEG
        for a in range(1, i + 1):
            a_is_1 = a == 1
            for b in range(i, n + 1):
                b_is_n = b == n
                if a_is_1 and b_is_n:
                    eq_idx, c_left, c_right = 2, 1, 1
                elif a_is_1 or b_is_n:
                    eq_idx, c_left, c_right = 1, int(a_is_1), int(b_is_n)
                else:
                    eq_idx, c_left, c_right = 0, 0, 0
                # inner max (upper side) / inner min (lower side) over I <= J
                mu = val(a, b, ku[eq_idx])
                ml = val(a, b, kl[eq_idx])
                if b > i:  # I = [a:d], d < b
                    v = (shl_up1 if c_left else shl_up0)[a, b - 1]
                    if v > mu:
                        mu = v
                    v = (shl_lo1 if c_left else shl_lo0)[a, b - 1]
                    if v < ml:
                        ml = v
                if a < i:  # I = [c:b], c > a
                    v = (shr_up1 if c_right else shr_up0)[a + 1, b]
                    if v > mu:
                        mu = v
                    v = (shr_lo1 if c_right else shr_lo0)[a + 1, b]
                    if v < ml:
                        ml = v
                if a < i and b > i:  # strictly interior I
                    v = int_up[a + 1, b - 1]
                    if v > mu:
                        mu = v
                    v = int_lo[a + 1, b - 1]
                    if v < ml:
                        ml = v
                if mu < upper_rank:
                    upper_rank = mu
                if ml > lower_rank:
                    lower_rank = ml
        return lower_rank, upper_rank

    def to_extended(self, rank: int) -> ExtendedValue:
        if rank == self.neg_rank:
            return NEG_INF
        if rank == self.pos_rank:
            return POS_INF
        return ExtendedValue(0, self.uniq[rank])


def _check_cap(n: int, allow_large_n: bool) -> None:
    if n > SOFT_CAP and not allow_large_n:
        raise ValueError(
            f"n={n} exceeds the envelope enumeration cap {SOFT_CAP}; "
            "pass allow_large_n=True to override"
        )


def envelope(y: Sequence, tau, lam, *, allow_large_n: bool = False) -> Envelope:
    """Both envelope vectors, sharing one order-statistic memo across locations."""
    comp = _EnvelopeComputation(y, tau, lam)
    _check_cap(comp.n, allow_large_n)
    lower, upper = [], []
    for i in range(1, comp.n + 1):
        lo, up = comp.bounds_at(i)
        lower.append(comp.to_extended(lo))
        upper.append(comp.to_extended(up))
    return Envelope(lower=tuple(lower), upper=tuple(upper))


def upper_envelope_at(y: Sequence, tau, lam, i: int, *, allow_large_n: bool = False) -> ExtendedValue:
    """Exact upper envelope value U_i; finite and a data value for tau in (0,1)."""
    comp = _EnvelopeComputation(y, tau, lam)
    _check_cap(comp.n, allow_large_n)
    return comp.to_extended(comp.bounds_at(i)[1])


def lower_envelope_at(y: Sequence, tau, lam, i: int, *, allow_large_n: bool = False) -> ExtendedValue:
    """Exact lower envelope value L_i; mirrors `upper_envelope_at`."""
    comp = _EnvelopeComputation(y, tau, lam)
    _check_cap(comp.n, allow_large_n)
    return comp.to_extended(comp.bounds_at(i)[0])


def reflection_check(y: Sequence, tau, lam, *, allow_large_n: bool = False) -> bool:
    """True iff negating the data and flipping tau to 1 - tau swaps the envelopes.

    The identity U_i(-y, 1-tau, lam) == -L_i(y, tau, lam) (and its mirror)
    follows from (-y)_{I,(|I|-k+1)} == -y_{I,(k)} applied inside the
    envelope formulas.  This evaluates both sides exactly.
    """
    tau = _as_rational(tau, "tau")
    env = envelope(y, tau, lam, allow_large_n=allow_large_n)
    neg_y = [-_as_rational(v, "data value") for v in y]
    env_neg = envelope(neg_y, 1 - tau, lam, allow_large_n=allow_large_n)
    return all(
        env_neg.upper[i] == -env.lower[i] and env_neg.lower[i] == -env.upper[i]
        for i in range(len(y))
    )
