"""Digit Cantor sets: K = {sums of 2**-g(n) over digit sets}.

The exponent schedule g replaces super-exponential decay constants with
integers so separation, tail bounds, membership, and triple-sumset
containment are all decided exactly in sparse dyadic arithmetic.
"""

from __future__ import annotations

import heapq
import re
from dataclasses import dataclass
from fractions import Fraction

from .dyadic import SparseDyadic
from .errors import GrowthPropertyMissing, PartitionOverlap, UniverseExceeded
from .rounding import DEFAULT_PREC, bracket_to_decimal
from . import dimension

_GROWTH_RE = re.compile(r"^g\(n\+1\)\s*>=\s*g\(n\)\s*\+\s*(\d+)$")
_CANON_STEPS = 100000


@dataclass(frozen=True)
class DigitSpec:
    """Tabulated exponent schedule with a declared growth property and a
    3-class index partition."""

    g: tuple
    N_max: int
    growth: str | None = None
    partition: object = "mod3"  # "mod3" or three explicit index lists

    def __post_init__(self):
        g = tuple(int(v) for v in self.g)
        object.__setattr__(self, "g", g)
        if len(g) < self.N_max or self.N_max < 1:
            raise ValueError("N_max must lie in 1..len(g)")
        if g[0] < 1 or any(b <= a for a, b in zip(g, g[1:])):
            raise ValueError("g must be strictly increasing and positive")
        if self.partition != "mod3":
            classes = [set(map(int, c)) for c in self.partition]
            if len(classes) != 3:
                raise ValueError("explicit partition needs three classes")
            for i in range(3):
                for j in range(i + 1, 3):
                    common = classes[i] & classes[j]
                    if common:
                        raise PartitionOverlap(
                            f"index {min(common)} in classes "
                            f"{i + 1} and {j + 1}")
            object.__setattr__(self, "partition",
                               tuple(tuple(sorted(c)) for c in classes))
        for i in (1, 2, 3):
            if not self.class_indices(i, self.N_max):
                raise ValueError(f"class {i} empty up to N_max")

    def growth_increment(self):
        """Declared minimal step of g beyond the table, or None."""
        if not self.growth:
            return None
        m = _GROWTH_RE.match(self.growth.strip())
        return int(m.group(1)) if m else None

    def g_exponent(self, n):
        if not 1 <= n <= len(self.g):
            raise ValueError(f"index {n} outside tabulated range")
        return self.g[n - 1]

    def a(self, n):
        return SparseDyadic.power(self.g_exponent(n))

    def class_of(self, n):
        if self.partition == "mod3":
            return (n - 1) % 3 + 1
        for i, cls in enumerate(self.partition, start=1):
            if n in cls:
                return i
        return None

    def class_indices(self, i, index_cap):
        return [n for n in range(1, min(index_cap, self.N_max) + 1)
                if self.class_of(n) == i]

    def to_json(self):
        part = self.partition if self.partition == "mod3" \
            else [list(c) for c in self.partition]
        return {"g": list(self.g), "N_max": self.N_max,
                "growth": self.growth, "partition": part}

    @classmethod
    def from_json(cls, doc):
        return cls(g=tuple(doc["g"]), N_max=doc["N_max"],
                   growth=doc.get("growth"),
                   partition=doc.get("partition", "mod3"))


def _tail_exact(spec, n):
    """Sum of a_m over the tabulated range n < m <= N_max."""
    return SparseDyadic([(spec.g_exponent(m), 1)
                         for m in range(n + 1, spec.N_max + 1)])


def beyond_table_bound_exponent(spec):
    """The tail beyond the table is below 2**-(g(N_max) + delta - 1)
    whenever g keeps growing by at least delta."""
    delta = spec.growth_increment()
    if delta is None or delta < 1:
        raise GrowthPropertyMissing(
            "separation beyond the table needs a declared growth step "
            "'g(n+1)>=g(n)+d' with d >= 1")
    return spec.g_exponent(spec.N_max) + delta - 1


def separation_check(spec, N):
    """a_n strictly exceeds the full tail for every n <= N.

    The tabulated part of the tail is summed exactly; the rest is
    replaced by the rigorous beyond-table bound.
    """
    if not 1 <= N <= spec.N_max:
        raise ValueError(f"N must lie in 1..{spec.N_max}")
    bound = SparseDyadic.power(beyond_table_bound_exponent(spec))
    rows = []
    ok = True
    for n in range(1, N + 1):
        rhs = _tail_exact(spec, n).add(bound)
        holds = spec.a(n).compare(rhs) > 0
        rows.append({"n": n, "holds": holds})
        ok = ok and holds
    return {"ok": ok, "rows": rows, "growth": spec.growth}


def tau_bound(spec, n):
    """Exponent bracket for the tail tau_n: it lies in
    [2**-g(n+1), 2**-(g(n+1)-1))."""
    if not 1 <= n < spec.N_max:
        raise ValueError(f"n must lie in 1..{spec.N_max - 1}")
    if spec.growth_increment() is None:
        raise GrowthPropertyMissing(
            "the upper tail bound needs the declared growth property")
    lead = spec.g_exponent(n + 1)
    return lead, lead - 1


def _canonical_digits(x, digit_limit):
    """Exponents of the canonical all-ones binary form of x >= 0.

    Returns None when the expansion needs more than digit_limit digits
    (then x cannot be a digit-set sum).  Carries propagate sparsely, so
    tower-scale exponents never force a full expansion.
    """
    coeffs = dict(x.terms)
    heap = [-f for f in coeffs]
    heapq.heapify(heap)
    out = []
    steps = 0
    while heap:
        steps += 1
        if steps > _CANON_STEPS:
            return None
        f = -heapq.heappop(heap)
        c = coeffs.pop(f, 0)
        if c == 0:
            continue
        if f < 0:
            return None  # magnitude escaped [0, 1]; not a digit sum
        digit = c & 1
        carry = (c - digit) >> 1
        if digit:
            out.append(f)
            if len(out) > digit_limit:
                return None
        if carry:
            if f - 1 in coeffs:
                coeffs[f - 1] += carry
            else:
                coeffs[f - 1] = carry
                heapq.heappush(heap, -(f - 1))
    return sorted(out)


def member_K(spec, x):
    """Is x a sum of distinct a_n over tabulated indices?  Returns the
    digit index set when it is."""
    if x.sign() < 0:
        raise ValueError("membership requires x >= 0")
    top = spec.g_exponent(spec.N_max)
    if any(f > top for f, _ in x.terms):
        raise UniverseExceeded(
            f"exponent beyond the tabulated universe 2**-{top}")
    digits = _canonical_digits(x, spec.N_max)
    if digits is None:
        return {"member": False, "digits": None}
    exp_to_index = {spec.g_exponent(n): n
                    for n in range(1, spec.N_max + 1)}
    indices = []
    for f in digits:
        n = exp_to_index.get(f)
        if n is None:
            return {"member": False, "digits": None}
        indices.append(n)
    return {"member": True, "digits": sorted(indices)}


def subset_sums(spec, class_index, index_cap, count_cap=None):
    """All digit-subset sums over one partition class, in bitmask order."""
    indices = spec.class_indices(class_index, index_cap)
    total = 1 << len(indices)
    if count_cap is None:
        count_cap = total
    out = []
    for mask in range(min(total, count_cap)):
        terms = [(spec.g_exponent(indices[j]), 1)
                 for j in range(len(indices)) if mask >> j & 1]
        out.append(SparseDyadic(terms))
    return out


def verify_triple_sumset(spec, index_cap):
    """Every sum from S_1 x S_2 x S_3 is a member of K, exhaustively.

    Index-disjointness of the three classes makes each triple sum a
    digit sum over the disjoint union of the three digit sets.
    """
    sets = [subset_sums(spec, i, index_cap) for i in (1, 2, 3)]
    total = 0
    passed = 0
    failures = []
    for x1 in sets[0]:
        for x2 in sets[1]:
            for x3 in sets[2]:
                total += 1
                rep = member_K(spec, x1.add(x2).add(x3))
                if rep["member"]:
                    passed += 1
                elif len(failures) < 10:
                    failures.append({
                        "sum": x1.add(x2).add(x3).to_json()})
    return {"ok": passed == total, "total": total, "passed": passed,
            "set_sizes": [len(s) for s in sets], "failures": failures,
            "growth": spec.growth}


def dimension_zero_diagnostic(spec, s_grid, n_range, prec=DEFAULT_PREC):
    """Bracketed gauge costs 2**n * (log(1/tau_n))**-s per level, with a
    certified strict-decrease flag per s."""
    n_range = list(n_range)
    rows = []
    brackets = {Fraction(s): [] for s in s_grid}
    for n in n_range:
        lo_exp, hi_exp = tau_bound(spec, n)
        row = {"n": n, "tau_exponents": [lo_exp, hi_exp]}
        for s in s_grid:
            s = Fraction(s)
            lo = dimension.hs_cover_cost(1 << n, lo_exp, s, prec)["lo"]
            hi = dimension.hs_cover_cost(1 << n, hi_exp, s, prec)["hi"]
            mid, err = bracket_to_decimal(lo, hi)
            row[f"cost(s={s})"] = mid
            row[f"cost_err(s={s})"] = err
            brackets[s].append((lo, hi))
        rows.append(row)
    decreasing = {}
    for s, seq in brackets.items():
        ok = all(seq[i + 1][1] < seq[i][0] for i in range(len(seq) - 1))
        decreasing[str(s)] = ok
    return {"rows": rows, "decreasing": decreasing}
