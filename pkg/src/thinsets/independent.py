"""Finite-depth Cantor tree avoiding enumerated rational linear forms,
plus additive-quadruple and rational-relation scanners.

Centers are chosen as parent-midpoint perturbations with fresh prime
denominators, which makes form nonvanishing generically true and leaves
every condition exhaustively checkable at small depth.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .dyadic import SparseDyadic
from .errors import (ChoiceFailure, DuplicateInput, ExhaustedUniverse,
                     SearchSpaceTooLarge)

_MAX_DEPTH = 4
_MAX_ARITY = 3
_EPS_SEARCH_BITS = 512
_CENTER_RETRIES = 8
_RELATION_BUDGET = 5_000_000


@dataclass(frozen=True)
class RationalForm:
    """Linear form q_1 x_1 + ... + q_m x_m with nonzero rational
    coefficients."""

    coefficients: tuple

    def __post_init__(self):
        coeffs = tuple(Fraction(c) for c in self.coefficients)
        if not coeffs or any(c == 0 for c in coeffs):
            raise ValueError("coefficients must be nonzero and nonempty")
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def arity(self):
        return len(self.coefficients)

    def height(self):
        return max(max(abs(c.numerator), c.denominator)
                   for c in self.coefficients)

    def evaluate(self, xs):
        if len(xs) != self.arity:
            raise ValueError("arity mismatch")
        return sum(c * x for c, x in zip(self.coefficients, xs))

    def coefficient_l1(self):
        return sum(abs(c) for c in self.coefficients)

    def to_json(self):
        return {"coefficients": [f"{c.numerator}/{c.denominator}"
                                 for c in self.coefficients]}


def _coefficient_universe(h_max):
    """Nonzero rationals of height <= h_max in canonical scan order:
    by height, positive before negative, then by magnitude."""
    seen = set()
    coeffs = []
    for p in range(1, h_max + 1):
        for q in range(1, h_max + 1):
            c = Fraction(p, q)
            if c not in seen and max(abs(c.numerator), c.denominator) <= h_max:
                seen.add(c)
                coeffs.append(c)
                coeffs.append(-c)
    coeffs.sort(key=lambda c: (max(abs(c.numerator), c.denominator),
                               0 if c > 0 else 1, abs(c)))
    return coeffs


def enumerate_forms(h_max, m_max, count):
    """First `count` forms ordered by (height, arity, coefficient scan
    order); stable across runs."""
    if h_max < 1 or m_max < 1:
        raise ValueError("height and arity bounds must be >= 1")
    universe = _coefficient_universe(h_max)
    out = []
    for h in range(1, h_max + 1):
        pool = [c for c in universe
                if max(abs(c.numerator), c.denominator) <= h]
        for m in range(1, m_max + 1):
            for tup in itertools.product(pool, repeat=m):
                if max(max(abs(c.numerator), c.denominator)
                       for c in tup) != h:
                    continue  # already emitted under a smaller height
                out.append(RationalForm(tup))
                if len(out) == count:
                    return out
    raise ExhaustedUniverse(
        f"only {len(out)} forms exist with height <= {h_max}, "
        f"arity <= {m_max}")


def _is_prime(n):
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def next_prime(n):
    """Smallest prime strictly greater than n."""
    n += 1
    while not _is_prime(n):
        n += 1
    return n


@dataclass(frozen=True)
class CantorTree:
    """Nested rational intervals indexed by binary words, with per-level
    half-widths epsilon and the diameter budget rho."""

    n_max: int
    intervals: dict  # word -> (Fraction, Fraction)
    centers: dict    # word -> Fraction
    epsilons: tuple  # per level 1..n_max
    rho: tuple
    forms: tuple

    def level_words(self, n):
        return ["".join(bits) for bits in
                itertools.product("01", repeat=n)]

    def level_centers(self, n):
        return [self.centers[w] for w in self.level_words(n)]

    def to_json(self):
        return {
            "n_max": self.n_max,
            "intervals": {w: [f"{a.numerator}/{a.denominator}",
                              f"{b.numerator}/{b.denominator}"]
                          for w, (a, b) in sorted(self.intervals.items())},
            "epsilons": [f"{e.numerator}/{e.denominator}"
                         for e in self.epsilons],
            "rho": [f"{r.numerator}/{r.denominator}" for r in self.rho],
            "forms": [f.to_json() for f in self.forms],
        }


def _check_forms_nonzero(forms, centers):
    """Every form in scope vanishes on no tuple of distinct centers.
    Returns the worst margin |L|/sum|q| over all tuples, or None on a
    zero hit."""
    worst = None
    for form in forms:
        m = form.arity
        if m > len(centers):
            continue
        l1 = form.coefficient_l1()
        for tup in itertools.permutations(centers, m):
            v = abs(form.evaluate(tup))
            if v == 0:
                return None
            margin = v / l1
            if worst is None or margin < worst:
                worst = margin
    return worst if worst is not None else Fraction(1)


def build_independent_tree(n_max, rho, forms):
    """Depth-n_max binary Cantor tree inside (1, 2) whose same-level
    points avoid the zero sets of the given forms.

    Level-n centers perturb the two quarter-points of the parent by
    reciprocals of fresh distinct primes; epsilon_n is the largest
    dyadic half-width keeping siblings separated by more than
    4*epsilon_n, children strictly interior, diameters within rho_n,
    and every form interval sign-definite.
    """
    if not 1 <= n_max <= _MAX_DEPTH:
        raise ValueError(f"depth must lie in 1..{_MAX_DEPTH}")
    forms = tuple(forms)
    if any(f.arity > _MAX_ARITY for f in forms):
        raise ValueError(f"form arity above {_MAX_ARITY} not enumerable")
    rho = tuple(Fraction(r) for r in rho)
    if len(rho) < n_max:
        raise ValueError(f"need {n_max} diameter budgets")
    rho = rho[:n_max]
    if any(r <= 0 for r in rho):
        raise ValueError("diameter budgets must be positive")
    for i in range(len(rho) - 1):
        if not rho[i + 1] < rho[i] / 10:
            raise ValueError(
                f"rho_{i + 2} must be below rho_{i + 1}/10")
    if rho[0] > Fraction(1, 10):
        raise ValueError("rho_1 must be at most 1/10")
    form_dens = {c.denominator for f in forms for c in f.coefficients}

    root = (Fraction(5, 4), Fraction(7, 4))
    intervals = {"": root}
    centers = {"": Fraction(3, 2)}
    epsilons = []
    prime_cursor = 2
    level_words = [""]
    for n in range(1, n_max + 1):
        margin = None
        for attempt in range(_CENTER_RETRIES):
            new_centers = {}
            cursor = prime_cursor + attempt * 1000
            for w in level_words:
                a, b = intervals[w]
                length = b - a
                mid = (a + b) / 2
                # 1/p below length/32 keeps the perturbed quarter-points
                # interior and well separated
                p = next_prime(max(32 * length.denominator
                                   // length.numerator, cursor - 1))
                while p in form_dens:
                    p = next_prime(p)
                cursor = p + 1
                new_centers[w + "0"] = mid - length / 4 + Fraction(1, p)
                p = next_prime(cursor - 1)
                while p in form_dens:
                    p = next_prime(p)
                cursor = p + 1
                new_centers[w + "1"] = mid + length / 4 + Fraction(1, p)
            cs = list(new_centers.values())
            margin = _check_forms_nonzero(forms, cs)
            if margin is not None:
                prime_cursor = cursor
                break
        else:
            raise ChoiceFailure(
                f"could not avoid form zeros at level {n} after "
                f"{_CENTER_RETRIES} retries")
        # largest dyadic epsilon satisfying the four conditions
        min_sep = min(abs(x - y) for x, y in
                      itertools.combinations(cs, 2)) if len(cs) > 1 \
            else Fraction(1)
        eps = None
        for t in range(_EPS_SEARCH_BITS):
            cand = Fraction(1, 1 << t)
            if 4 * cand >= min_sep:
                continue
            if 2 * cand > rho[n - 1]:
                continue
            if cand >= margin:
                continue
            interior_ok = True
            for w, c in new_centers.items():
                pa, pb = intervals[w[:-1]]
                if not (pa < c - cand and c + cand < pb):
                    interior_ok = False
                    break
            if interior_ok:
                eps = cand
                break
        if eps is None:
            raise ChoiceFailure(f"no admissible epsilon at level {n}")
        epsilons.append(eps)
        for w, c in new_centers.items():
            intervals[w] = (c - eps, c + eps)
            centers[w] = c
        level_words = sorted(new_centers)
    return CantorTree(n_max=n_max, intervals=intervals, centers=centers,
                      epsilons=tuple(epsilons), rho=rho, forms=forms)


def _normalize_points(points):
    out = []
    for p in points:
        if isinstance(p, SparseDyadic):
            out.append(p.to_fraction())
        else:
            out.append(Fraction(p))
    return out


def quadruple_scan(points):
    """First additive quadruple a + d = b + c over distinct sorted
    values, or None; found by indexing all pair sums."""
    vals = sorted(_normalize_points(points))
    for x, y in zip(vals, vals[1:]):
        if x == y:
            raise DuplicateInput("points must be pairwise distinct")
    sums = {}
    best = None
    n = len(vals)
    checked = 0
    for i in range(n):
        for j in range(i + 1, n):
            checked += 1
            key = vals[i] + vals[j]
            for (a, b) in sums.get(key, ()):
                if len({a, b, i, j}) == 4:
                    quad = tuple(sorted((vals[a], vals[b],
                                         vals[i], vals[j])))
                    if best is None or quad < best:
                        best = quad
            sums.setdefault(key, []).append((i, j))
    return {"quadruple": best, "pairs_checked": checked}


def relation_scan(points, h_max, m_max):
    """Exhaustive search for a vanishing rational combination of
    distinct points with coefficient height <= h_max."""
    vals = sorted(_normalize_points(points))
    if len(vals) > 8 or h_max > 4 or m_max > 4:
        raise SearchSpaceTooLarge("limits: 8 points, height 4, arity 4")
    coeffs = _coefficient_universe(h_max)
    total = sum(len(list(itertools.combinations(vals, m)))
                * len(coeffs) ** m for m in range(1, m_max + 1))
    if total > _RELATION_BUDGET:
        raise SearchSpaceTooLarge(f"{total} tuples exceeds budget")
    checked = 0
    for m in range(1, m_max + 1):
        for subset in itertools.combinations(vals, m):
            for tup in itertools.product(coeffs, repeat=m):
                checked += 1
                if sum(c * x for c, x in zip(tup, subset)) == 0:
                    return {"relation": {
                        "points": [f"{x.numerator}/{x.denominator}"
                                   for x in subset],
                        "coefficients": [f"{c.numerator}/{c.denominator}"
                                         for c in tup]},
                        "tuples_checked": checked}
    return {"relation": None, "tuples_checked": checked}
