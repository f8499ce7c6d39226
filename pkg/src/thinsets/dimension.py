"""Covering and packing counters with logarithmic-gauge diagnostics.

Counts are exact; every transcendental quantity (ln 2, rational powers)
is produced as a certified bracket, and inequality verdicts are made
only when a bracket separates the two sides.
"""

from __future__ import annotations

import io
import csv
from dataclasses import dataclass
from fractions import Fraction

from .errors import LevelOutOfRange
from .falconer import enumerate_window
from .rounding import (DEFAULT_PREC, MAX_PREC, bracket_to_decimal,
                       compare_with_bracket, ln2_bracket, ln_bracket,
                       pow_bracket)

_EXPONENT_LIMIT = 1 << 16


@dataclass(frozen=True)
class GaugeParams:
    """Gauge h_s(r) = (log(1/r))**-s with dimension gap epsilon and
    hypothesis constant C."""

    s: Fraction
    epsilon: Fraction
    C: Fraction

    def __post_init__(self):
        object.__setattr__(self, "s", Fraction(self.s))
        object.__setattr__(self, "epsilon", Fraction(self.epsilon))
        object.__setattr__(self, "C", Fraction(self.C))
        if self.s <= 0:
            raise ValueError("gauge exponent s must be positive")
        if not 0 < self.epsilon < 2:
            raise ValueError("epsilon must lie in (0, 2)")
        if self.C <= 0:
            raise ValueError("constant C must be positive")


def intervals_from_lattice(chain, lattice_intervals):
    """Rational (lo, hi) pairs for LatticeInterval records."""
    return [j.bounds(chain) for j in lattice_intervals]


def _merge(intervals):
    """Sorted disjoint closed components of the union."""
    items = sorted((Fraction(a), Fraction(b)) for a, b in intervals)
    out = []
    for a, b in items:
        if a > b:
            raise ValueError("interval with lo > hi")
        if out and a <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], b))
        else:
            out.append((a, b))
    return out


def covering_number(intervals, delta_exponent):
    """Minimal number of closed length-2**-d intervals covering the
    union.  Left-to-right greedy placement, optimal in one dimension."""
    delta = Fraction(2) ** -delta_exponent
    count = 0
    covered = None  # rightmost covered point so far
    for a, b in _merge(intervals):
        frontier = a if covered is None or covered < a else covered
        if frontier > b or (frontier == b and covered is not None
                            and covered >= b):
            continue
        # greedy tiling from the frontier, counted in closed form
        k = max(1, _ceil_div_frac(b - frontier, delta))
        count += k
        covered = frontier + k * delta
    return count


def _ceil_div_frac(x, y):
    num = x.numerator * y.denominator
    den = x.denominator * y.numerator
    return -((-num) // den)


def packing_number(intervals, delta_exponent):
    """Maximal number of disjoint closed radius-2**-d balls with
    centers in the union.

    Disjointness of closed balls needs strictly more than 2 * 2**-d
    between centers; the greedy frontier carries a symbolic +k*eps
    offset so the strict constraint is honored exactly.
    """
    delta = Fraction(2) ** -delta_exponent
    step = 2 * delta
    count = 0
    nx, nk = None, 0  # minimal admissible next center: nx + nk*eps
    for a, b in _merge(intervals):
        if nx is None or (nx, nk) < (a, 0):
            cx, ck = a, 0
        else:
            cx, ck = nx, nk
        # centers cx + j*step (+ symbolic offsets) while inside [a, b]:
        # valid iff cx + j*step < b, or == b with no pending offset
        q = (b - cx) / step
        m = max(0, _ceil_div_frac(b - cx, step))  # j with j*step < b-cx
        if q.denominator == 1 and q >= 0 and ck + q <= 0:
            m += 1
        if m > 0:
            count += m
            nx, nk = cx + m * step, ck + m
        else:
            nx, nk = cx, ck
    return count


def packing_vs_covering_check(intervals, d_grid):
    """P at scale 2**-d never exceeds N at scale 2**-(d-1); checked on
    every grid exponent.  A failure indicates a counter bug."""
    rows = []
    ok = True
    for d in d_grid:
        if d < 1:
            raise ValueError("grid exponents must be >= 1")
        p = packing_number(intervals, d)
        n = covering_number(intervals, d - 1)
        rows.append({"d": d, "packing": p, "covering_coarser": n,
                     "ok": p <= n})
        ok = ok and p <= n
    return {"ok": ok, "rows": rows}


def _product_lhs(chain, n):
    """prod_{j=1}^{n-1} (1 + 2**(e_{j+1} - rho_j)) as an exact Fraction."""
    lhs = Fraction(1)
    for j in range(1, n):
        k = chain.e[j] - chain.rho[j - 1]
        if abs(k) > _EXPONENT_LIMIT:
            raise OverflowError(f"product factor 2**{k} too large")
        lhs *= 1 + Fraction(2) ** k
    return lhs


def product_bound(chain, n, params, exponent_mode,
                  prec=DEFAULT_PREC, max_prec=MAX_PREC):
    """Compare the cover-product against C * (phi * log q)**alpha.

    packing2 uses level n-1 with alpha = 2 - epsilon; hausdorff1 uses
    level n with alpha = 1 - epsilon.  The left side is exact, the
    right side a widening interval bracket; the verdict is certified.
    """
    if exponent_mode == "packing2":
        idx, alpha = n - 1, 2 - params.epsilon
    elif exponent_mode == "hausdorff1":
        idx, alpha = n, 1 - params.epsilon
    else:
        raise ValueError("exponent_mode must be 'packing2' or 'hausdorff1'")
    if not 2 <= n <= chain.depth:
        raise LevelOutOfRange(f"level {n} outside 2..{chain.depth}")
    if not 1 <= idx <= chain.levels:
        raise LevelOutOfRange(f"mode {exponent_mode} needs radius level {idx}")
    if alpha <= 0:
        raise ValueError("epsilon leaves a non-positive exponent")
    lhs = _product_lhs(chain, n)
    core = chain.phi[idx - 1] * chain.e[idx - 1]

    def rhs_fn(p):
        if chain.log_convention == "natural":
            l2lo, l2hi = ln2_bracket(p)
            base_lo, base_hi = core * l2lo, core * l2hi
        else:
            base_lo = base_hi = Fraction(core)
        lo, hi = pow_bracket(base_lo, base_hi, alpha, p)
        return params.C * lo, params.C * hi

    verdict, (rlo, rhi) = compare_with_bracket(lhs, rhs_fn, prec, max_prec)
    mid, err = bracket_to_decimal(rlo, rhi)
    margin_mid, margin_err = bracket_to_decimal(rlo - lhs, rhi - lhs)
    return {"mode": exponent_mode, "n": n, "index": idx,
            "alpha": str(alpha), "lhs": f"{lhs.numerator}/{lhs.denominator}",
            "rhs": mid, "rhs_err": err, "holds": verdict,
            "margin": margin_mid, "margin_err": margin_err}


def hs_cover_cost(count, diam_exponent, s, prec=DEFAULT_PREC,
                  convention="natural"):
    """count * (log(1/diam))**-s for diam = 2**-d, as a certified bracket.

    Requires d >= 2 so the logarithm exceeds 1 under either convention.
    """
    s = Fraction(s)
    d = int(diam_exponent)
    if d < 2:
        raise ValueError("diameter exponent must be >= 2")
    if count < 0:
        raise ValueError("count must be non-negative")
    if s <= 0:
        raise ValueError("s must be positive")
    if convention == "natural":
        l2lo, l2hi = ln2_bracket(prec)
        base_lo, base_hi = d * l2lo, d * l2hi
    else:
        base_lo = base_hi = Fraction(d)
    lo, hi = pow_bracket(base_lo, base_hi, -s, prec)
    lo, hi = count * lo, count * hi
    mid, err = bracket_to_decimal(lo, hi)
    return {"lo": lo, "hi": hi, "decimal": mid, "err": err}


def box_estimate(count, delta_exponent, prec=DEFAULT_PREC,
                 convention="natural"):
    """log(count) / log(log(2**d)) as a certified bracket, the finite-
    scale logarithmic box-dimension estimator."""
    d = int(delta_exponent)
    if d < 2:
        raise ValueError("delta exponent must be >= 2")
    if count < 1:
        raise ValueError("count must be >= 1")
    if count == 1:
        z = Fraction(0)
        return {"lo": z, "hi": z, "decimal": "0", "err": "0"}
    num_lo, num_hi = ln_bracket(count, prec)
    if convention == "natural":
        l2lo, l2hi = ln2_bracket(prec)
        den_lo = ln_bracket(d * l2lo, prec)[0]
        den_hi = ln_bracket(d * l2hi, prec)[1]
    else:
        den_lo, den_hi = ln_bracket(d, prec)
        num_lo, num_hi = num_lo, num_hi  # same log base cancels in the ratio
    if den_lo <= 0:
        raise ValueError("denominator log must be positive (d too small)")
    lo, hi = num_lo / den_hi, num_hi / den_lo
    mid, err = bracket_to_decimal(lo, hi)
    return {"lo": lo, "hi": hi, "decimal": mid, "err": err}


def dimension_report(source, s_grid, n_range, params=None, cap=200000,
                     prec=DEFAULT_PREC):
    """Per-level diagnostic table for a scale chain or a digit spec.

    Chain rows enumerate the full-window realization at each depth with
    delta = 4 r_n; digit rows use the closed-form count 2**n with the
    level separation scale.  Returns a list of row dicts plus fitted_C1,
    the smallest observed constant for the packing-mode product bound.
    """
    params = params or GaugeParams(Fraction(1), Fraction(1), Fraction(1, 2))
    rows = []
    c1_lo, c1_hi = Fraction(0), Fraction(0)
    for n in n_range:
        if hasattr(source, "rho"):
            # delta = 4 * r_n, clamped to the finest gauge-admissible mesh
            d = max(source.rho[n - 1] - 2, 2)
            ivs = intervals_from_lattice(
                source, enumerate_window(source, n, (Fraction(0),
                                                     Fraction(1)), cap))
            cov = covering_number(ivs, d)
            pack = packing_number(ivs, d)
            try:
                pv = product_bound(source, n, params, "packing2", prec)
                verdict = pv["holds"]
                lhs = Fraction(pv["lhs"])
                core = source.phi[n - 2] * source.e[n - 2]

                def rhs_core(p, core=core, alpha=2 - params.epsilon,
                             conv=source.log_convention):
                    if conv == "natural":
                        a, b = ln2_bracket(p)
                        a, b = core * a, core * b
                    else:
                        a = b = Fraction(core)
                    return pow_bracket(a, b, alpha, p)

                rc_lo, rc_hi = rhs_core(prec)
                c1_lo = max(c1_lo, lhs / rc_hi)
                c1_hi = max(c1_hi, lhs / rc_lo)
            except LevelOutOfRange:
                verdict = None
        else:
            d = source.g_exponent(n + 1) - 1  # separation scale per level
            cov = pack = 1 << n
            verdict = None
        row = {"n": n, "delta_exponent": d, "covering": cov,
               "packing": pack, "product_verdict": verdict}
        be = box_estimate(cov, d, prec)
        row["box_estimate"] = be["decimal"]
        row["box_err"] = be["err"]
        for s in s_grid:
            cost = hs_cover_cost(cov, d, s, prec)
            row[f"hs_cost(s={s})"] = cost["decimal"]
        rows.append(row)
    fitted = None
    if c1_hi > 0:
        mid, err = bracket_to_decimal(c1_lo, c1_hi)
        fitted = {"decimal": mid, "err": err}
    return {"rows": rows, "fitted_C1": fitted}


def report_to_csv(report):
    rows = report["rows"]
    if not rows:
        return ""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()))
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()
