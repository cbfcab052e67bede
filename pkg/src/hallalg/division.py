"""Exact sparse division by linear forms, and sums of fractions over
factored denominators.

The gauge-level shuffle products produce sums of terms of the shape
numerator / product-of-linear-forms, where every form is a difference of
two same-vertex variables.  Such a sum is always a polynomial (the poles
cancel in pairs), so the pipeline is: bring the terms to a common
factored denominator, add the numerators, and divide out each form by
exact long division.  A nonzero remainder is never legitimate; it
signals an implementation bug and raises.

Division statistics are kept per call-site key so the acceptance suite
can assert that every shuffle-product division across the whole sweep
was exact.
"""

from __future__ import annotations

from operator import add as _add

from .quiver import VarContext
from .scalars import rat
from .series import min_degree_terms, mul_terms, prune_terms

DIVISION_STATS: dict[str, dict[str, int]] = {}


class DivisionRemainderError(ArithmeticError):
    """Exact division left a remainder where none is mathematically possible."""


def division_stats(key: str = "g_mult") -> dict[str, int]:
    return dict(DIVISION_STATS.get(key, {"divisions": 0, "remainders": 0}))


def reset_division_stats():
    DIVISION_STATS.clear()


def _record(key: str, failed: bool):
    entry = DIVISION_STATS.setdefault(key, {"divisions": 0, "remainders": 0})
    entry["divisions"] += 1
    if failed:
        entry["remainders"] += 1


def normalize_form(coeffs: tuple) -> tuple:
    """Scale a linear form so its first nonzero coefficient is +1.

    Returns (lead, normalized) with form == lead * normalized.
    """
    for c in coeffs:
        if c:
            lead = c
            break
    else:
        raise ValueError("zero linear form")
    if lead == 1:
        return lead, coeffs
    return lead, tuple(x / lead for x in coeffs)


def permute_form(coeffs: tuple, var_map: tuple[int, ...]) -> tuple:
    out = [coeffs[0] * 0] * len(coeffs)
    for v, c in enumerate(coeffs):
        if c:
            out[var_map[v]] = c
    return tuple(out)


def divide_by_form(terms: dict, coeffs: tuple, *, stats_key: str = "g_mult") -> dict:
    """Exact division of a polynomial term-dict by a normalized linear form.

    Horner division in the pivot variable v* (the first with nonzero
    coefficient, required to be 1): writing the form as v* + r and the
    dividend as sum_k P_k v*^k, the quotient slices satisfy
    Q_{k-1} = P_k - r * Q_k and the remainder is P_0 - r * Q_0.
    """
    if not terms:
        _record(stats_key, False)
        return {}
    pivot = next(v for v, c in enumerate(coeffs) if c)
    if coeffs[pivot] != 1:
        raise ValueError("divide_by_form expects a normalized form")
    rest = {}
    for v, c in enumerate(coeffs):
        if c and v != pivot:
            e = [0] * len(coeffs)
            e[v] = 1
            rest[tuple(e)] = c
    # bucket the dividend by pivot exponent, zeroing the pivot slot
    buckets: dict[int, dict] = {}
    for e, c in terms.items():
        k = e[pivot]
        be = list(e)
        be[pivot] = 0
        buckets.setdefault(k, {})[tuple(be)] = c
    top = max(buckets)
    q_slice: dict = {}
    quotient: dict = {}
    for k in range(top, 0, -1):
        p_k = buckets.get(k, {})
        if rest and q_slice:
            correction = mul_terms(rest, q_slice, None)
            merged = dict(p_k)
            for e, c in correction.items():
                v = merged.get(e)
                if v is None:
                    merged[e] = -c
                else:
                    v = v - c
                    if v:
                        merged[e] = v
                    else:
                        del merged[e]
            q_slice = merged
        else:
            q_slice = dict(p_k)
        for e, c in q_slice.items():
            if c:
                qe = list(e)
                qe[pivot] = k - 1
                quotient[tuple(qe)] = c
    remainder = dict(buckets.get(0, {}))
    if rest and q_slice:
        correction = mul_terms(rest, q_slice, None)
        for e, c in correction.items():
            v = remainder.get(e)
            if v is None:
                remainder[e] = -c
            else:
                v = v - c
                if v:
                    remainder[e] = v
                else:
                    del remainder[e]
    remainder = {e: c for e, c in remainder.items() if c}
    if remainder:
        _record(stats_key, True)
        sample = next(iter(remainder.items()))
        raise DivisionRemainderError(
            f"division by linear form left a remainder with {len(remainder)} terms "
            f"(e.g. exponent {sample[0]}, coefficient {sample[1]}); this signals a bug "
            "in the shuffle-sum assembly"
        )
    _record(stats_key, False)
    return {e: c for e, c in quotient.items() if c}


def divide_exact(terms: dict, forms: list[tuple], *, stats_key: str = "g_mult") -> dict:
    """Divide by each (normalized) form in sequence; all must be exact."""
    out = terms
    for f in forms:
        out = divide_by_form(out, f, stats_key=stats_key)
    return out


def laurent_divide_exact(terms: dict, forms: list[tuple], nvars: int, *, stats_key: str = "g_mult") -> dict:
    """Exact division of a Laurent term-dict by polynomial linear forms:
    clear negative exponents into a monomial, divide, shift back."""
    if not terms:
        for _ in forms:
            _record(stats_key, False)
        return {}
    shift = [0] * nvars
    for e in terms:
        for v, k in enumerate(e):
            if k < 0 and -k > shift[v]:
                shift[v] = -k
    shift_t = tuple(shift)
    shifted = {tuple(map(_add, e, shift_t)): c for e, c in terms.items()}
    quotient = divide_exact(shifted, forms, stats_key=stats_key)
    back = tuple(-s for s in shift_t)
    return {tuple(map(_add, e, back)): c for e, c in quotient.items()}


class FracElement:
    """numerator / product of normalized linear forms (with multiplicities).

    ``valid`` is the degree up to which the numerator is trustworthy
    (None: exact).  ``laurent`` marks numerators with possibly negative
    exponents; those are always exact.
    """

    __slots__ = ("ctx", "num", "den", "valid", "laurent")

    def __init__(self, ctx: VarContext, num: dict, den: dict, valid: int | None, laurent: bool = False):
        self.ctx = ctx
        self.num = num
        self.den = den
        self.valid = valid
        self.laurent = laurent

    @staticmethod
    def from_quotient(ctx: VarContext, num: dict, raw_forms: list[tuple], *,
                      valid: int | None = None, laurent: bool = False) -> "FracElement":
        den: dict = {}
        scale = rat(1)
        for f in raw_forms:
            lead, nf = normalize_form(f)
            scale = scale * lead
            den[nf] = den.get(nf, 0) + 1
        if scale != 1:
            inv = 1 / scale
            num = {e: c * inv for e, c in num.items()}
        return FracElement(ctx, num, den, valid, laurent)

    def _raised_num(self, target_den: dict) -> tuple[dict, int | None]:
        """Numerator after multiplying by the forms missing from target_den."""
        extra = []
        for f, m in target_den.items():
            k = m - self.den.get(f, 0)
            for _ in range(k):
                extra.append(f)
        if not extra:
            return self.num, self.valid
        cap = None if (self.valid is None or self.laurent) else self.valid + len(extra)
        num = self.num
        for f in extra:
            fd = {}
            for v, c in enumerate(f):
                if c:
                    e = [0] * len(f)
                    e[v] = 1
                    fd[tuple(e)] = c
            num = mul_terms(num, fd, cap)
        valid = None if self.valid is None else self.valid + len(extra)
        return num, valid

    def add(self, other: "FracElement") -> "FracElement":
        if self.ctx != other.ctx or self.laurent != other.laurent:
            raise ValueError("incompatible fraction elements")
        den: dict = dict(self.den)
        for f, m in other.den.items():
            if den.get(f, 0) < m:
                den[f] = m
        num_a, val_a = self._raised_num(den)
        num_b, val_b = other._raised_num(den)
        out = dict(num_a)
        for e, c in num_b.items():
            v = out.get(e)
            if v is None:
                out[e] = c
            else:
                v = v + c
                if v:
                    out[e] = v
                else:
                    del out[e]
        if val_a is None:
            valid = val_b
        elif val_b is None:
            valid = val_a
        else:
            valid = min(val_a, val_b)
        if valid is not None:
            out = prune_terms(out, valid)
        return FracElement(self.ctx, out, den, valid, self.laurent)

    def finalize(self, *, stats_key: str = "g_mult") -> tuple[dict, int | None]:
        """Exact division by the denominator; returns (terms, valid order)."""
        forms = []
        total = 0
        for f, m in self.den.items():
            forms.extend([f] * m)
            total += m
        if self.laurent:
            terms = laurent_divide_exact(self.num, forms, self.ctx.nvars, stats_key=stats_key)
            return terms, None
        terms = divide_exact(self.num, forms, stats_key=stats_key)
        valid = None if self.valid is None else self.valid - total
        if valid is not None:
            terms = prune_terms(terms, valid)
        return terms, valid


def shuffled_quotient_sum(ctx: VarContext, base_num: dict, raw_forms: list[tuple],
                          var_maps: list[tuple[int, ...]], *, valid: int | None,
                          laurent: bool, stats_key: str = "g_mult") -> tuple[dict, int | None]:
    """sum over relabelings sigma of sigma[base_num] / sigma[forms], reduced
    to a polynomial (or Laurent polynomial) by exact division."""
    acc = None
    for vm in var_maps:
        if all(vm[v] == v for v in range(len(vm))):
            num = base_num
        else:
            num = {}
            for e, c in base_num.items():
                ne = [0] * len(e)
                for v, k in enumerate(e):
                    if k:
                        ne[vm[v]] = k
                key = tuple(ne)
                num[key] = c
        forms = [permute_form(f, vm) for f in raw_forms]
        fr = FracElement.from_quotient(ctx, num, forms, valid=valid, laurent=laurent)
        acc = fr if acc is None else acc.add(fr)
    if acc is None:
        return {}, valid
    return acc.finalize(stats_key=stats_key)
