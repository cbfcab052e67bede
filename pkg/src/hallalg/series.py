"""Degree-truncated multivariate power series over exact rationals.

A SeriesElement stores a sparse map {exponent tuple: rational} together
with a truncation order.  Order None means the element is an exact
polynomial (nothing has been discarded); a finite order N means the
coefficients are only known, and only stored, for total degree <= N.

Orders propagate through products by the sharp rule

    order(a * b) = min over the truncated factors of
                   (its order + the other factor's minimal degree),

not the naive minimum: multiplying by an exact homogeneous polynomial of
degree d raises the trustworthy range by d.  The gauge-level shuffle
products rely on this to stay exact after division by the gauge Euler
factor.
"""

from __future__ import annotations

from functools import lru_cache
from operator import add as _add

from .quiver import VarContext, VertexPermutation
from .scalars import HALF, ONE, Rat, rat


class SeriesError(ValueError):
    pass


class ContextMismatchError(SeriesError):
    pass


# ---------------------------------------------------------------------------
# raw dict kernels (exponent tuple -> coefficient)

def add_terms(A: dict, B: dict) -> dict:
    out = dict(A)
    for e, c in B.items():
        v = out.get(e)
        if v is None:
            out[e] = c
        else:
            v = v + c
            if v:
                out[e] = v
            else:
                del out[e]
    return out


def scale_terms(A: dict, c) -> dict:
    if not c:
        return {}
    return {e: c * v for e, v in A.items()}


def mul_terms(A: dict, B: dict, cap: int | None) -> dict:
    """Sparse product, discarding monomials of total degree > cap."""
    if not A or not B:
        return {}
    if len(A) > len(B):
        A, B = B, A
    out: dict = {}
    if cap is None:
        for ea, ca in A.items():
            for eb, cb in B.items():
                k = tuple(map(_add, ea, eb))
                v = ca * cb
                if k in out:
                    out[k] = out[k] + v
                else:
                    out[k] = v
    else:
        buckets: dict[int, list] = {}
        for eb, cb in B.items():
            buckets.setdefault(sum(eb), []).append((eb, cb))
        degs = sorted(buckets)
        for ea, ca in A.items():
            room = cap - sum(ea)
            if room < 0:
                continue
            for d in degs:
                if d > room:
                    break
                for eb, cb in buckets[d]:
                    k = tuple(map(_add, ea, eb))
                    v = ca * cb
                    if k in out:
                        out[k] = out[k] + v
                    else:
                        out[k] = v
    return {e: c for e, c in out.items() if c}


def prune_terms(terms: dict, cap: int | None) -> dict:
    if cap is None:
        return {e: c for e, c in terms.items() if c}
    return {e: c for e, c in terms.items() if c and sum(e) <= cap}


def _slices(terms: dict, top: int) -> dict[int, dict]:
    out: dict[int, dict] = {}
    for e, c in terms.items():
        d = sum(e)
        if d <= top:
            out.setdefault(d, {})[e] = c
    return out


def min_degree_terms(terms: dict) -> int | None:
    return min((sum(e) for e in terms), default=None)


# ---------------------------------------------------------------------------
# the element

class SeriesElement:
    """Immutable truncated series attached to a variable context."""

    __slots__ = ("ctx", "order", "terms")

    def __init__(self, ctx: VarContext, order: int | None, terms: dict):
        nv = ctx.nvars
        clean: dict = {}
        for e, c in terms.items():
            if len(e) != nv:
                raise SeriesError(f"exponent tuple {e} has wrong length for {nv} variables")
            if any(k < 0 for k in e):
                raise SeriesError(f"negative exponent in series monomial {e}")
            if not c:
                continue
            if order is not None and sum(e) > order:
                continue
            clean[e] = rat(c)
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "terms", clean)

    @classmethod
    def _raw(cls, ctx, order, terms) -> "SeriesElement":
        """Internal constructor for terms already validated/pruned."""
        self = object.__new__(cls)
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "terms", terms)
        return self

    def __setattr__(self, name, value):
        raise AttributeError("SeriesElement is immutable")

    # -- inspection ---------------------------------------------------------

    @property
    def constant_term(self):
        return self.terms.get((0,) * self.ctx.nvars, rat(0))

    def min_degree(self) -> int | None:
        return min_degree_terms(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, exps: tuple[int, ...]):
        return self.terms.get(tuple(exps), rat(0))

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    # -- ring structure -----------------------------------------------------

    def _check_ctx(self, other: "SeriesElement"):
        if self.ctx != other.ctx:
            raise ContextMismatchError(
                f"series live in different contexts: gamma={self.ctx.gamma} vs {other.ctx.gamma}"
            )

    @staticmethod
    def _min_order(a: int | None, b: int | None) -> int | None:
        if a is None:
            return b
        if b is None:
            return a
        return min(a, b)

    def __add__(self, other):
        if not isinstance(other, SeriesElement):
            return self + series_const(self.ctx, rat(other), self.order)
        self._check_ctx(other)
        order = self._min_order(self.order, other.order)
        return SeriesElement._raw(self.ctx, order, prune_terms(add_terms(self.terms, other.terms), order))

    __radd__ = __add__

    def __neg__(self):
        return SeriesElement._raw(self.ctx, self.order, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, SeriesElement):
            return self - series_const(self.ctx, rat(other), self.order)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "SeriesElement":
        return SeriesElement._raw(self.ctx, self.order, scale_terms(self.terms, rat(c)))

    def __mul__(self, other):
        if not isinstance(other, SeriesElement):
            return self.scale(other)
        self._check_ctx(other)
        order = mul_order(self.order, self.min_degree(), other.order, other.min_degree())
        return SeriesElement._raw(self.ctx, order, mul_terms(self.terms, other.terms, order))

    def __rmul__(self, other):
        return self.scale(other)

    def __eq__(self, other):
        if not isinstance(other, SeriesElement):
            return NotImplemented
        return self.ctx == other.ctx and self.order == other.order and self.terms == other.terms

    def __ne__(self, other):
        eq = self.__eq__(other)
        return NotImplemented if eq is NotImplemented else not eq

    def __hash__(self):
        return hash((self.ctx, self.order, frozenset(self.terms.items())))

    def __repr__(self):
        from .expr import format_element
        body = format_element(self)
        tail = "" if self.order is None else f" + O(deg {self.order + 1})"
        return f"<series {body}{tail}>"

    # -- structural operations ----------------------------------------------

    def truncate(self, order: int) -> "SeriesElement":
        new_order = order if (self.order is None or self.order >= order) else self.order
        return SeriesElement._raw(self.ctx, new_order, prune_terms(self.terms, new_order))

    def permuted(self, perm: VertexPermutation) -> "SeriesElement":
        vm = perm.var_map(self.ctx)
        out = {}
        for e, c in self.terms.items():
            ne = [0] * len(e)
            for v, k in enumerate(e):
                if k:
                    ne[vm[v]] = k
            out[tuple(ne)] = c
        return SeriesElement._raw(self.ctx, self.order, out)

    def relabeled(self, new_ctx: VarContext, var_map: tuple[int, ...]) -> "SeriesElement":
        """Inject into another context along an injective variable map."""
        nv = new_ctx.nvars
        out = {}
        for e, c in self.terms.items():
            ne = [0] * nv
            for v, k in enumerate(e):
                if k:
                    ne[var_map[v]] = k
            out[tuple(ne)] = c
        return SeriesElement._raw(new_ctx, self.order, out)


def mul_order(oa: int | None, mina: int | None, ob: int | None, minb: int | None) -> int | None:
    """Valid order of a product; None means exact.  min degrees come from the
    representatives (None for a zero representative, treated as +infinity)."""
    cands = []
    if oa is not None:
        cands.append(oa + minb if minb is not None else None)
    if ob is not None:
        cands.append(ob + mina if mina is not None else None)
    cands = [c for c in cands if c is not None]
    return min(cands) if cands else None


# ---------------------------------------------------------------------------
# constructors

def series_const(ctx: VarContext, value, order: int | None = None) -> SeriesElement:
    v = rat(value)
    terms = {(0,) * ctx.nvars: v} if v else {}
    return SeriesElement._raw(ctx, order, terms)


def series_one(ctx: VarContext, order: int | None = None) -> SeriesElement:
    return series_const(ctx, 1, order)


def series_zero(ctx: VarContext, order: int | None = None) -> SeriesElement:
    return SeriesElement._raw(ctx, order, {})


def monomial(ctx: VarContext, exps, coeff=1, order: int | None = None) -> SeriesElement:
    return SeriesElement(ctx, order, {tuple(exps): rat(coeff)})


def variable(ctx: VarContext, vertex: int, slot: int, order: int | None = None) -> SeriesElement:
    e = [0] * ctx.nvars
    e[ctx.var_index(vertex, slot)] = 1
    return monomial(ctx, e, 1, order)


def linear_form(ctx: VarContext, coeffs) -> SeriesElement:
    """The linear polynomial sum(coeffs[v] * x_v), exact."""
    coeffs = tuple(rat(c) for c in coeffs)
    if len(coeffs) != ctx.nvars:
        raise SeriesError(f"linear form needs {ctx.nvars} coefficients, got {len(coeffs)}")
    terms = {}
    for v, c in enumerate(coeffs):
        if c:
            e = [0] * ctx.nvars
            e[v] = 1
            terms[tuple(e)] = c
    return SeriesElement._raw(ctx, None, terms)


# ---------------------------------------------------------------------------
# the four nontrivial operations

def series_mul(a: SeriesElement, b: SeriesElement) -> SeriesElement:
    return a * b


def series_invert(a: SeriesElement, order: int | None = None) -> SeriesElement:
    """Multiplicative inverse up to the truncation order.

    Degree-by-degree: with a = sum of homogeneous slices a_d and b the
    inverse, b_0 = 1/a_0 and a_0 b_m = -sum_{d=1..m} a_d b_{m-d}.
    """
    c0 = a.constant_term
    if not c0:
        raise SeriesError("cannot invert a series with zero constant term")
    N = a.order if a.order is not None else order
    if N is None:
        raise SeriesError("inverting an exact polynomial requires a truncation order")
    zero = (0,) * a.ctx.nvars
    aslices = _slices(a.terms, N)
    inv0 = 1 / c0
    bslices: dict[int, dict] = {0: {zero: inv0}}
    for m in range(1, N + 1):
        acc: dict = {}
        for d, sl in aslices.items():
            if d == 0 or d > m:
                continue
            prev = bslices.get(m - d)
            if not prev:
                continue
            for ea, ca in sl.items():
                for eb, cb in prev.items():
                    k = tuple(map(_add, ea, eb))
                    v = ca * cb
                    if k in acc:
                        acc[k] = acc[k] + v
                    else:
                        acc[k] = v
        sl_out = {e: -v * inv0 for e, v in acc.items() if v}
        if sl_out:
            bslices[m] = sl_out
    terms: dict = {}
    for sl in bslices.values():
        terms.update(sl)
    return SeriesElement._raw(a.ctx, N, terms)


def series_exp(a: SeriesElement, order: int | None = None) -> SeriesElement:
    """exp of a series with zero constant term, truncated."""
    if a.constant_term:
        raise SeriesError("series_exp requires zero constant term")
    N = a.order if a.order is not None else order
    if N is None:
        raise SeriesError("exponentiating an exact polynomial requires a truncation order")
    aN = a.truncate(N)
    acc = series_one(a.ctx, N)
    for k in range(N, 0, -1):
        acc = series_one(a.ctx, N) + (aN * acc).scale(Rat(1, k))
    return acc


def series_sqrt(a: SeriesElement, order: int | None = None) -> SeriesElement:
    """The unique square root with constant term 1, by Newton iteration
    y -> (y + a/y)/2 on truncated series.  Exact fixed point is reached in
    O(log N) steps because each step doubles the correct degree range."""
    if a.constant_term != 1:
        raise SeriesError("series_sqrt requires constant term 1")
    N = a.order if a.order is not None else order
    if N is None:
        raise SeriesError("square-rooting an exact polynomial requires a truncation order")
    aN = a.truncate(N)
    y = series_one(a.ctx, N)
    while True:
        y_next = (y + aN * series_invert(y)).scale(HALF)
        if y_next == y:
            return y
        y = y_next


def series_pow(a: SeriesElement, k: int, order: int | None = None) -> SeriesElement:
    """Integer power; negative exponents invert first (unit constant required)."""
    if k < 0:
        return series_pow(series_invert(a, order), -k)
    N = a.order if a.order is not None else order
    result = series_one(a.ctx, N)
    base = a if N is None else a.truncate(N)
    while k:
        if k & 1:
            result = result * base
        k >>= 1
        if k:
            base = base * base
    return result


# ---------------------------------------------------------------------------
# exponentials of linear forms and Todd factors

def exp_linear(ctx: VarContext, coeffs, N: int) -> SeriesElement:
    """exp(sum coeffs[v] x_v) truncated at N, by the multinomial formula.

    Only the support variables are iterated, so exponentials of the
    two-variable difference forms stay small.
    """
    coeffs = tuple(rat(c) for c in coeffs)
    if len(coeffs) != ctx.nvars:
        raise SeriesError(f"exp_linear needs {ctx.nvars} coefficients, got {len(coeffs)}")
    support = [(v, c) for v, c in enumerate(coeffs) if c]
    out: dict = {}
    exp_buf = [0] * ctx.nvars

    def emit(i: int, room: int, value):
        if i == len(support):
            out[tuple(exp_buf)] = value
            return
        v, c = support[i]
        val = value
        for k in range(room + 1):
            if k:
                val = val * c / k
            exp_buf[v] = k
            emit(i + 1, room - k, val)
        exp_buf[v] = 0

    emit(0, N, ONE)
    return SeriesElement._raw(ctx, N, {e: c for e, c in out.items() if c})


@lru_cache(maxsize=None)
def _todd_factor_cached(ctx: VarContext, coeffs: tuple, exponent: int, N: int) -> SeriesElement:
    ell = {}
    for v, c in enumerate(coeffs):
        if c:
            e = [0] * ctx.nvars
            e[v] = 1
            ell[tuple(e)] = c
    # 1/td1(l) = (1 - exp(-l))/l = sum_{k>=0} (-1)^k l^k/(k+1)!
    base: dict = {(0,) * ctx.nvars: ONE}
    power: dict = {(0,) * ctx.nvars: ONE}
    fact = 1
    sign = 1
    for k in range(1, N + 1):
        power = mul_terms(power, ell, N)
        if not power:
            break
        sign = -sign
        fact *= k + 1
        base = add_terms(base, scale_terms(power, Rat(sign, fact)))
    inv = series_invert(SeriesElement._raw(ctx, N, prune_terms(base, N)))
    return series_pow(inv, exponent)


def todd_factor(ctx: VarContext, coeffs, exponent: int = 1, N: int | None = None) -> SeriesElement:
    """[l / (1 - exp(-l))]^exponent for a nonzero linear form l, truncated at N."""
    if N is None:
        raise SeriesError("todd_factor requires a truncation order")
    coeffs = tuple(rat(c) for c in coeffs)
    if len(coeffs) != ctx.nvars:
        raise SeriesError(f"todd_factor needs {ctx.nvars} coefficients, got {len(coeffs)}")
    if not any(coeffs):
        raise SeriesError("todd_factor requires a nonzero linear form")
    if exponent == 0:
        return series_one(ctx, N)
    return _todd_factor_cached(ctx, coeffs, int(exponent), N)
