"""Sparse Laurent polynomials in the z-alphabet of a (quiver, gamma) context.

These are the K-theory-side elements: exact, never truncated, with
integer exponents of either sign and exact rational coefficients.  The
Chern character is the only bridge to the x-side series: a monomial
z^k maps to exp(sum k_v x_v), truncated at the requested order.
"""

from __future__ import annotations

from operator import add as _add

from .quiver import VarContext, VertexPermutation
from .scalars import rat
from .series import SeriesElement, exp_linear, series_zero


class LaurentError(ValueError):
    pass


class LaurentElement:
    """Immutable sparse Laurent polynomial over exact rationals."""

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: VarContext, terms: dict):
        nv = ctx.nvars
        clean = {}
        for e, c in terms.items():
            if len(e) != nv:
                raise LaurentError(f"exponent tuple {e} has wrong length for {nv} variables")
            if c:
                clean[e] = rat(c)
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "terms", clean)

    @classmethod
    def _raw(cls, ctx, terms) -> "LaurentElement":
        self = object.__new__(cls)
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "terms", terms)
        return self

    def __setattr__(self, name, value):
        raise AttributeError("LaurentElement is immutable")

    def _check_ctx(self, other):
        if self.ctx != other.ctx:
            raise LaurentError(
                f"Laurent elements live in different contexts: gamma={self.ctx.gamma} vs {other.ctx.gamma}"
            )

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, exps):
        return self.terms.get(tuple(exps), rat(0))

    def __add__(self, other):
        if not isinstance(other, LaurentElement):
            return self + laurent_const(self.ctx, rat(other))
        self._check_ctx(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e)
            if v is None:
                out[e] = c
            else:
                v = v + c
                if v:
                    out[e] = v
                else:
                    del out[e]
        return LaurentElement._raw(self.ctx, out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentElement._raw(self.ctx, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, LaurentElement):
            return self - laurent_const(self.ctx, rat(other))
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "LaurentElement":
        c = rat(c)
        if not c:
            return LaurentElement._raw(self.ctx, {})
        return LaurentElement._raw(self.ctx, {e: c * v for e, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, LaurentElement):
            return self.scale(other)
        self._check_ctx(other)
        A, B = self.terms, other.terms
        if len(A) > len(B):
            A, B = B, A
        out: dict = {}
        for ea, ca in A.items():
            for eb, cb in B.items():
                k = tuple(map(_add, ea, eb))
                v = ca * cb
                if k in out:
                    out[k] = out[k] + v
                else:
                    out[k] = v
        return LaurentElement._raw(self.ctx, {e: c for e, c in out.items() if c})

    def __rmul__(self, other):
        return self.scale(other)

    def __eq__(self, other):
        if not isinstance(other, LaurentElement):
            return NotImplemented
        return self.ctx == other.ctx and self.terms == other.terms

    def __ne__(self, other):
        eq = self.__eq__(other)
        return NotImplemented if eq is NotImplemented else not eq

    def __hash__(self):
        return hash((self.ctx, frozenset(self.terms.items())))

    def __repr__(self):
        from .expr import format_element
        return f"<laurent {format_element(self)}>"

    def shifted(self, shift: tuple[int, ...]) -> "LaurentElement":
        """Multiply by the monomial z^shift."""
        return LaurentElement._raw(
            self.ctx, {tuple(map(_add, e, shift)): c for e, c in self.terms.items()}
        )

    def permuted(self, perm: VertexPermutation) -> "LaurentElement":
        vm = perm.var_map(self.ctx)
        out = {}
        for e, c in self.terms.items():
            ne = [0] * len(e)
            for v, k in enumerate(e):
                if k:
                    ne[vm[v]] = k
            out[tuple(ne)] = c
        return LaurentElement._raw(self.ctx, out)

    def relabeled(self, new_ctx: VarContext, var_map: tuple[int, ...]) -> "LaurentElement":
        nv = new_ctx.nvars
        out = {}
        for e, c in self.terms.items():
            ne = [0] * nv
            for v, k in enumerate(e):
                if k:
                    ne[var_map[v]] = k
            out[tuple(ne)] = c
        return LaurentElement._raw(new_ctx, out)

    def ch(self, N: int) -> SeriesElement:
        """Chern character: z^k -> exp(sum k_v x_v), truncated at N."""
        out = series_zero(self.ctx, N)
        for e, c in self.terms.items():
            out = out + exp_linear(self.ctx, e, N).scale(c)
        return out


def laurent_const(ctx: VarContext, value) -> LaurentElement:
    v = rat(value)
    return LaurentElement._raw(ctx, {(0,) * ctx.nvars: v} if v else {})


def laurent_one(ctx: VarContext) -> LaurentElement:
    return laurent_const(ctx, 1)


def laurent_monomial(ctx: VarContext, exps, coeff=1) -> LaurentElement:
    return LaurentElement(ctx, {tuple(exps): rat(coeff)})


def laurent_variable(ctx: VarContext, vertex: int, slot: int, power: int = 1) -> LaurentElement:
    e = [0] * ctx.nvars
    e[ctx.var_index(vertex, slot)] = power
    return laurent_monomial(ctx, e)
