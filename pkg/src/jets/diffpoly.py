"""Exact sparse polynomials in base coordinates and jet variables over Q.

A differential polynomial is stored as a map from monomials to nonzero
rational coefficients. Formal derivatives raise the jet order by one and are
the only maps from lower to higher jet spaces the package ever needs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import EvaluationError, SignatureMismatchError
from .jetspace import BundleSignature, JetVariable, MultiIndex

Scalar = Fraction | int


@dataclass(frozen=True)
class Monomial:
    """Product of base-coordinate powers and jet-variable powers.

    Zero exponents are never stored; the empty monomial is the constant 1.
    ``x_powers`` maps 1-based coordinate positions to positive exponents.
    """

    x_powers: tuple[tuple[int, int], ...]
    jet_powers: tuple[tuple[JetVariable, int], ...]

    @classmethod
    def make(cls, x_powers: Mapping[int, int] | None = None,
             jet_powers: Mapping[JetVariable, int] | None = None) -> "Monomial":
        xs = tuple(sorted((i, e) for i, e in (x_powers or {}).items() if e))
        js = tuple(sorted(((v, e) for v, e in (jet_powers or {}).items() if e),
                          key=lambda ve: ve[0].sort_key))
        if any(e < 0 for _, e in xs) or any(e < 0 for _, e in js):
            raise ValueError("negative exponent in monomial")
        return cls(xs, js)

    @property
    def jet_degree(self) -> int:
        return sum(e for _, e in self.jet_powers)

    @property
    def jet_order(self) -> int | None:
        """Highest |J| among jet factors; None if jet-free."""
        if not self.jet_powers:
            return None
        return max(v.order for v, _ in self.jet_powers)

    def mul(self, other: "Monomial") -> "Monomial":
        xs = dict(self.x_powers)
        for i, e in other.x_powers:
            xs[i] = xs.get(i, 0) + e
        js = dict(self.jet_powers)
        for v, e in other.jet_powers:
            js[v] = js.get(v, 0) + e
        return Monomial.make(xs, js)

    @property
    def sort_key(self) -> tuple:
        """Term order: jet content first (descending factor list), then x part.

        The leading monomial of a polynomial under this key carries its
        highest jet variable, which is what canonical monic scaling targets.
        """
        jets = tuple(sorted(((v.sort_key, e) for v, e in self.jet_powers), reverse=True))
        return (jets, tuple(sorted(self.x_powers)))


Monomial.ONE = Monomial((), ())


class DiffPolynomial:
    """Immutable sparse polynomial over Q in x's and jet variables."""

    __slots__ = ("signature", "_terms", "_hash")

    def __init__(self, signature: BundleSignature,
                 terms: Mapping[Monomial, Scalar] | Iterable[tuple[Monomial, Scalar]] = ()):
        self.signature = signature
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Monomial, Fraction] = {}
        for mono, coeff in items:
            c = Fraction(coeff)
            if c:
                c0 = acc.get(mono)
                c = c if c0 is None else c0 + c
                if c:
                    acc[mono] = c
                elif mono in acc:
                    del acc[mono]
        self._terms = acc
        self._hash = None

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, signature: BundleSignature) -> "DiffPolynomial":
        return cls(signature)

    @classmethod
    def constant(cls, signature: BundleSignature, value: Scalar) -> "DiffPolynomial":
        return cls(signature, {Monomial.ONE: Fraction(value)})

    @classmethod
    def x(cls, signature: BundleSignature, position: int | str) -> "DiffPolynomial":
        i = signature.position_of(position) if isinstance(position, str) else position
        if not 1 <= i <= signature.p:
            raise IndexError(f"coordinate position {i} out of range 1..{signature.p}")
        return cls(signature, {Monomial.make({i: 1}, None): Fraction(1)})

    @classmethod
    def jet(cls, signature: BundleSignature, dep: int | str,
            index: MultiIndex | str | Sequence[int] = ()) -> "DiffPolynomial":
        alpha = signature.alpha_of(dep) if isinstance(dep, str) else dep
        if not 1 <= alpha <= signature.q:
            raise IndexError(f"dependent index {alpha} out of range 1..{signature.q}")
        if isinstance(index, MultiIndex):
            mi = index
        elif isinstance(index, str):
            mi = signature.index_from_letters(index)
        else:
            mi = MultiIndex(index) if tuple(index) else MultiIndex.zero(signature.p)
        if mi.p != signature.p:
            raise SignatureMismatchError("multi-index arity differs from signature")
        v = JetVariable(alpha, mi)
        return cls(signature, {Monomial.make(None, {v: 1}): Fraction(1)})

    @classmethod
    def from_jet_variable(cls, signature: BundleSignature, v: JetVariable) -> "DiffPolynomial":
        return cls(signature, {Monomial.make(None, {v: 1}): Fraction(1)})

    # -- structure ---------------------------------------------------------

    @property
    def terms(self) -> dict[Monomial, Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def order(self) -> int | None:
        """Max jet order over all monomials; None for jet-free polynomials."""
        orders = [m.jet_order for m in self._terms if m.jet_order is not None]
        return max(orders) if orders else None

    @property
    def is_linear(self) -> bool:
        """Affine in the jet variables (coefficients may depend on x)."""
        return all(m.jet_degree <= 1 for m in self._terms)

    @property
    def is_x_poly(self) -> bool:
        return all(not m.jet_powers for m in self._terms)

    def jet_variables(self) -> list[JetVariable]:
        seen = {v for m in self._terms for v, _ in m.jet_powers}
        return sorted(seen, key=lambda v: v.sort_key, reverse=True)

    def x_positions(self) -> set[int]:
        return {i for m in self._terms for i, _ in m.x_powers}

    def leading_monomial(self) -> Monomial:
        if not self._terms:
            raise ValueError("the zero polynomial has no leading monomial")
        return max(self._terms, key=lambda m: m.sort_key)

    def leading_coefficient(self) -> Fraction:
        return self._terms[self.leading_monomial()]

    # -- ring arithmetic ---------------------------------------------------

    def _check(self, other: "DiffPolynomial") -> None:
        if self.signature != other.signature:
            raise SignatureMismatchError("polynomials live over different signatures")

    def _coerce(self, value) -> "DiffPolynomial | None":
        if isinstance(value, DiffPolynomial):
            self._check(value)
            return value
        if isinstance(value, (int, Fraction)):
            return DiffPolynomial.constant(self.signature, value)
        return None

    def __add__(self, other) -> "DiffPolynomial":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        acc = dict(self._terms)
        for m, c in o._terms.items():
            s = acc.get(m, Fraction(0)) + c
            if s:
                acc[m] = s
            else:
                acc.pop(m, None)
        return DiffPolynomial(self.signature, acc)

    __radd__ = __add__

    def __neg__(self) -> "DiffPolynomial":
        return DiffPolynomial(self.signature, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other) -> "DiffPolynomial":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other) -> "DiffPolynomial":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other) -> "DiffPolynomial":
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            if not c:
                return DiffPolynomial.zero(self.signature)
            return DiffPolynomial(self.signature, {m: k * c for m, k in self._terms.items()})
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        acc: dict[Monomial, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in o._terms.items():
                m = m1.mul(m2)
                s = acc.get(m, Fraction(0)) + c1 * c2
                if s:
                    acc[m] = s
                else:
                    acc.pop(m, None)
        return DiffPolynomial(self.signature, acc)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "DiffPolynomial":
        if n < 0:
            raise ValueError("negative powers are not polynomial")
        out = DiffPolynomial.constant(self.signature, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base if n > 1 else base
            n >>= 1
        return out

    def __truediv__(self, scalar) -> "DiffPolynomial":
        c = Fraction(scalar)
        if not c:
            raise ZeroDivisionError("division of a polynomial by zero")
        return self * (1 / c)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = DiffPolynomial.constant(self.signature, other)
        if not isinstance(other, DiffPolynomial):
            return NotImplemented
        return self.signature == other.signature and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            key = tuple(sorted(((m.sort_key, c) for m, c in self._terms.items())))
            self._hash = hash((self.signature, key))
        return self._hash

    def __repr__(self) -> str:
        from .textio import format_polynomial  # late import: display only
        return f"<DiffPolynomial {format_polynomial(self)}>"

    def sort_value(self) -> tuple:
        """Deterministic total sort key over polynomials of one signature."""
        return tuple(sorted(((m.sort_key, c) for m, c in self._terms.items()), reverse=True))

    # -- calculus ----------------------------------------------------------

    def partial_x(self, i: int) -> "DiffPolynomial":
        """Formal partial with respect to x^i; jet variables are constants."""
        if not 1 <= i <= self.signature.p:
            raise IndexError(f"coordinate position {i} out of range 1..{self.signature.p}")
        acc: dict[Monomial, Fraction] = {}
        for mono, coeff in self._terms.items():
            xs = dict(mono.x_powers)
            e = xs.get(i, 0)
            if not e:
                continue
            if e == 1:
                del xs[i]
            else:
                xs[i] = e - 1
            m = Monomial.make(xs, dict(mono.jet_powers))
            s = acc.get(m, Fraction(0)) + coeff * e
            if s:
                acc[m] = s
            else:
                acc.pop(m, None)
        return DiffPolynomial(self.signature, acc)

    def partial_jet(self, v: JetVariable) -> "DiffPolynomial":
        """Formal partial with respect to the jet variable ``v``."""
        acc: dict[Monomial, Fraction] = {}
        for mono, coeff in self._terms.items():
            js = dict(mono.jet_powers)
            e = js.get(v, 0)
            if not e:
                continue
            if e == 1:
                del js[v]
            else:
                js[v] = e - 1
            m = Monomial.make(dict(mono.x_powers), js)
            s = acc.get(m, Fraction(0)) + coeff * e
            if s:
                acc[m] = s
            else:
                acc.pop(m, None)
        return DiffPolynomial(self.signature, acc)

    def formal_derivative(self, i: int) -> "DiffPolynomial":
        """Total derivative D_i: d/dx^i plus the chain-rule sum over jets.

        D_i F = dF/dx^i + sum over jet variables v present in F of
        (dF/dv) * v_{J,i}. Raises the jet order by exactly one whenever F
        contains a jet variable.
        """
        if not 1 <= i <= self.signature.p:
            raise IndexError(f"coordinate position {i} out of range 1..{self.signature.p}")
        out = self.partial_x(i)
        for v in self.jet_variables():
            dv = self.partial_jet(v)
            bumped = DiffPolynomial.from_jet_variable(
                self.signature, JetVariable(v.alpha, v.index.increment(i)))
            out = out + dv * bumped
        return out

    def formal_derivative_multi(self, index: MultiIndex) -> "DiffPolynomial":
        """D_J = D_1^{j_1} ... D_p^{j_p}; order of application is immaterial."""
        out = self
        for i, e in enumerate(index.exponents, start=1):
            for _ in range(e):
                out = out.formal_derivative(i)
        return out

    # -- evaluation and substitution ----------------------------------------

    def evaluate(self, x_values: Mapping[int, Scalar] | Sequence[Scalar] | None = None,
                 jet_values: Mapping[JetVariable, Scalar] | None = None) -> Fraction:
        """Exact value of the polynomial at an assignment of its generators.

        Every coordinate and jet variable that actually occurs must be
        assigned; anything else may be omitted.
        """
        if x_values is None:
            xv: Mapping[int, Scalar] = {}
        elif isinstance(x_values, Mapping):
            xv = x_values
        else:
            xv = {i: val for i, val in enumerate(x_values, start=1)}
        jv = jet_values or {}
        total = Fraction(0)
        for mono, coeff in self._terms.items():
            val = coeff
            for i, e in mono.x_powers:
                if i not in xv:
                    raise EvaluationError(
                        f"no value for coordinate {self.signature.independent[i - 1]}")
                val *= Fraction(xv[i]) ** e
            for v, e in mono.jet_powers:
                if v not in jv:
                    raise EvaluationError(f"no value for jet variable {v.name(self.signature)}")
                val *= Fraction(jv[v]) ** e
            total += val
        return total

    def substitute_jets(self, replacements: Mapping[JetVariable, "DiffPolynomial"]) -> "DiffPolynomial":
        """Replace every jet variable by the given polynomial.

        All jet variables occurring in the polynomial must be covered.
        """
        out = DiffPolynomial.zero(self.signature)
        for mono, coeff in self._terms.items():
            term = DiffPolynomial(self.signature,
                                  {Monomial.make(dict(mono.x_powers), None): coeff})
            for v, e in mono.jet_powers:
                if v not in replacements:
                    raise EvaluationError(
                        f"no replacement for jet variable {v.name(self.signature)}")
                term = term * (replacements[v] ** e)
            out = out + term
        return out

    def substitute_x(self, replacements: Mapping[int, "DiffPolynomial"]) -> "DiffPolynomial":
        """Replace base coordinates by jet-free polynomials (e.g. x -> x0 + h)."""
        for r in replacements.values():
            if not r.is_x_poly:
                raise ValueError("coordinate replacements must be jet-free")
        out = DiffPolynomial.zero(self.signature)
        for mono, coeff in self._terms.items():
            term = DiffPolynomial(self.signature,
                                  {Monomial.make(None, dict(mono.jet_powers)): coeff})
            for i, e in mono.x_powers:
                rep = replacements.get(i)
                if rep is None:
                    rep = DiffPolynomial.x(self.signature, i)
                term = term * (rep ** e)
            out = out + term
        return out

    def x_monomial_content(self) -> dict[int, int]:
        """Common x-power factor of all monomials (min exponent per position)."""
        if not self._terms:
            return {}
        content: dict[int, int] | None = None
        for mono in self._terms:
            xs = dict(mono.x_powers)
            if content is None:
                content = xs
            else:
                content = {i: min(e, xs.get(i, 0)) for i, e in content.items() if xs.get(i, 0)}
            if not content:
                return {}
        return content or {}

    def divide_x_monomial(self, content: Mapping[int, int]) -> "DiffPolynomial":
        if not content:
            return self
        acc = {}
        for mono, coeff in self._terms.items():
            xs = dict(mono.x_powers)
            for i, e in content.items():
                if xs.get(i, 0) < e:
                    raise ValueError("monomial not divisible by content")
                xs[i] -= e
                if not xs[i]:
                    del xs[i]
            acc[Monomial.make(xs, dict(mono.jet_powers))] = coeff
        return DiffPolynomial(self.signature, acc)


def canonical_equation(poly: DiffPolynomial) -> DiffPolynomial:
    """Canonical representative of the equation ``poly = 0``.

    Strips any common x-monomial factor (valid at generic base points) and
    scales the leading coefficient to 1. Jet factors are never divided out:
    that would change the solution set.
    """
    if poly.is_zero:
        return poly
    poly = poly.divide_x_monomial(poly.x_monomial_content())
    return poly / poly.leading_coefficient()
