"""Text format for equation systems: parser, printers, structured output.

Grammar (see README for the full description)::

    file   := header stmt*
    header := "independent" ident+ ";" "dependent" ident+ ";" ["order" nat ";"]
    stmt   := "eq" expr "=" expr ";"
    expr   := term (("+"|"-") term)*
    term   := factor ("*" factor)*
    factor := atom ["^" nat] | "-" factor
    atom   := rational | ident | jet | "(" expr ")"
    jet    := "d" "(" ident ("," ident)+ ")" | ident "_" letters

Subscript shorthand (``u_xy``) is legal only when every independent name is
a single character; ``d(u,x,y)`` always works. Derivative letters commute
and are canonicalized. Rationals are ``p/q`` or integers; no decimals.
``#`` starts a line comment. No implicit multiplication.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .diffpoly import DiffPolynomial, Monomial
from .errors import ParseError
from .jetspace import BundleSignature, JetVariable, MultiIndex
from .systems import DiffSystem

FORMAT_VERSION = 1

_KEYWORDS = {"independent", "dependent", "order", "eq"}
_PUNCT = set("+-*^=();,")


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "number", "punct", "end"
    value: str
    subscript: str | None
    line: int
    col: int


def _is_letter(ch: str) -> bool:
    return ("a" <= ch <= "z") or ("A" <= ch <= "Z")


def _is_digit(ch: str) -> bool:
    return "0" <= ch <= "9"


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i, size = 0, len(text)
    while i < size:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < size and text[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if _is_letter(ch):
            j = i
            while j < size and (_is_letter(text[j]) or _is_digit(text[j])):
                j += 1
            name = text[i:j]
            subscript = None
            if j < size and text[j] == "_":
                k = j + 1
                while k < size and _is_letter(text[k]):
                    k += 1
                if k == j + 1:
                    raise ParseError("'_' must be followed by derivative letters",
                                     line, col + (j - i))
                subscript = text[j + 1:k]
                j = k
            tokens.append(Token("ident", name, subscript, start_line, start_col))
            col += j - i
            i = j
            continue
        if _is_digit(ch):
            j = i
            while j < size and _is_digit(text[j]):
                j += 1
            if j < size and text[j] == ".":
                raise ParseError("decimal numbers are not accepted; use p/q",
                                 line, col)
            value = text[i:j]
            if j < size and text[j] == "/":
                k = j + 1
                m = k
                while m < size and _is_digit(text[m]):
                    m += 1
                if m == k:
                    raise ParseError("expected digits after '/' in a rational",
                                     line, col + (j - i) + 1)
                value = text[i:m]
                j = m
            tokens.append(Token("number", value, None, start_line, start_col))
            col += j - i
            i = j
            continue
        if ch in _PUNCT:
            tokens.append(Token("punct", ch, None, start_line, start_col))
            i += 1
            col += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", line, col)
    tokens.append(Token("end", "", None, line, col))
    return tokens


@dataclass
class SystemDocument:
    """Parsed source plus per-equation locations for diagnostics.

    ``locations`` follows the order of the ``eq`` statements in the input,
    before canonicalization reorders and deduplicates the equations.
    """

    text: str
    system: DiffSystem
    locations: tuple[tuple[int, int], ...]


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.pos = 0
        self.signature: BundleSignature | None = None
        self.single_char_frame = False

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "end":
            self.pos += 1
        return tok

    def fail(self, message: str, tok: Token | None = None):
        tok = tok or self.peek()
        raise ParseError(message, tok.line, tok.col)

    def expect_punct(self, ch: str) -> Token:
        tok = self.peek()
        if tok.kind != "punct" or tok.value != ch:
            self.fail(f"expected {ch!r}", tok)
        return self.advance()

    def expect_keyword(self, word: str) -> Token:
        tok = self.peek()
        if tok.kind != "ident" or tok.value != word or tok.subscript:
            self.fail(f"expected keyword {word!r}", tok)
        return self.advance()

    # -- header --------------------------------------------------------

    def parse_names(self) -> list[str]:
        names = []
        while self.peek().kind == "ident" and self.peek().value not in _KEYWORDS:
            tok = self.advance()
            if tok.subscript:
                self.fail("coordinate names cannot carry subscripts", tok)
            if tok.value == "d":
                self.fail("'d' is reserved for the derivative form d(u,x,...)", tok)
            names.append(tok.value)
        if not names:
            self.fail("expected at least one name")
        return names

    def parse_document(self) -> SystemDocument:
        self.expect_keyword("independent")
        independent = self.parse_names()
        self.expect_punct(";")
        self.expect_keyword("dependent")
        dependent = self.parse_names()
        self.expect_punct(";")
        dup = set(independent) & set(dependent)
        if dup or len(set(independent)) != len(independent) \
                or len(set(dependent)) != len(dependent):
            self.fail("coordinate names must be pairwise distinct")
        self.signature = BundleSignature(independent, dependent)
        self.single_char_frame = all(len(n) == 1 for n in independent)

        declared: int | None = None
        order_tok: Token | None = None
        if self.peek().kind == "ident" and self.peek().value == "order":
            order_tok = self.advance()
            tok = self.peek()
            if tok.kind != "number" or "/" in tok.value:
                self.fail("expected a natural number after 'order'", tok)
            declared = int(self.advance().value)
            self.expect_punct(";")

        equations: list[DiffPolynomial] = []
        locations: list[tuple[int, int]] = []
        while self.peek().kind != "end":
            tok = self.expect_keyword("eq")
            lhs = self.parse_expr()
            self.expect_punct("=")
            rhs = self.parse_expr()
            self.expect_punct(";")
            equations.append(lhs - rhs)
            locations.append((tok.line, tok.col))
        if not equations:
            self.fail("expected at least one 'eq' statement")

        max_order = max((eq.order or 0) for eq in equations)
        order = declared if declared is not None else max_order
        try:
            system = DiffSystem(self.signature, equations, order)
        except ValueError as exc:
            tok = order_tok or self.tokens[0]
            raise ParseError(str(exc), tok.line, tok.col) from None
        return SystemDocument(self.text, system, tuple(locations))

    # -- expressions -----------------------------------------------------

    def parse_expr(self) -> DiffPolynomial:
        out = self.parse_term()
        while self.peek().kind == "punct" and self.peek().value in "+-":
            op = self.advance().value
            rhs = self.parse_term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def parse_term(self) -> DiffPolynomial:
        out = self.parse_factor()
        while self.peek().kind == "punct" and self.peek().value == "*":
            self.advance()
            out = out * self.parse_factor()
        return out

    def parse_factor(self) -> DiffPolynomial:
        tok = self.peek()
        if tok.kind == "punct" and tok.value == "-":
            self.advance()
            return -self.parse_factor()
        atom = self.parse_atom()
        if self.peek().kind == "punct" and self.peek().value == "^":
            self.advance()
            tok = self.peek()
            if tok.kind != "number" or "/" in tok.value:
                self.fail("expected a natural exponent after '^'", tok)
            atom = atom ** int(self.advance().value)
        return atom

    def parse_atom(self) -> DiffPolynomial:
        sig = self.signature
        tok = self.peek()
        if tok.kind == "number":
            self.advance()
            return DiffPolynomial.constant(sig, Fraction(tok.value))
        if tok.kind == "punct" and tok.value == "(":
            self.advance()
            inner = self.parse_expr()
            self.expect_punct(")")
            return inner
        if tok.kind == "ident":
            if tok.value == "d" and not tok.subscript:
                nxt = self.tokens[self.pos + 1]
                if nxt.kind == "punct" and nxt.value == "(":
                    return self.parse_d_form()
            self.advance()
            return self.resolve_name(tok)
        self.fail("expected a number, name, jet variable, or '('", tok)

    def resolve_name(self, tok: Token) -> DiffPolynomial:
        sig = self.signature
        name = tok.value
        if tok.subscript is not None:
            if name not in sig.dependent:
                if name in sig.independent:
                    self.fail(f"{name!r} is an independent variable and has "
                              "no derivatives", tok)
                self.fail(f"unknown dependent variable {name!r}", tok)
            if not self.single_char_frame:
                self.fail("subscript shorthand needs single-character "
                          "independent names; use d(u,...)", tok)
            exps = [0] * sig.p
            for ch in tok.subscript:
                if ch in sig.dependent:
                    self.fail(f"subscript uses the dependent name {ch!r}", tok)
                if ch not in sig.independent:
                    self.fail(f"unknown coordinate letter {ch!r} in subscript", tok)
                exps[sig.position_of(ch) - 1] += 1
            return DiffPolynomial.jet(sig, name, MultiIndex(exps))
        if name in sig.independent:
            return DiffPolynomial.x(sig, name)
        if name in sig.dependent:
            return DiffPolynomial.jet(sig, name, MultiIndex.zero(sig.p))
        self.fail(f"unknown identifier {name!r}", tok)

    def parse_d_form(self) -> DiffPolynomial:
        sig = self.signature
        self.advance()  # d
        self.expect_punct("(")
        dep_tok = self.peek()
        if dep_tok.kind != "ident" or dep_tok.subscript:
            self.fail("expected a dependent variable name", dep_tok)
        if dep_tok.value not in sig.dependent:
            self.fail(f"unknown dependent variable {dep_tok.value!r}", dep_tok)
        self.advance()
        exps = [0] * sig.p
        count = 0
        while self.peek().kind == "punct" and self.peek().value == ",":
            self.advance()
            var_tok = self.peek()
            if var_tok.kind != "ident" or var_tok.subscript:
                self.fail("expected an independent variable name", var_tok)
            if var_tok.value not in sig.independent:
                if var_tok.value in sig.dependent:
                    self.fail(f"derivative index uses the dependent name "
                              f"{var_tok.value!r}", var_tok)
                self.fail(f"unknown independent variable {var_tok.value!r}", var_tok)
            exps[sig.position_of(var_tok.value) - 1] += 1
            count += 1
            self.advance()
        self.expect_punct(")")
        if count == 0:
            self.fail("d(...) needs at least one derivative index", dep_tok)
        return DiffPolynomial.jet(sig, dep_tok.value, MultiIndex(exps))


def parse_document(text: str) -> SystemDocument:
    return _Parser(text).parse_document()


def parse_system(text: str) -> DiffSystem:
    return parse_document(text).system


# -- printing ---------------------------------------------------------------


def _format_factor(signature: BundleSignature, mono: Monomial) -> str:
    parts = []
    for i, e in sorted(mono.x_powers):
        name = signature.independent[i - 1]
        parts.append(name if e == 1 else f"{name}^{e}")
    for v, e in sorted(mono.jet_powers, key=lambda ve: ve[0].sort_key, reverse=True):
        name = v.name(signature)
        parts.append(name if e == 1 else f"{name}^{e}")
    return "*".join(parts)


def format_polynomial(poly: DiffPolynomial) -> str:
    if poly.is_zero:
        return "0"
    sig = poly.signature
    items = sorted(poly.items(), key=lambda mc: mc[0].sort_key, reverse=True)
    chunks = []
    for pos, (mono, coeff) in enumerate(items):
        body = _format_factor(sig, mono)
        mag = abs(coeff)
        if not body:
            rendered = str(mag)
        elif mag == 1:
            rendered = body
        else:
            rendered = f"{mag}*{body}"
        if pos == 0:
            chunks.append(rendered if coeff > 0 else f"-{rendered}")
        else:
            chunks.append(f"{' + ' if coeff > 0 else ' - '}{rendered}")
    return "".join(chunks)


def format_equation(poly: DiffPolynomial) -> str:
    return f"{format_polynomial(poly)} = 0"


def format_system(system: DiffSystem) -> str:
    return "\n".join(format_equation(eq) for eq in system.equations)


def print_system(system: DiffSystem, format: str = "text") -> str:
    """Deterministic rendering; ``text`` round-trips through the parser."""
    if format == "text":
        sig = system.signature
        lines = [
            f"independent {' '.join(sig.independent)};",
            f"dependent {' '.join(sig.dependent)};",
            f"order {system.order};",
        ]
        lines.extend(f"eq {format_equation(eq)};" for eq in system.equations)
        return "\n".join(lines) + "\n"
    if format == "structured":
        return json.dumps(system_to_tree(system), indent=2) + "\n"
    raise ValueError(f"unknown format {format!r}")


def polynomial_to_tree(poly: DiffPolynomial) -> dict:
    items = sorted(poly.items(), key=lambda mc: mc[0].sort_key, reverse=True)
    terms = []
    for mono, coeff in items:
        terms.append({
            "coefficient": str(coeff),
            "x_powers": [[i, e] for i, e in sorted(mono.x_powers)],
            "jets": [
                {
                    "dependent": poly.signature.dependent[v.alpha - 1],
                    "index": list(v.index.exponents),
                    "power": e,
                }
                for v, e in sorted(mono.jet_powers,
                                   key=lambda ve: ve[0].sort_key, reverse=True)
            ],
        })
    return {"terms": terms, "rendered": format_polynomial(poly)}


def system_to_tree(system: DiffSystem) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "independent": list(system.signature.independent),
        "dependent": list(system.signature.dependent),
        "order": system.order,
        "equations": [polynomial_to_tree(eq) for eq in system.equations],
    }


def _expression_parser(signature: BundleSignature, text: str) -> _Parser:
    parser = _Parser.__new__(_Parser)
    parser.text = text
    parser.tokens = tokenize(text)
    parser.pos = 0
    parser.signature = signature
    parser.single_char_frame = all(len(n) == 1 for n in signature.independent)
    return parser


def parse_polynomial(signature: BundleSignature, text: str) -> DiffPolynomial:
    """One expression over a known signature, e.g. ``"u_z + y*u_x"``."""
    parser = _expression_parser(signature, text)
    poly = parser.parse_expr()
    if parser.peek().kind != "end":
        raise ParseError("unexpected trailing input after expression",
                         parser.peek().line, parser.peek().col)
    return poly


def parse_jet_name(signature: BundleSignature, text: str) -> JetVariable:
    """Jet variable from ``u``, ``u_xy``, or ``d(u,x,y)`` notation."""
    parser = _expression_parser(signature, text)
    if parser.peek().kind == "end":
        raise ParseError("expected a jet variable name", 1, 1)
    poly = parser.parse_atom()
    if parser.peek().kind != "end":
        raise ParseError("unexpected trailing input after jet variable",
                         parser.peek().line, parser.peek().col)
    jets = poly.jet_variables()
    terms = poly.terms
    if len(jets) != 1 or len(terms) != 1 or set(terms.values()) != {Fraction(1)}:
        raise ParseError("expected a bare jet variable", 1, 1)
    (mono, _), = terms.items()
    if mono.x_powers or mono.jet_powers[0][1] != 1:
        raise ParseError("expected a bare jet variable", 1, 1)
    return jets[0]
