"""
A small expression language for the data functions of a run: the warping γ,
the leaf metric, the mean curvature data Ψ, the angle data Φ and manufactured
solutions.

Grammar, loosest binding first:

    expression := term (("+" | "-") term)*
    term       := unary (("*" | "/") unary)*
    unary      := "-" unary | power
    power      := atom ("^" power)?
    atom       := number | variable | constant | name "(" args ")" | "(" expression ")"

`^` is right-associative and binds tighter than unary minus, so `-r^2` is
`-(r^2)`. A negative exponent needs parentheses: `cosh(r)^(-2)`.
Variables are x1, x2, s and r (= |x| in the chart); the only named constant is pi.
"""
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Tuple

import numpy as np
import sympy as sp

from warpcap.errors import (
    ArityMismatch,
    ExpressionDomainError,
    ExpressionSyntaxError,
    InvalidInput,
    UnknownIdentifier,
    UnsupportedDerivative,
)

X1, X2, S = sp.symbols("x1 x2 s", real=True)
R = sp.Symbol("r", nonnegative=True)
ARGUMENTS = (X1, X2, S, R)

VARIABLES = {"x1": X1, "x2": X2, "s": S, "r": R}
CONSTANTS = {"pi": sp.pi}


def _min(a, b):
    return (a + b - sp.Abs(a - b)) / 2


def _max(a, b):
    return (a + b + sp.Abs(a - b)) / 2


FUNCTIONS: Dict[str, Tuple[int, Callable]] = {
    "sin": (1, sp.sin),
    "cos": (1, sp.cos),
    "exp": (1, sp.exp),
    "log": (1, sp.log),
    "sqrt": (1, sp.sqrt),
    "cosh": (1, sp.cosh),
    "sinh": (1, sp.sinh),
    "tanh": (1, sp.tanh),
    "abs": (1, sp.Abs),
    "min": (2, _min),
    "max": (2, _max),
}

# functions whose argument must stay inside a domain, with the violation test
GUARDED = {
    "sqrt": lambda a: a < -1e-14,
    "log": lambda a: a <= 0,
}

TOKEN_RE = re.compile(
    r"\s*(?:(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),]))"
)


@dataclass(frozen=True)
class Guard:
    function: str
    argument: sp.Expr
    offset: int


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    offset: int


def tokenize(text: str) -> List[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = TOKEN_RE.match(text, pos)
        if m is None:
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ExpressionSyntaxError(
                f"unexpected character {text[bad]!r}",
                len(text[:bad].encode("utf8")),
                "a number, a name, an operator or a parenthesis",
            )
        start = m.start(m.lastgroup)
        tokens.append(
            Token(m.lastgroup, m.group(m.lastgroup), len(text[:start].encode("utf8")))
        )
        pos = m.end()
    tokens.append(Token("end", "", len(text.encode("utf8"))))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.index = 0
        self.guards: List[Guard] = []

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def accept(self, op: str) -> bool:
        if self.current.kind == "op" and self.current.text == op:
            self.index += 1
            return True
        return False

    def expect(self, op: str) -> None:
        if not self.accept(op):
            raise ExpressionSyntaxError(
                f"unexpected {self.describe(self.current)}",
                self.current.offset,
                f"'{op}'",
            )

    @staticmethod
    def describe(token: Token) -> str:
        return "end of input" if token.kind == "end" else f"'{token.text}'"

    def parse(self) -> sp.Expr:
        tree = self.expression()
        if self.current.kind != "end":
            raise ExpressionSyntaxError(
                f"unexpected {self.describe(self.current)}",
                self.current.offset,
                "an operator or end of input",
            )
        return tree

    def expression(self) -> sp.Expr:
        tree = self.term()
        while True:
            if self.accept("+"):
                tree = tree + self.term()
            elif self.accept("-"):
                tree = tree - self.term()
            else:
                return tree

    def term(self) -> sp.Expr:
        tree = self.unary()
        while True:
            if self.accept("*"):
                tree = tree * self.unary()
            elif self.accept("/"):
                tree = tree / self.unary()
            else:
                return tree

    def unary(self) -> sp.Expr:
        if self.accept("-"):
            return -self.unary()
        return self.power()

    def power(self) -> sp.Expr:
        base = self.atom()
        if self.accept("^"):
            return base ** self.power()
        return base

    def atom(self) -> sp.Expr:
        token = self.current
        if token.kind == "number":
            self.index += 1
            value = Fraction(token.text)
            return sp.Rational(value.numerator, value.denominator)
        if token.kind == "name":
            self.index += 1
            if self.current.kind == "op" and self.current.text == "(":
                return self.call(token)
            if token.text in VARIABLES:
                return VARIABLES[token.text]
            if token.text in CONSTANTS:
                return CONSTANTS[token.text]
            if token.text in FUNCTIONS:
                raise ExpressionSyntaxError(
                    f"function '{token.text}' used without arguments",
                    self.current.offset,
                    "'('",
                )
            raise UnknownIdentifier(token.text, token.offset)
        if self.accept("("):
            tree = self.expression()
            self.expect(")")
            return tree
        raise ExpressionSyntaxError(
            f"unexpected {self.describe(token)}",
            token.offset,
            "a number, a variable, a function call or '('",
        )

    def call(self, name: Token) -> sp.Expr:
        if name.text not in FUNCTIONS:
            raise UnknownIdentifier(name.text, name.offset)
        arity, builder = FUNCTIONS[name.text]
        self.expect("(")
        args = [self.expression()]
        while self.accept(","):
            args.append(self.expression())
        self.expect(")")
        if len(args) != arity:
            raise ArityMismatch(name.text, arity, len(args), name.offset)
        if name.text in GUARDED:
            self.guards.append(Guard(name.text, args[0], name.offset))
        return builder(*args)


class Expression:
    """
    A parsed data function f(x1, x2, s, r) evaluated with numpy.

    Points are arrays of shape (..., dim) with dim 1 or 2; r is computed from
    the point, so callers never pass it.
    """

    def __init__(self, tree, text: str = None, guards: Tuple[Guard, ...] = ()):
        self.tree = sp.sympify(tree)
        self.text = text if text is not None else str(self.tree)
        self.guards = tuple(guards)
        self._compiled = sp.lambdify(ARGUMENTS, self.tree, modules="numpy")
        self._compiled_guards = [
            (g, sp.lambdify(ARGUMENTS, g.argument, modules="numpy"))
            for g in self.guards
        ]

    def __repr__(self):
        return f"Expression({self.text!r})"

    @classmethod
    def constant(cls, value: float) -> "Expression":
        return cls(sp.nsimplify(value), text=repr(float(value)))

    def depends_on(self, name: str) -> bool:
        symbol = VARIABLES[name]
        if symbol in self.tree.free_symbols:
            return True
        return name in ("x1", "x2") and R in self.tree.free_symbols

    def explicit(self) -> sp.Expr:
        """
        The tree with r replaced by sqrt(x1^2 + x2^2).
        """
        return self.tree.subs(R, sp.sqrt(X1**2 + X2**2))

    def derivative(self, name: str) -> "Expression":
        if name == "s":
            for node in self.tree.atoms(sp.Abs):
                if S in node.free_symbols:
                    raise UnsupportedDerivative(
                        f"'{self.text}' is not differentiable in s (abs, min or max of an s-dependent argument)"
                    )
            return Expression(sp.diff(self.tree, S), guards=self.guards)
        if name not in ("x1", "x2"):
            raise InvalidInput(f"cannot differentiate with respect to '{name}'")
        return Expression(sp.diff(self.explicit(), VARIABLES[name]), guards=self.guards)

    def _arguments(self, x, s):
        x = np.asarray(x, dtype=float)
        if x.ndim == 0:
            x = x.reshape(1)
        x1 = x[..., 0]
        x2 = x[..., 1] if x.shape[-1] > 1 else np.zeros_like(x1)
        x1, x2, s = np.broadcast_arrays(x1, x2, np.asarray(s, dtype=float))
        return x1, x2, s, np.hypot(x1, x2)

    def evaluate(self, x, s=0.0, check: bool = True) -> np.ndarray:
        args = self._arguments(x, s)
        for guard, compiled in self._compiled_guards:
            with np.errstate(all="ignore"):
                argument = np.broadcast_to(compiled(*args), args[0].shape)
            if np.any(GUARDED[guard.function](argument)):
                raise ExpressionDomainError(guard.function, guard.offset)
        with np.errstate(all="ignore"):
            value = self._compiled(*args)
        value = np.array(np.broadcast_to(value, args[0].shape), dtype=float)
        if check and not np.all(np.isfinite(value)):
            raise InvalidInput(f"expression '{self.text}' produced non-finite values")
        return value

    def __call__(self, x, s=0.0) -> np.ndarray:
        return self.evaluate(x, s)


def parse_expression(text: str) -> Expression:
    if not isinstance(text, str) or text.strip() == "":
        raise ExpressionSyntaxError("empty expression", 0, "an expression")
    parser = _Parser(text)
    tree = parser.parse()
    return Expression(tree, text=text, guards=tuple(parser.guards))


def symbolic_s_derivative(expr: Expression) -> Expression:
    return expr.derivative("s")
