"""Small arithmetic expression language for user-supplied functions and kernels.

Grammar (EBNF):

    expr  := cmp
    cmp   := add (("<" | "<=" | ">" | ">=" | "==" | "!=") add)?
    add   := mul (("+" | "-") mul)*
    mul   := unary (("*" | "/") unary)*
    unary := "-" unary | pow
    pow   := atom ("^" unary)?
    atom  := NUMBER | IDENT | IDENT "(" expr ("," expr)* ")" | "(" expr ")"

"^" is right-associative and binds tighter than unary minus.  Comparisons
produce 1.0/0.0 and are only accepted as the condition of
``if(cond, then, else)``; anywhere else validation rejects the tree.
Numbers are decimal with optional fraction and exponent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping


class ExprError(Exception):
    """Base class for expression language errors."""


class ParseError(ExprError):
    """Malformed source; carries the byte offset and what was expected."""

    def __init__(self, message: str, offset: int, expected: str, source: str):
        self.offset = offset
        self.expected = expected
        lo = max(0, offset - 12)
        hi = min(len(source), offset + 12)
        self.excerpt = source[lo:hi]
        super().__init__(f"{message} at offset {offset} (expected {expected}): {self.excerpt!r}")


class EvalError(ExprError):
    """Runtime failure: unbound variable, division by zero, domain error."""


# ---------------------------------------------------------------------------
# Syntax tree


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple["Node", ...]


@dataclass(frozen=True)
class Bin:
    op: str  # + - * / ^
    lhs: "Node"
    rhs: "Node"


@dataclass(frozen=True)
class Cmp:
    op: str  # < <= > >= == !=
    lhs: "Node"
    rhs: "Node"


@dataclass(frozen=True)
class If:
    cond: "Node"
    then: "Node"
    otherwise: "Node"


Node = Num | Var | Neg | Call | Bin | Cmp | If

_VARIABLES = ("t", "x")


def _sgn(v: float) -> float:
    if v > 0:
        return 1.0
    if v < 0:
        return -1.0
    return 0.0


# name -> (arity, implementation)
_FUNCTIONS: dict[str, tuple[int, Callable[..., float]]] = {
    "sin": (1, math.sin),
    "cos": (1, math.cos),
    "exp": (1, math.exp),
    "log": (1, math.log),
    "abs": (1, abs),
    "sgn": (1, _sgn),
    "sqrt": (1, math.sqrt),
    "floor": (1, math.floor),
    "min": (2, min),
    "max": (2, max),
}

_CMP_OPS = ("<=", ">=", "==", "!=", "<", ">")


# ---------------------------------------------------------------------------
# Tokenizer


_TOKEN_NUM = "num"
_TOKEN_IDENT = "ident"
_TOKEN_OP = "op"
_TOKEN_END = "end"


def _tokenize(src: str) -> list[tuple[str, str, int]]:
    tokens: list[tuple[str, str, int]] = []
    i = 0
    n = len(src)
    while i < n:
        c = src[i]
        if c.isspace():
            i += 1
            continue
        if c.isdigit() or (c == "." and i + 1 < n and src[i + 1].isdigit()):
            j = i
            while j < n and src[j].isdigit():
                j += 1
            if j < n and src[j] == ".":
                j += 1
                while j < n and src[j].isdigit():
                    j += 1
            if j < n and src[j] in "eE":
                k = j + 1
                if k < n and src[k] in "+-":
                    k += 1
                if k < n and src[k].isdigit():
                    j = k
                    while j < n and src[j].isdigit():
                        j += 1
            tokens.append((_TOKEN_NUM, src[i:j], i))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (src[j].isalnum() or src[j] == "_"):
                j += 1
            tokens.append((_TOKEN_IDENT, src[i:j], i))
            i = j
            continue
        two = src[i : i + 2]
        if two in ("<=", ">=", "==", "!="):
            tokens.append((_TOKEN_OP, two, i))
            i += 2
            continue
        if c in "+-*/^()<>,":
            tokens.append((_TOKEN_OP, c, i))
            i += 1
            continue
        raise ParseError("unexpected character", i, "an operator, number, or name", src)
    tokens.append((_TOKEN_END, "", n))
    return tokens


# ---------------------------------------------------------------------------
# Parser


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.tokens = _tokenize(src)
        self.pos = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.pos]

    def advance(self) -> tuple[str, str, int]:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, expected: str) -> ParseError:
        kind, text, off = self.peek()
        what = "end of input" if kind == _TOKEN_END else repr(text)
        return ParseError(f"unexpected {what}", min(off, len(self.src)), expected, self.src)

    def expect_op(self, op: str, expected: str) -> None:
        kind, text, _ = self.peek()
        if kind != _TOKEN_OP or text != op:
            raise self.fail(expected)
        self.advance()

    def parse(self) -> Node:
        node = self.cmp()
        if self.peek()[0] != _TOKEN_END:
            raise self.fail("end of expression")
        return node

    def cmp(self) -> Node:
        lhs = self.add()
        kind, text, _ = self.peek()
        if kind == _TOKEN_OP and text in _CMP_OPS:
            self.advance()
            rhs = self.add()
            return Cmp(text, lhs, rhs)
        return lhs

    def add(self) -> Node:
        node = self.mul()
        while True:
            kind, text, _ = self.peek()
            if kind == _TOKEN_OP and text in ("+", "-"):
                self.advance()
                node = Bin(text, node, self.mul())
            else:
                return node

    def mul(self) -> Node:
        node = self.unary()
        while True:
            kind, text, _ = self.peek()
            if kind == _TOKEN_OP and text in ("*", "/"):
                self.advance()
                node = Bin(text, node, self.unary())
            else:
                return node

    def unary(self) -> Node:
        kind, text, _ = self.peek()
        if kind == _TOKEN_OP and text == "-":
            self.advance()
            return Neg(self.unary())
        return self.pow()

    def pow(self) -> Node:
        base = self.atom()
        kind, text, _ = self.peek()
        if kind == _TOKEN_OP and text == "^":
            self.advance()
            return Bin("^", base, self.unary())
        return base

    def atom(self) -> Node:
        kind, text, off = self.peek()
        if kind == _TOKEN_NUM:
            self.advance()
            return Num(float(text))
        if kind == _TOKEN_IDENT:
            self.advance()
            if self.peek()[0] == _TOKEN_OP and self.peek()[1] == "(":
                self.advance()
                args = [self.cmp()]
                while self.peek()[0] == _TOKEN_OP and self.peek()[1] == ",":
                    self.advance()
                    args.append(self.cmp())
                self.expect_op(")", "')' or ','")
                return self._make_call(text, tuple(args), off)
            if text in _VARIABLES:
                return Var(text)
            raise ParseError(f"unknown name {text!r}", off, "'t', 'x', or a function call", self.src)
        if kind == _TOKEN_OP and text == "(":
            self.advance()
            node = self.cmp()
            self.expect_op(")", "')'")
            return node
        raise self.fail("a number, name, or '('")

    def _make_call(self, name: str, args: tuple[Node, ...], off: int) -> Node:
        if name == "if":
            if len(args) != 3:
                raise ParseError("if() takes exactly 3 arguments", off, "if(cond, then, else)", self.src)
            return If(args[0], args[1], args[2])
        spec = _FUNCTIONS.get(name)
        if spec is None:
            raise ParseError(f"unknown function {name!r}", off, "one of " + ", ".join(sorted(_FUNCTIONS)), self.src)
        if len(args) != spec[0]:
            raise ParseError(
                f"{name}() takes {spec[0]} argument(s), got {len(args)}", off, f"{spec[0]} argument(s)", self.src
            )
        return Call(name, args)


def _check_comparisons(node: Node, in_condition: bool, src: str) -> None:
    if isinstance(node, Cmp):
        if not in_condition:
            raise ParseError("comparison outside if() condition", 0, "comparisons only inside if(...)", src)
        _check_comparisons(node.lhs, False, src)
        _check_comparisons(node.rhs, False, src)
    elif isinstance(node, If):
        _check_comparisons(node.cond, True, src)
        _check_comparisons(node.then, False, src)
        _check_comparisons(node.otherwise, False, src)
    elif isinstance(node, Neg):
        _check_comparisons(node.operand, False, src)
    elif isinstance(node, Bin):
        _check_comparisons(node.lhs, False, src)
        _check_comparisons(node.rhs, False, src)
    elif isinstance(node, Call):
        for a in node.args:
            _check_comparisons(a, False, src)


def parse(src: str) -> Node:
    """Parse source into a syntax tree, raising ParseError with a position."""
    node = _Parser(src).parse()
    _check_comparisons(node, False, src)
    return node


# ---------------------------------------------------------------------------
# Evaluation


def free_vars(node: Node) -> set[str]:
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, Num):
        return set()
    if isinstance(node, Neg):
        return free_vars(node.operand)
    if isinstance(node, (Bin, Cmp)):
        return free_vars(node.lhs) | free_vars(node.rhs)
    if isinstance(node, Call):
        out: set[str] = set()
        for a in node.args:
            out |= free_vars(a)
        return out
    return free_vars(node.cond) | free_vars(node.then) | free_vars(node.otherwise)


def _apply_fn(name: str, args: tuple[float, ...]) -> float:
    if name == "log" and args[0] <= 0.0:
        raise EvalError(f"log of non-positive value {args[0]}")
    if name == "sqrt" and args[0] < 0.0:
        raise EvalError(f"sqrt of negative value {args[0]}")
    try:
        return float(_FUNCTIONS[name][1](*args))
    except (ValueError, OverflowError) as exc:
        raise EvalError(f"{name}: {exc}") from exc


def _pow(base: float, exp: float) -> float:
    try:
        out = base**exp
    except (OverflowError, ZeroDivisionError) as exc:
        raise EvalError(f"power error: {base} ^ {exp}") from exc
    if isinstance(out, complex):
        raise EvalError(f"power of negative base with fractional exponent: {base} ^ {exp}")
    return out


def evaluate(node: Node, bindings: Mapping[str, float]) -> float:
    """Evaluate with IEEE double arithmetic; deterministic for fixed inputs."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        try:
            return bindings[node.name]
        except KeyError:
            raise EvalError(f"unbound variable {node.name!r}") from None
    if isinstance(node, Neg):
        return -evaluate(node.operand, bindings)
    if isinstance(node, Bin):
        a = evaluate(node.lhs, bindings)
        b = evaluate(node.rhs, bindings)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            if b == 0.0:
                raise EvalError("division by zero")
            return a / b
        return _pow(a, b)
    if isinstance(node, Cmp):
        a = evaluate(node.lhs, bindings)
        b = evaluate(node.rhs, bindings)
        ok = {
            "<": a < b,
            "<=": a <= b,
            ">": a > b,
            ">=": a >= b,
            "==": a == b,
            "!=": a != b,
        }[node.op]
        return 1.0 if ok else 0.0
    if isinstance(node, Call):
        return _apply_fn(node.name, tuple(evaluate(a, bindings) for a in node.args))
    if evaluate(node.cond, bindings) != 0.0:
        return evaluate(node.then, bindings)
    return evaluate(node.otherwise, bindings)


def compile_fn(node: Node, params: tuple[str, ...]) -> Callable[..., float]:
    """Compile the tree into a positional-argument callable.

    Applies the same operations in the same order as evaluate(), so both
    paths produce identical doubles.
    """
    missing = free_vars(node) - set(params)
    if missing:
        raise EvalError(f"unbound variable(s): {', '.join(sorted(missing))}")
    index = {name: i for i, name in enumerate(params)}

    def build(n: Node) -> Callable[[tuple[float, ...]], float]:
        if isinstance(n, Num):
            v = n.value
            return lambda a: v
        if isinstance(n, Var):
            i = index[n.name]
            return lambda a: a[i]
        if isinstance(n, Neg):
            g = build(n.operand)
            return lambda a: -g(a)
        if isinstance(n, Bin):
            lf, rf = build(n.lhs), build(n.rhs)
            op = n.op
            if op == "+":
                return lambda a: lf(a) + rf(a)
            if op == "-":
                return lambda a: lf(a) - rf(a)
            if op == "*":
                return lambda a: lf(a) * rf(a)
            if op == "/":

                def div(a: tuple[float, ...]) -> float:
                    d = rf(a)
                    if d == 0.0:
                        raise EvalError("division by zero")
                    return lf(a) / d

                return div
            return lambda a: _pow(lf(a), rf(a))
        if isinstance(n, Cmp):
            lf, rf = build(n.lhs), build(n.rhs)
            table: dict[str, Callable[[float, float], bool]] = {
                "<": lambda p, q: p < q,
                "<=": lambda p, q: p <= q,
                ">": lambda p, q: p > q,
                ">=": lambda p, q: p >= q,
                "==": lambda p, q: p == q,
                "!=": lambda p, q: p != q,
            }
            cmp = table[n.op]
            return lambda a: 1.0 if cmp(lf(a), rf(a)) else 0.0
        if isinstance(n, Call):
            fns = tuple(build(arg) for arg in n.args)
            name = n.name
            return lambda a: _apply_fn(name, tuple(g(a) for g in fns))
        cf, tf, of = build(n.cond), build(n.then), build(n.otherwise)
        return lambda a: tf(a) if cf(a) != 0.0 else of(a)

    g = build(node)
    return lambda *args: g(args)


# ---------------------------------------------------------------------------
# Canonical printer


_PREC = {"cmp": 0, "+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4, "atom": 5}


def render(node: Node) -> str:
    """Canonical text; parse(render(parse(s))) is a fixed point."""

    def wrap(child: Node, min_prec: int) -> str:
        return f"({render(child)})" if _prec(child) < min_prec else render(child)

    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return "-" + wrap(node.operand, _PREC["neg"])
    if isinstance(node, Bin):
        p = _PREC[node.op]
        if node.op == "^":
            # right-associative: parenthesize a left child of equal precedence
            return f"{wrap(node.lhs, _PREC['atom'])}^{wrap(node.rhs, _PREC['neg'])}"
        return f"{wrap(node.lhs, p)} {node.op} {wrap(node.rhs, p + 1)}"
    if isinstance(node, Cmp):
        return f"{wrap(node.lhs, 1)} {node.op} {wrap(node.rhs, 1)}"
    if isinstance(node, Call):
        return f"{node.name}({', '.join(render(a) for a in node.args)})"
    return f"if({render(node.cond)}, {render(node.then)}, {render(node.otherwise)})"


def _prec(node: Node) -> int:
    if isinstance(node, (Num, Var, Call, If)):
        return _PREC["atom"]
    if isinstance(node, Neg):
        return _PREC["neg"]
    if isinstance(node, Cmp):
        return _PREC["cmp"]
    return _PREC[node.op]
