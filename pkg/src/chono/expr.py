"""Tiny closed-form expression language for initial conditions.

Grammar (recursive descent, no implicit multiplication):

    expr   := term (("+" | "-") term)*
    term   := factor (("*" | "/") factor)*
    factor := "-" factor | power
    power  := atom ("^" factor)?          # right-associative
    atom   := NUMBER | "x" | "y" | "pi" | NAME "(" expr ")" | "(" expr ")"

Supported functions: sin, cos, exp, abs, tanh. Initial data like
cos(10*(x-y))*x*y is spelled with explicit "*"; juxtaposition ("10xy")
is a parse error.

AST nodes are plain tuples: ("num", v), ("var", name), ("neg", e),
("add"|"sub"|"mul"|"div"|"pow", lhs, rhs), ("call", fname, e).
"""

import math

FUNCTIONS = {
    "sin": math.sin,
    "cos": math.cos,
    "exp": math.exp,
    "abs": abs,
    "tanh": math.tanh,
}

VARIABLES = ("x", "y")


class ParseError(ValueError):
    """Malformed expression text; carries the byte offset of the fault."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class EvalError(ArithmeticError):
    """Evaluation produced a non-finite value (division by zero, overflow, ...)."""


def _tokenize(text):
    """Yield (kind, value, offset) triples; kind in {num, name, op}."""
    tokens = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c.isdigit() or (c == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            while j < n and (text[j].isdigit() or text[j] == "."):
                j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    j = k
                    while j < n and text[j].isdigit():
                        j += 1
            lit = text[i:j]
            try:
                value = float(lit)
            except ValueError:
                raise ParseError(f"bad number literal {lit!r}", i) from None
            tokens.append(("num", value, i))
            i = j
        elif c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("name", text[i:j], i))
            i = j
        elif c in "+-*/^()":
            tokens.append(("op", c, i))
            i += 1
        else:
            raise ParseError(f"unexpected character {c!r}", i)
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op):
        kind, value, offset = self.peek()
        if kind != "op" or value != op:
            raise ParseError(f"expected {op!r}", offset)
        self.advance()

    def parse_expr(self):
        node = self.parse_term()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "+-":
                self.advance()
                rhs = self.parse_term()
                node = ("add" if value == "+" else "sub", node, rhs)
            else:
                return node

    def parse_term(self):
        node = self.parse_factor()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "*/":
                self.advance()
                rhs = self.parse_factor()
                node = ("mul" if value == "*" else "div", node, rhs)
            else:
                return node

    def parse_factor(self):
        kind, value, _ = self.peek()
        if kind == "op" and value == "-":
            self.advance()
            return ("neg", self.parse_factor())
        return self.parse_power()

    def parse_power(self):
        base = self.parse_atom()
        kind, value, _ = self.peek()
        if kind == "op" and value == "^":
            self.advance()
            # exponent re-enters at factor level: 2^-3 works, 2^3^2 == 2^(3^2)
            return ("pow", base, self.parse_factor())
        return base

    def parse_atom(self):
        kind, value, offset = self.advance()
        if kind == "num":
            return ("num", value)
        if kind == "name":
            if value in VARIABLES:
                return ("var", value)
            if value == "pi":
                return ("num", math.pi)
            if value in FUNCTIONS:
                self.expect_op("(")
                arg = self.parse_expr()
                self.expect_op(")")
                return ("call", value, arg)
            raise ParseError(f"unknown name {value!r}", offset)
        if kind == "op" and value == "(":
            node = self.parse_expr()
            self.expect_op(")")
            return node
        raise ParseError(f"expected a value, got {value!r}" if value else "unexpected end of input", offset)


def parse(text):
    """Parse expression text into an AST; raises ParseError on malformed input."""
    parser = _Parser(text)
    node = parser.parse_expr()
    kind, value, offset = parser.peek()
    if kind != "end":
        raise ParseError(f"trailing input {value!r}", offset)
    return node


def evaluate(node, x, y):
    """Evaluate an AST at the point (x, y); raises EvalError on non-finite results."""
    try:
        value = _eval(node, x, y)
    except (ZeroDivisionError, OverflowError, ValueError) as exc:
        raise EvalError(str(exc)) from exc
    if not math.isfinite(value):
        raise EvalError(f"non-finite result {value!r}")
    return value


def _eval(node, x, y):
    tag = node[0]
    if tag == "num":
        return node[1]
    if tag == "var":
        return x if node[1] == "x" else y
    if tag == "neg":
        return -_eval(node[1], x, y)
    if tag == "call":
        return FUNCTIONS[node[1]](_eval(node[2], x, y))
    lhs = _eval(node[1], x, y)
    rhs = _eval(node[2], x, y)
    if tag == "add":
        return lhs + rhs
    if tag == "sub":
        return lhs - rhs
    if tag == "mul":
        return lhs * rhs
    if tag == "div":
        return lhs / rhs
    if tag == "pow":
        return math.pow(lhs, rhs)
    raise ValueError(f"corrupt AST node {node!r}")


_OPS = {"add": "+", "sub": "-", "mul": "*", "div": "/", "pow": "^"}


def to_text(node):
    """Render an AST back to parseable text (fully parenthesized)."""
    tag = node[0]
    if tag == "num":
        return f"{node[1]:.17g}"
    if tag == "var":
        return node[1]
    if tag == "neg":
        return f"(-{to_text(node[1])})"
    if tag == "call":
        return f"{node[1]}({to_text(node[2])})"
    return f"({to_text(node[1])} {_OPS[tag]} {to_text(node[2])})"
