"""Scalar coordinate expressions: parsing, printing, evaluation and jets.

Grammar (whitespace-insensitive)::

    sum     := signed (('+' | '-') signed)*
    signed  := ('-' | '+') signed | product
    product := factor (('*' | '/') factor)*
    factor  := '-' factor | power
    power   := atom ['^' exponent]          # right-associative
    exponent:= '-' exponent | power
    atom    := NUMBER | 'x' INDEX | FUNC '(' sum ')' | '(' sum ')'

Variables are ``x1`` .. ``x<dim>``. Derivatives up to order two are obtained
by compiling the tree to a register tape (see :func:`compile_tape`) that is
run by the jet kernels in :mod:`parageo._kernels`.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

__all__ = [
    "ExprError", "ExprSyntaxError", "UnknownIdentifierError", "VariableIndexError",
    "DomainError", "Num", "Var", "Unary", "Binary", "ScalarExpr", "Jet2",
    "parse", "to_string", "evaluate", "eval_jet2", "compile_tape", "Tape",
    "FUNCTIONS",
]

FUNCTIONS = ("sin", "cos", "tan", "exp", "log", "sqrt", "sinh", "cosh", "tanh")


class ExprError(ValueError):
    """Base class for expression errors; ``offset`` is a byte offset or None."""

    def __init__(self, message: str, offset: int | None = None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (at offset {offset})"
        super().__init__(message)


class ExprSyntaxError(ExprError):
    pass


class UnknownIdentifierError(ExprError):
    pass


class VariableIndexError(ExprError):
    pass


class DomainError(ExprError, ArithmeticError):
    pass


# --------------------------------------------------------------------------- AST

@dataclass(frozen=True)
class Num:
    value: float
    pos: int = field(default=-1, compare=False)


@dataclass(frozen=True)
class Var:
    index: int  # 1-based
    pos: int = field(default=-1, compare=False)


@dataclass(frozen=True)
class Unary:
    op: str  # 'neg' or one of FUNCTIONS
    arg: "Node"
    pos: int = field(default=-1, compare=False)


@dataclass(frozen=True)
class Binary:
    op: str  # one of + - * / ^
    left: "Node"
    right: "Node"
    pos: int = field(default=-1, compare=False)


Node = Union[Num, Var, Unary, Binary]


@dataclass(frozen=True)
class ScalarExpr:
    root: Node
    dim: int
    text: str = field(default="", compare=False)

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")

    def __str__(self):
        return to_string(self)

    def __call__(self, point):
        return evaluate(self, point)


@dataclass(frozen=True)
class Jet2:
    """Value, gradient and Hessian of a scalar at a point."""

    value: float
    grad: np.ndarray
    hess: np.ndarray


# ----------------------------------------------------------------------- parsing

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^()])"
    r")"
)
_VAR = re.compile(r"x(\d+)\Z")


def _tokenize(text: str):
    tokens = []
    pos = 0
    end = len(text)
    while pos < end:
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            # skip trailing whitespace
            if text[pos:].strip() == "":
                break
            bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ExprSyntaxError(f"unexpected character {text[bad]!r}", _byte(text, bad))
        kind = m.lastgroup
        if kind is None:
            break
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


def _byte(text: str, char_pos: int) -> int:
    return len(text[:char_pos].encode("utf-8"))


class _Parser:
    def __init__(self, text: str, dim: int):
        self.text = text
        self.dim = dim
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message, tok):
        raise ExprSyntaxError(message, _byte(self.text, tok[2]))

    def expect(self, value):
        tok = self.take()
        if tok[1] != value or tok[0] not in ("op",):
            what = "end of input" if tok[0] == "end" else repr(tok[1])
            self.error(f"expected {value!r}, found {what}", tok)
        return tok

    def parse(self) -> Node:
        node = self.sum()
        tok = self.peek()
        if tok[0] != "end":
            self.error(f"unexpected {tok[1]!r}", tok)
        return node

    def sum(self):
        node = self.signed()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            tok = self.take()
            node = Binary(tok[1], node, self.signed(), tok[2])
        return node

    def signed(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] in "+-":
            self.take()
            arg = self.signed()
            return Unary("neg", arg, tok[2]) if tok[1] == "-" else arg
        return self.product()

    def product(self):
        node = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            tok = self.take()
            node = Binary(tok[1], node, self.factor(), tok[2])
        return node

    def factor(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "-":
            self.take()
            return Unary("neg", self.factor(), tok[2])
        return self.power()

    def power(self):
        base = self.atom()
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "^":
            self.take()
            return Binary("^", base, self.exponent(), tok[2])
        return base

    def exponent(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "-":
            self.take()
            return Unary("neg", self.exponent(), tok[2])
        return self.power()

    def atom(self):
        tok = self.take()
        kind, value, pos = tok
        if kind == "num":
            x = float(value)
            if not math.isfinite(x):
                self.error(f"numeric literal {value!r} overflows", tok)
            return Num(x, pos)
        if kind == "name":
            if value in FUNCTIONS:
                self.expect("(")
                arg = self.sum()
                self.expect(")")
                return Unary(value, arg, pos)
            m = _VAR.match(value)
            if m is None:
                raise UnknownIdentifierError(f"unknown identifier {value!r}", _byte(self.text, pos))
            index = int(m.group(1))
            if not 1 <= index <= self.dim:
                raise VariableIndexError(
                    f"variable {value!r} out of range for dimension {self.dim}",
                    _byte(self.text, pos),
                )
            return Var(index, pos)
        if kind == "op" and value == "(":
            node = self.sum()
            self.expect(")")
            return node
        what = "end of input" if kind == "end" else repr(value)
        self.error(f"unexpected {what}", tok)


def parse(text: str, dim: int) -> ScalarExpr:
    """Parse ``text`` into an expression over coordinates ``x1..x<dim>``."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if not isinstance(text, str):
        raise TypeError("expression must be a string")
    return ScalarExpr(_Parser(text, dim).parse(), dim, text)


def to_string(expr: ScalarExpr | Node) -> str:
    """Canonical, fully parenthesised text form; ``parse`` inverts it exactly."""
    node = expr.root if isinstance(expr, ScalarExpr) else expr
    if isinstance(node, Num):
        return repr(float(node.value))
    if isinstance(node, Var):
        return f"x{node.index}"
    if isinstance(node, Unary):
        if node.op == "neg":
            return f"(-{to_string(node.arg)})"
        return f"{node.op}({to_string(node.arg)})"
    return f"({to_string(node.left)}{node.op}{to_string(node.right)})"


# --------------------------------------------------------------- plain evaluation

def _const_value(node: Node):
    """Value of a variable-free subtree, or None."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return None
    if isinstance(node, Unary):
        a = _const_value(node.arg)
        return None if a is None else _eval_node(node, ())
    a, b = _const_value(node.left), _const_value(node.right)
    if a is None or b is None:
        return None
    return _eval_node(node, ())


def _int_exponent(node: Node):
    c = _const_value(node)
    if c is not None and float(c).is_integer() and abs(c) < 2**31:
        return int(c)
    return None


def _eval_node(node: Node, x) -> float:
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return float(x[node.index - 1])
    if isinstance(node, Unary):
        a = _eval_node(node.arg, x)
        op = node.op
        if op == "neg":
            return -a
        if op == "log":
            if a <= 0.0:
                raise DomainError(f"log of nonpositive value {a!r}", node.pos)
            return math.log(a)
        if op == "sqrt":
            if a < 0.0:
                raise DomainError(f"sqrt of negative value {a!r}", node.pos)
            return math.sqrt(a)
        try:
            return getattr(math, op)(a)
        except OverflowError:
            raise DomainError(f"{op} overflows at {a!r}", node.pos) from None
    a = _eval_node(node.left, x)
    b = _eval_node(node.right, x)
    op = node.op
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        if b == 0.0:
            raise DomainError("division by zero", node.pos)
        return a / b
    k = _int_exponent(node.right)
    if k is not None:
        if a == 0.0 and k < 0:
            raise DomainError("division by zero in negative power", node.pos)
        try:
            return a ** k
        except OverflowError:
            raise DomainError("power overflows", node.pos) from None
    if a < 0.0:
        raise DomainError("real power of a negative base", node.pos)
    if a == 0.0:
        if b <= 0.0:
            raise DomainError("nonpositive power of zero", node.pos)
        return 0.0
    try:
        return math.exp(b * math.log(a))
    except OverflowError:
        raise DomainError("power overflows", node.pos) from None


def evaluate(expr: ScalarExpr, point: Sequence[float]) -> float:
    """Evaluate ``expr`` at ``point`` (length ``expr.dim``)."""
    x = np.asarray(point, dtype=float).ravel()
    if x.shape[0] != expr.dim:
        raise ValueError(f"point has length {x.shape[0]}, expected {expr.dim}")
    value = _eval_node(expr.root, x)
    if not math.isfinite(value):
        raise DomainError("non-finite result", None)
    return value


# --------------------------------------------------------------------- the tape

# opcodes shared with the kernels
OP_CONST, OP_VAR, OP_NEG, OP_ADD, OP_SUB, OP_MUL, OP_DIV = range(7)
OP_POWI, OP_POWC, OP_POW = 7, 8, 9
OP_FUNC = {name: 10 + i for i, name in enumerate(FUNCTIONS)}
_BINOPS = {"+": OP_ADD, "-": OP_SUB, "*": OP_MUL, "/": OP_DIV}


@dataclass(frozen=True)
class Tape:
    """Register program: instruction ``i`` writes register ``i``.

    ``a`` and ``b`` hold operand registers, ``c`` holds literals, variable
    indices (0-based) and constant exponents.  ``outputs`` maps each compiled
    expression to its result register; ``pos`` keeps source offsets for error
    messages.
    """

    ops: np.ndarray
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    outputs: np.ndarray
    pos: tuple
    dim: int


def compile_tape(exprs: Sequence[ScalarExpr]) -> Tape:
    """Compile expressions into one tape; identical expressions share registers."""
    if not exprs:
        raise ValueError("nothing to compile")
    dim = exprs[0].dim
    ops, a, b, c, pos = [], [], [], [], []
    memo = {}

    def emit(op, ra=0, rb=0, cv=0.0, p=-1):
        key = (op, ra, rb, cv)
        if key in memo:
            return memo[key]
        ops.append(op)
        a.append(ra)
        b.append(rb)
        c.append(cv)
        pos.append(p)
        memo[key] = len(ops) - 1
        return memo[key]

    def walk(node):
        if isinstance(node, Num):
            return emit(OP_CONST, cv=float(node.value), p=node.pos)
        if isinstance(node, Var):
            return emit(OP_VAR, cv=float(node.index - 1), p=node.pos)
        if isinstance(node, Unary):
            r = walk(node.arg)
            op = OP_NEG if node.op == "neg" else OP_FUNC[node.op]
            return emit(op, r, p=node.pos)
        if node.op == "^":
            base = walk(node.left)
            k = _int_exponent(node.right)
            if k is not None:
                return emit(OP_POWI, base, cv=float(k), p=node.pos)
            cst = _const_value(node.right)
            if cst is not None:
                return emit(OP_POWC, base, cv=float(cst), p=node.pos)
            return emit(OP_POW, base, walk(node.right), p=node.pos)
        return emit(_BINOPS[node.op], walk(node.left), walk(node.right), p=node.pos)

    outputs = []
    for e in exprs:
        if e.dim != dim:
            raise ValueError("all expressions must share one dimension")
        outputs.append(walk(e.root))
    return Tape(
        ops=np.asarray(ops, dtype=np.int64),
        a=np.asarray(a, dtype=np.int64),
        b=np.asarray(b, dtype=np.int64),
        c=np.asarray(c, dtype=np.float64),
        outputs=np.asarray(outputs, dtype=np.int64),
        pos=tuple(pos),
        dim=dim,
    )


_STATUS_MESSAGES = {
    1: "division by zero",
    2: "log of nonpositive value",
    3: "sqrt of nonpositive value (derivative undefined)",
    4: "real power of a nonpositive base",
    5: "non-finite result",
}


def raise_tape_status(tape: Tape, status: int, where: int):
    if status == 0:
        return
    offset = tape.pos[where] if 0 <= where < len(tape.pos) else None
    if offset is not None and offset < 0:
        offset = None
    raise DomainError(_STATUS_MESSAGES.get(status, "domain error"), offset)


def run_tape(tape: Tape, point) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Jets (values, gradients, Hessians) of every tape output at ``point``."""
    from . import _kernels

    x = np.ascontiguousarray(point, dtype=np.float64).ravel()
    if x.shape[0] != tape.dim:
        raise ValueError(f"point has length {x.shape[0]}, expected {tape.dim}")
    val, grad, hess, status, where = _kernels.eval_tape(tape.ops, tape.a, tape.b, tape.c, x)
    raise_tape_status(tape, int(status), int(where))
    out = tape.outputs
    return val[out], grad[out], hess[out]


def eval_jet2(expr: ScalarExpr, point: Sequence[float]) -> Jet2:
    """Exact value, gradient and Hessian of ``expr`` at ``point``."""
    val, grad, hess = run_tape(_tape_for(expr), point)
    return Jet2(float(val[0]), grad[0].copy(), hess[0].copy())


_TAPE_CACHE: dict = {}


def _tape_for(expr: ScalarExpr) -> Tape:
    tape = _TAPE_CACHE.get(expr)
    if tape is None:
        if len(_TAPE_CACHE) > 512:
            _TAPE_CACHE.clear()
        tape = _TAPE_CACHE[expr] = compile_tape([expr])
    return tape


# ----------------------------------------------------------------- composition

def _as_node(e) -> Node:
    if isinstance(e, ScalarExpr):
        return e.root
    if isinstance(e, (int, float)):
        return Num(float(e))
    return e


def combine(op: str, left, right, dim: int) -> ScalarExpr:
    """Build ``left <op> right`` from expressions, nodes or numbers."""
    return ScalarExpr(Binary(op, _as_node(left), _as_node(right)), dim)


def apply(func: str, arg, dim: int) -> ScalarExpr:
    if func not in FUNCTIONS and func != "neg":
        raise ValueError(f"unknown function {func!r}")
    return ScalarExpr(Unary(func, _as_node(arg)), dim)


def constant(value: float, dim: int) -> ScalarExpr:
    return ScalarExpr(Num(float(value)), dim)
