"""Complex expression language for functions of ``z`` and curves in ``t``.

Grammar (``^`` binds tighter than unary minus and is right-associative)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := ('-' | '+') unary | power
    power   := primary ('^' unary)?
    primary := NUMBER | CONST | VAR | FUNC '(' expr ')' | '(' expr ')'

Constants are ``pi``, ``e`` and ``i``; functions are sin cos tan sinh cosh
tanh exp log sqrt sinc, plus ``sinc1``, ``sinc2``, ... for the derivatives
of sinc (these show up in symbolic derivatives and print/parse like any
other call).  There is no implicit multiplication.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ExpressionSyntaxError, NonHolomorphic, UnknownFunction


@dataclass(frozen=True)
class Const:
    value: complex
    name: str = ""


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str
    operand: "Node"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    name: str
    arg: "Node"


Node = Union[Const, Var, Unary, Binary, Call]

CONSTANTS = {"pi": math.pi, "e": math.e, "i": 1j}
VARIABLES = ("z", "t")
_BASE_FUNCS = ("sin", "cos", "tan", "sinh", "cosh", "tanh", "exp", "log", "sqrt", "sinc")
_NON_HOLOMORPHIC = {"conj", "conjugate", "bar", "re", "im", "real", "imag", "abs", "arg"}
_SINC_DERIV = re.compile(r"sinc([1-9][0-9]?)$")

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()])"
    r")"
)


def _is_function(name):
    return name in _BASE_FUNCS or _SINC_DERIV.match(name) is not None


# -- parsing -----------------------------------------------------------------

def _tokenize(src):
    tokens = []
    pos = 0
    n = len(src)
    while pos < n:
        if src[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(src, pos)
        if m is None or m.end() == pos:
            raise ExpressionSyntaxError(f"unexpected character {src[pos]!r}", pos)
        start = m.start(m.lastgroup)
        tokens.append((m.lastgroup, m.group(m.lastgroup), start))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, src, variable):
        self.src = src
        self.tokens = _tokenize(src)
        self.i = 0
        self.variable = variable
        self.seen_vars = set()

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, pos = self.take()
        if val != value or kind == "end":
            found = "end of input" if kind == "end" else repr(val)
            raise ExpressionSyntaxError(f"expected {value!r}, found {found}", pos)

    def parse(self):
        node = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ExpressionSyntaxError(f"unexpected {val!r}", pos)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = Binary(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = Binary(op, node, self.unary())
        return node

    def unary(self):
        kind, val, _ = self.peek()
        if kind == "op" and val in ("-", "+"):
            self.take()
            operand = self.unary()
            return Unary("-", operand) if val == "-" else operand
        return self.power()

    def power(self):
        base = self.primary()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            return Binary("^", base, self.unary())
        return base

    def primary(self):
        kind, val, pos = self.take()
        if kind == "num":
            return Const(float(val))
        if kind == "name":
            if val in _NON_HOLOMORPHIC:
                raise NonHolomorphic(
                    f"'{val}' is not holomorphic; only analytic functions of the variable are supported", pos)
            if self.peek()[1] == "(" and self.peek()[0] == "op":
                if not _is_function(val):
                    raise UnknownFunction(val, pos)
                self.take()
                arg = self.expr()
                self.expect(")")
                return Call(val, arg)
            if _is_function(val):
                raise ExpressionSyntaxError(f"expected '(' after function '{val}'", self.peek()[2])
            if val in CONSTANTS:
                return Const(CONSTANTS[val], val)
            if val in VARIABLES and (self.variable is None or val == self.variable):
                self.seen_vars.add(val)
                if len(self.seen_vars) > 1:
                    raise ExpressionSyntaxError("expression mixes variables z and t", pos)
                return Var(val)
            raise ExpressionSyntaxError(f"unknown identifier '{val}'", pos)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if kind == "end" else repr(val)
        raise ExpressionSyntaxError(f"unexpected {found}", pos)


# -- printing ----------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}


def _fmt_number(v):
    v = float(v)
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def to_source(node):
    if isinstance(node, Expr):
        node = node.node
    if isinstance(node, Const):
        if node.name:
            return node.name
        v = complex(node.value)
        if v.imag == 0 and v.real >= 0:
            return _fmt_number(v.real)
        if v.imag == 0:
            return f"(-{_fmt_number(-v.real)})"
        return f"({_fmt_number(v.real)}+{_fmt_number(v.imag)}*i)"
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Call):
        return f"{node.name}({to_source(node.arg)})"
    if isinstance(node, Unary):
        inner = to_source(node.operand)
        if isinstance(node.operand, Binary) and node.operand.op != "^":
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(node, Binary):
        op = node.op
        left = to_source(node.left)
        right = to_source(node.right)
        if op == "^":
            if isinstance(node.left, (Binary, Unary)):
                left = f"({left})"
            if isinstance(node.right, Binary) and node.right.op != "^":
                right = f"({right})"
        else:
            p = _PREC[op]
            if isinstance(node.left, Binary) and _PREC[node.left.op] < p:
                left = f"({left})"
            if isinstance(node.right, Binary) and _PREC[node.right.op] <= p:
                right = f"({right})"
        return f"{left}{op}{right}"
    raise TypeError(f"not an expression node: {node!r}")


# -- evaluation --------------------------------------------------------------

def _ipow(x, n):
    if n < 0:
        return 1.0 / _ipow(x, -n)
    result = np.ones_like(x)
    base = x
    while n:
        if n & 1:
            result = result * base
        base = base * base
        n >>= 1
    return result


def _sin_deriv(w, n):
    n %= 4
    if n == 0:
        return np.sin(w)
    if n == 1:
        return np.cos(w)
    if n == 2:
        return -np.sin(w)
    return -np.cos(w)


def sinc_derivative(w, k=0):
    """k-th derivative of sin(w)/w, continuous through w = 0."""
    w = np.asarray(w, dtype=np.complex128)
    out = np.empty(w.shape, dtype=np.complex128)
    small = np.abs(w) < 1.0
    if np.any(small):
        ws = w[small]
        acc = np.zeros(ws.shape, dtype=np.complex128)
        for m in range(k // 2 + (k % 2), k // 2 + 24):
            p = 2 * m - k
            if p < 0:
                continue
            coef = (-1) ** m * math.factorial(2 * m) / (math.factorial(p) * math.factorial(2 * m + 1))
            acc = acc + coef * ws ** p
        out[small] = acc
    big = ~small
    if np.any(big):
        wb = w[big]
        acc = np.zeros(wb.shape, dtype=np.complex128)
        for j in range(k + 1):
            acc = acc + math.comb(k, j) * _sin_deriv(wb, k - j) * ((-1) ** j * math.factorial(j)) / wb ** (j + 1)
        out[big] = acc
    return out


def _call(name, x):
    if name == "sinc":
        return sinc_derivative(x, 0)
    m = _SINC_DERIV.match(name)
    if m:
        return sinc_derivative(x, int(m.group(1)))
    return {
        "sin": np.sin, "cos": np.cos, "tan": np.tan,
        "sinh": np.sinh, "cosh": np.cosh, "tanh": np.tanh,
        "exp": np.exp, "log": np.log, "sqrt": np.sqrt,
    }[name](x)


def _const_value(node):
    if isinstance(node, Const):
        return complex(node.value)
    if isinstance(node, Unary) and isinstance(node.operand, Const):
        return -complex(node.operand.value)
    return None


def _eval(node, x):
    if isinstance(node, Const):
        return np.full(x.shape, node.value, dtype=np.complex128)
    if isinstance(node, Var):
        return x
    if isinstance(node, Unary):
        # 0 - x rather than -x keeps +0j imaginary parts on the principal branch
        return 0.0 - _eval(node.operand, x)
    if isinstance(node, Call):
        return _call(node.name, _eval(node.arg, x))
    a = _eval(node.left, x)
    if node.op == "^":
        c = _const_value(node.right)
        if c is not None and c.imag == 0 and c.real.is_integer() and abs(c.real) <= 64:
            return _ipow(a, int(c.real))
        return np.power(a, _eval(node.right, x))
    b = _eval(node.right, x)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    return a / b


# -- differentiation ---------------------------------------------------------

ZERO = Const(0.0)
ONE = Const(1.0)


def _num(v):
    v = float(v)
    return Const(v) if v >= 0 else Unary("-", Const(-v))


def _real_const(node):
    c = _const_value(node)
    if c is not None and c.imag == 0 and not (isinstance(node, Const) and node.name):
        return c.real
    return None


def _add(a, b):
    ca, cb = _real_const(a), _real_const(b)
    if ca == 0:
        return b
    if cb == 0:
        return a
    if ca is not None and cb is not None:
        return _num(ca + cb)
    if isinstance(b, Unary):
        return Binary("-", a, b.operand)
    return Binary("+", a, b)


def _sub(a, b):
    ca, cb = _real_const(a), _real_const(b)
    if cb == 0:
        return a
    if ca == 0:
        return _neg(b)
    if ca is not None and cb is not None:
        return _num(ca - cb)
    if isinstance(b, Unary):
        return Binary("+", a, b.operand)
    return Binary("-", a, b)


def _neg(a):
    c = _real_const(a)
    if c is not None:
        return _num(-c)
    if isinstance(a, Unary):
        return a.operand
    return Unary("-", a)


def _mul(a, b):
    ca, cb = _real_const(a), _real_const(b)
    if ca == 0 or cb == 0:
        return ZERO
    if ca == 1:
        return b
    if cb == 1:
        return a
    if ca == -1:
        return _neg(b)
    if cb == -1:
        return _neg(a)
    if ca is not None and cb is not None:
        return _num(ca * cb)
    if isinstance(a, Unary):
        return _neg(_mul(a.operand, b))
    if isinstance(b, Unary):
        return _neg(_mul(a, b.operand))
    if cb is not None:
        a, b, ca = b, a, cb
    if ca is not None and isinstance(b, Binary) and b.op == "*":
        inner = _real_const(b.left)
        if inner is not None:
            return _mul(_num(ca * inner), b.right)
    return Binary("*", a, b)


def _div(a, b):
    ca, cb = _real_const(a), _real_const(b)
    if ca == 0:
        return ZERO
    if cb == 1:
        return a
    if ca is not None and cb is not None and cb != 0:
        return _num(ca / cb)
    return Binary("/", a, b)


def _pow(a, b):
    cb = _real_const(b)
    if cb == 1:
        return a
    if cb == 0:
        return ONE
    return Binary("^", a, b)


def _d(node, var):
    if isinstance(node, Const):
        return ZERO
    if isinstance(node, Var):
        return ONE if node.name == var else ZERO
    if isinstance(node, Unary):
        return _neg(_d(node.operand, var))
    if isinstance(node, Binary):
        a, b = node.left, node.right
        da, db = _d(a, var), _d(b, var)
        if node.op == "+":
            return _add(da, db)
        if node.op == "-":
            return _sub(da, db)
        if node.op == "*":
            return _add(_mul(da, b), _mul(a, db))
        if node.op == "/":
            return _div(_sub(_mul(da, b), _mul(a, db)), _pow(b, Const(2.0)))
        cb = _const_value(b)
        if cb is not None:
            cr = _real_const(b)
            expo = _num(cr - 1) if cr is not None else Binary("-", b, ONE)
            return _mul(_mul(b, _pow(a, expo)), da)
        # general a^b = exp(b log a)
        return _mul(node, _add(_mul(db, Call("log", a)), _div(_mul(b, da), a)))
    if isinstance(node, Call):
        u = node.arg
        du = _d(u, var)
        name = node.name
        if name == "sin":
            outer = Call("cos", u)
        elif name == "cos":
            outer = _neg(Call("sin", u))
        elif name == "tan":
            outer = _add(ONE, _pow(Call("tan", u), Const(2.0)))
        elif name == "sinh":
            outer = Call("cosh", u)
        elif name == "cosh":
            outer = Call("sinh", u)
        elif name == "tanh":
            outer = _sub(ONE, _pow(Call("tanh", u), Const(2.0)))
        elif name == "exp":
            outer = node
        elif name == "log":
            outer = _div(ONE, u)
        elif name == "sqrt":
            outer = _div(Const(0.5), node)
        elif name == "sinc":
            outer = Call("sinc1", u)
        else:
            k = int(_SINC_DERIV.match(name).group(1))
            outer = Call(f"sinc{k + 1}", u)
        return _mul(outer, du)
    raise TypeError(f"not an expression node: {node!r}")


class Expr:
    """A parsed expression in one free variable, callable on scalars or arrays."""

    def __init__(self, node, variable="z"):
        self.node = node
        self.variable = variable

    def __call__(self, x):
        arr = np.asarray(x, dtype=np.complex128)
        with np.errstate(all="ignore"):
            out = _eval(self.node, arr.reshape(-1) if arr.ndim == 0 else arr)
        if np.ndim(x) == 0:
            return complex(np.asarray(out).reshape(-1)[0])
        return out

    def derivative(self):
        return Expr(_d(self.node, self.variable), self.variable)

    def __str__(self):
        return to_source(self.node)

    def __repr__(self):
        return f"Expr({to_source(self.node)!r}, variable={self.variable!r})"

    def __eq__(self, other):
        return isinstance(other, Expr) and self.node == other.node and self.variable == other.variable

    def __hash__(self):
        return hash((self.node, self.variable))


def parse(source, variable=None):
    """Parse ``source`` into an :class:`Expr`.

    ``variable`` pins the free variable (``"z"`` or ``"t"``); otherwise it is
    inferred from the text and defaults to ``"z"``.
    """
    if not isinstance(source, str) or not source.strip():
        raise ExpressionSyntaxError("empty expression", 0)
    if variable is not None and variable not in VARIABLES:
        raise ValueError(f"variable must be one of {VARIABLES}")
    p = _Parser(source, variable)
    node = p.parse()
    var = variable or (next(iter(p.seen_vars)) if p.seen_vars else "z")
    return Expr(node, var)


def differentiate(e):
    return e.derivative()


def evaluate_constant(source):
    """Value of a variable-free expression such as ``"pi/2"`` or ``"1+2*i"``."""
    e = parse(source, variable="z")
    if _mentions_var(e.node):
        raise ExpressionSyntaxError(f"expected a constant, got {source!r}", 0)
    return e(0.0)


def _mentions_var(node):
    if isinstance(node, Var):
        return True
    if isinstance(node, Const):
        return False
    if isinstance(node, Unary):
        return _mentions_var(node.operand)
    if isinstance(node, Call):
        return _mentions_var(node.arg)
    return _mentions_var(node.left) or _mentions_var(node.right)
