"""Tiny safe arithmetic-expression evaluator for catalogue data.

Catalogue matrices and nu-formulas are stored as text expressions in the
data file (entries contain surds and parameter-dependent values).  Only
arithmetic, comparisons, boolean combinations, a few math functions and
named values are allowed; nothing else parses.
"""

from __future__ import annotations

import ast
import math
import operator

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_UNARY = {ast.UAdd: operator.pos, ast.USub: operator.neg}
_CMPOPS = {
    ast.Lt: operator.lt,
    ast.LtE: operator.le,
    ast.Gt: operator.gt,
    ast.GtE: operator.ge,
    ast.Eq: operator.eq,
    ast.NotEq: operator.ne,
}
def _sqrt(x):
    # Limit evaluation can land a hair below zero (e.g. 2*t**2 - 1 at
    # t = 1/sqrt(2) in floats); clamp round-off, reject real negatives.
    if x < 0.0:
        if x > -1e-12:
            return 0.0
        raise ExpressionError(f"sqrt of negative value {x!r}")
    return math.sqrt(x)


_FUNCTIONS = {"sqrt": _sqrt, "abs": abs}
_CONSTANTS = {"pi": math.pi}


class ExpressionError(ValueError):
    pass


def _eval(node, names):
    if isinstance(node, ast.Expression):
        return _eval(node.body, names)
    if isinstance(node, ast.Constant):
        if isinstance(node.value, (int, float)):
            return float(node.value)
        raise ExpressionError(f"literal {node.value!r} not allowed")
    if isinstance(node, ast.Name):
        if node.id in names:
            return names[node.id]
        if node.id in _CONSTANTS:
            return _CONSTANTS[node.id]
        raise ExpressionError(f"unknown name '{node.id}'")
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval(node.left, names), _eval(node.right, names))
    if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
        return _UNARY[type(node.op)](_eval(node.operand, names))
    if isinstance(node, ast.BoolOp):
        op = all if isinstance(node.op, ast.And) else any
        return op(bool(_eval(v, names)) for v in node.values)
    if isinstance(node, ast.Compare):
        left = _eval(node.left, names)
        for cmp_op, comparator in zip(node.ops, node.comparators):
            if type(cmp_op) not in _CMPOPS:
                raise ExpressionError("comparison operator not allowed")
            right = _eval(comparator, names)
            if not _CMPOPS[type(cmp_op)](left, right):
                return False
            left = right
        return True
    if isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCTIONS:
            raise ExpressionError("only sqrt() and abs() calls are allowed")
        if node.keywords:
            raise ExpressionError("keyword arguments not allowed")
        return _FUNCTIONS[node.func.id](*(_eval(a, names) for a in node.args))
    raise ExpressionError(f"disallowed syntax: {ast.dump(node)}")


def evaluate(expression, names=None):
    """Evaluate an arithmetic/boolean expression string with given names."""
    if isinstance(expression, (int, float)):
        return float(expression)
    try:
        tree = ast.parse(str(expression), mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse '{expression}': {exc}") from exc
    return _eval(tree, dict(names or {}))
