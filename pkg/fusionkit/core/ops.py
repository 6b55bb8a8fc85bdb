"""
Registered differentiable ops over 2-D float64 nodes

Broadcasting is limited to two named ops: add_bias (row vector added to
every row) and scale_rows (each row multiplied by one entry of a column
vector). Every other binary op needs identical shapes.
"""

from typing import Callable, Dict, Sequence

import numpy as np

from fusionkit.core.graph import Node, make_node
from fusionkit.exceptions import ContractException, DimensionException, DomainException

OPS: Dict[str, Callable[..., Node]] = {}


def register(name: str):
    """Add an op to the registry used by the gradient-check suites"""
    def decorator(fn):
        OPS[name] = fn
        return fn
    return decorator


def _require_same_shape(op: str, a: Node, b: Node) -> None:
    if a.shape != b.shape:
        raise DimensionException(f"{op}: shapes {a.shape} and {b.shape} differ", shapes=[a.shape, b.shape])


@register('matmul')
def matmul(a: Node, b: Node) -> Node:
    if a.shape[1] != b.shape[0]:
        raise DimensionException(
            f"matmul: inner dimensions of {a.shape} and {b.shape} do not match",
            shapes=[a.shape, b.shape]
        )
    return make_node(a.value @ b.value, 'matmul', (a, b),
                     lambda g: (g @ b.value.T, a.value.T @ g))


@register('add')
def add(a: Node, b: Node) -> Node:
    _require_same_shape('add', a, b)
    return make_node(a.value + b.value, 'add', (a, b), lambda g: (g, g))


@register('sub')
def sub(a: Node, b: Node) -> Node:
    _require_same_shape('sub', a, b)
    return make_node(a.value - b.value, 'sub', (a, b), lambda g: (g, -g))


@register('mul')
def mul(a: Node, b: Node) -> Node:
    _require_same_shape('mul', a, b)
    return make_node(a.value * b.value, 'mul', (a, b),
                     lambda g: (g * b.value, g * a.value))


@register('add_bias')
def add_bias(x: Node, bias: Node) -> Node:
    """x (m×n) + bias (1×n) on every row"""
    if bias.shape != (1, x.shape[1]):
        raise DimensionException(
            f"add_bias: bias {bias.shape} does not fit input {x.shape}",
            shapes=[x.shape, bias.shape]
        )
    return make_node(x.value + bias.value, 'add_bias', (x, bias),
                     lambda g: (g, g.sum(axis=0, keepdims=True)))


@register('scale_rows')
def scale_rows(x: Node, weights: Node) -> Node:
    """Row i of x (m×n) times weights[i] (m×1)"""
    if weights.shape != (x.shape[0], 1):
        raise DimensionException(
            f"scale_rows: weights {weights.shape} do not fit input {x.shape}",
            shapes=[x.shape, weights.shape]
        )
    return make_node(x.value * weights.value, 'scale_rows', (x, weights),
                     lambda g: (g * weights.value, (g * x.value).sum(axis=1, keepdims=True)))


@register('concat_cols')
def concat_cols(nodes: Sequence[Node]) -> Node:
    if not nodes:
        raise ContractException("concat_cols needs at least one input")
    rows = nodes[0].shape[0]
    for node in nodes:
        if node.shape[0] != rows:
            raise DimensionException(
                "concat_cols: row counts differ",
                shapes=[n.shape for n in nodes]
            )
    bounds = np.cumsum([0] + [node.shape[1] for node in nodes])

    def _backward(g):
        return tuple(g[:, bounds[i]:bounds[i + 1]] for i in range(len(nodes)))

    return make_node(np.concatenate([node.value for node in nodes], axis=1),
                     'concat_cols', tuple(nodes), _backward)


@register('slice_cols')
def slice_cols(x: Node, start: int, stop: int) -> Node:
    if not 0 <= start < stop <= x.shape[1]:
        raise DimensionException(f"slice_cols: [{start}, {stop}) outside {x.shape}", shapes=[x.shape])

    def _backward(g):
        full = np.zeros_like(x.value)
        full[:, start:stop] = g
        return (full,)

    return make_node(x.value[:, start:stop].copy(), 'slice_cols', (x,), _backward)


@register('tanh')
def tanh(x: Node) -> Node:
    out = np.tanh(x.value)
    return make_node(out, 'tanh', (x,), lambda g: (g * (1.0 - out ** 2),))


@register('exp')
def exp(x: Node) -> Node:
    out = np.exp(x.value)
    return make_node(out, 'exp', (x,), lambda g: (g * out,))


@register('log')
def log(x: Node) -> Node:
    if np.any(x.value <= 0.0):
        raise DomainException(f"log of non-positive value (min {float(x.value.min())})")
    return make_node(np.log(x.value), 'log', (x,), lambda g: (g / x.value,))


@register('square')
def square(x: Node) -> Node:
    return make_node(x.value ** 2, 'square', (x,), lambda g: (2.0 * g * x.value,))


@register('scale')
def scale(x: Node, factor: float) -> Node:
    return make_node(x.value * factor, 'scale', (x,), lambda g: (g * factor,))


@register('add_scalar')
def add_scalar(x: Node, constant: float) -> Node:
    return make_node(x.value + constant, 'add_scalar', (x,), lambda g: (g,))


@register('softmax_rows')
def softmax_rows(x: Node) -> Node:
    shifted = x.value - x.value.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    out = e / e.sum(axis=1, keepdims=True)

    def _backward(g):
        return (out * (g - (g * out).sum(axis=1, keepdims=True)),)

    return make_node(out, 'softmax_rows', (x,), _backward)


@register('log_softmax_rows')
def log_softmax_rows(x: Node) -> Node:
    shifted = x.value - x.value.max(axis=1, keepdims=True)
    out = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    probs = np.exp(out)

    def _backward(g):
        return (g - probs * g.sum(axis=1, keepdims=True),)

    return make_node(out, 'log_softmax_rows', (x,), _backward)


@register('sum')
def reduce_sum(x: Node) -> Node:
    return make_node(np.array([[x.value.sum()]]), 'sum', (x,),
                     lambda g: (np.full_like(x.value, g[0, 0]),))


@register('mean')
def reduce_mean(x: Node) -> Node:
    count = x.value.size
    return make_node(np.array([[x.value.mean()]]), 'mean', (x,),
                     lambda g: (np.full_like(x.value, g[0, 0] / count),))
