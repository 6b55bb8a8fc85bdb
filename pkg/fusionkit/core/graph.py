"""
Reverse-mode computation graph

Every op builds a new Node holding its value, references to its input
nodes and a backward function mapping the upstream gradient to one
gradient per input. The graph is rebuilt on every forward pass.
"""

from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from fusionkit.core.tensor import as_tensor, shape_of
from fusionkit.exceptions import ContractException

BackwardFn = Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]


class Node:
    """
    Graph node: value, zero-initialized gradient and op record

    Leaves created with requires_grad=True are trainable parameters; their
    value arrays may be updated in place by optimizers and gradient checks.
    """

    __slots__ = ('value', 'grad', 'op', 'parents', 'requires_grad', '_backward', 'name')

    def __init__(self, value, requires_grad: bool = False, op: str = 'leaf',
                 parents: Tuple['Node', ...] = (), backward: Optional[BackwardFn] = None,
                 name: Optional[str] = None):
        self.value = as_tensor(value)
        self.grad = np.zeros_like(self.value)
        self.op = op
        self.parents = parents
        self.requires_grad = requires_grad
        self._backward = backward
        self.name = name

    @property
    def shape(self) -> Tuple[int, int]:
        return shape_of(self.value)

    def item(self) -> float:
        if self.shape != (1, 1):
            raise ContractException(f"item() needs a 1x1 node, got {self.shape}")
        return float(self.value[0, 0])

    def zero_grad(self) -> None:
        self.grad = np.zeros_like(self.value)

    def __repr__(self):
        label = self.name or self.op
        return f"Node({label}, shape={self.shape}, requires_grad={self.requires_grad})"


def parameter(value, name: Optional[str] = None) -> Node:
    """Create a trainable leaf"""
    return Node(value, requires_grad=True, name=name)


def constant(value, name: Optional[str] = None) -> Node:
    """Create a non-trainable leaf"""
    return Node(value, requires_grad=False, name=name)


def make_node(value: np.ndarray, op: str, parents: Sequence[Node], backward: BackwardFn) -> Node:
    """Record an op output; gradients flow only if some input requires them"""
    requires_grad = any(parent.requires_grad for parent in parents)
    return Node(value, requires_grad=requires_grad, op=op, parents=tuple(parents),
                backward=backward if requires_grad else None)


def topological_order(root: Node) -> List[Node]:
    """Inputs before outputs; iterative so deep graphs do not hit the recursion limit"""
    order: List[Node] = []
    visited = set()
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for parent in node.parents:
            if id(parent) not in visited:
                stack.append((parent, False))
    return order


def backward(root: Node) -> None:
    """
    Accumulate dRoot/dNode into every reachable node requiring gradients

    Each call adds to existing gradients, so calling twice without
    zero_grad doubles them.

    Raises:
        ContractException: if root is not 1×1
    """
    if root.shape != (1, 1):
        raise ContractException(f"backward() needs a scalar root, got shape {root.shape}")
    if not root.requires_grad:
        return

    upstream = {id(root): np.ones((1, 1))}
    for node in reversed(topological_order(root)):
        grad = upstream.pop(id(node), None)
        if grad is None or not node.requires_grad:
            continue
        node.grad += grad
        if node._backward is None:
            continue
        for parent, parent_grad in zip(node.parents, node._backward(grad)):
            if parent_grad is None or not parent.requires_grad:
                continue
            if id(parent) in upstream:
                upstream[id(parent)] = upstream[id(parent)] + parent_grad
            else:
                upstream[id(parent)] = parent_grad


def zero_grad(nodes: Iterable[Node]) -> None:
    for node in nodes:
        node.zero_grad()
