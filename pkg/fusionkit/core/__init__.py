"""
Core package
Reverse-mode autodiff over dense 2-D float64 arrays
"""

from fusionkit.core.graph import Node, backward, constant, parameter, zero_grad

__all__ = ['Node', 'backward', 'constant', 'parameter', 'zero_grad']
