"""Functional calculus for the Dirichlet and Neumann Laplacian.

Operators on the half-space are realized by the method of images:
extend with the parity matching the boundary condition (odd for
Dirichlet, even for Neumann), apply the full-space multiplier, restrict
back.  Radial symbols commute with the reflection exactly, so the
restriction loses nothing and identities such as

    2^(1/p) || A_D^(s/2) f ||_{L^p(half)} = || Lambda^s f_odd ||_{L^p(box)}

hold by construction, not asymptotically.

The normal derivative anticommutes with the reflection and therefore
swaps the two calculi; its output is tagged with the opposite boundary
condition.  Tangential derivatives commute and keep the tag.
"""

from __future__ import annotations

import numpy as np

from .errors import BoundaryTagError, ConfigError
from .extension import even_extend, odd_extend, restrict
from .grid import BC_DIRICHLET, BC_NEUMANN, HalfField
from .spectral import (apply_multiplier, derivative_multiplier,
                       fractional_laplacian, semigroup_symbol)

__all__ = [
    "OP_DIRICHLET",
    "OP_NEUMANN",
    "extend_for",
    "frac_power",
    "semigroup",
    "normal_derivative",
    "tangential_derivative",
    "boundary_trace",
]

OP_DIRICHLET = BC_DIRICHLET
OP_NEUMANN = BC_NEUMANN


def _check_op(op: str) -> str:
    if op not in (OP_DIRICHLET, OP_NEUMANN):
        raise ConfigError(f"unknown operator {op!r}")
    return op


def extend_for(hf: HalfField, op: str):
    """Parity extension matching the operator's boundary condition."""
    return odd_extend(hf) if _check_op(op) == OP_DIRICHLET else even_extend(hf)


def frac_power(hf: HalfField, op: str, s: float) -> HalfField:
    """A^(s/2) f for A the Dirichlet or Neumann Laplacian.

    s is the order in terms of |xi|^s on the extension; s = 2 is the
    operator itself.  Negative s requires the extension to be zero-mean
    (odd extensions always are).
    """
    ext = extend_for(hf, op)
    return restrict(fractional_laplacian(ext, s), bc=op)


def semigroup(hf: HalfField, op: str, t: float, s: float = 2.0) -> HalfField:
    """exp(-t A^(s/2)) f for 0 < s <= 2; s = 2 is the heat semigroup.

    Orders beyond 2 compose frac_power with the heat flow and are left
    to callers.
    """
    if not 0.0 < s <= 2.0:
        raise ConfigError(f"semigroup order s={s} outside (0, 2]")
    ext = extend_for(hf, op)
    return restrict(semigroup_symbol(ext, t, s), bc=op)


def normal_derivative(hf: HalfField) -> HalfField:
    """d/dx_n through the extension; swaps the boundary tag.

    The derivative of an odd extension is even and vice versa, so a
    Dirichlet-tagged input comes back Neumann-tagged and conversely.
    Untagged input is refused: the parity of the extension would be
    arbitrary and the two choices genuinely differ.
    """
    if hf.bc == BC_DIRICHLET:
        ext, out_tag = odd_extend(hf), BC_NEUMANN
    elif hf.bc == BC_NEUMANN:
        ext, out_tag = even_extend(hf), BC_DIRICHLET
    else:
        raise BoundaryTagError(
            "normal derivative needs a boundary-tagged field")
    d = apply_multiplier(ext, derivative_multiplier(hf.grid, hf.grid.n))
    return restrict(d, bc=out_tag)


def tangential_derivative(hf: HalfField, k: int) -> HalfField:
    """d/dx_k for a tangential axis k < n; preserves the boundary tag.

    k = n is routed to :func:`normal_derivative`.  Tangential axes do
    not interact with the reflection, so both parity extensions give
    the identical restricted result and untagged fields are fine.
    """
    n = hf.grid.n
    if not 1 <= k <= n:
        raise ConfigError(f"axis {k} outside 1..{n}")
    if k == n:
        return normal_derivative(hf)
    if hf.bc == BC_NEUMANN:
        ext = even_extend(hf)
    else:
        ext = odd_extend(hf)
    d = apply_multiplier(ext, derivative_multiplier(hf.grid, k))
    return restrict(d, bc=hf.bc)


def boundary_trace(hf: HalfField) -> np.ndarray:
    """Extrapolated values at x_n = 0+ (second order in h).

    The staggered grid holds samples at h/2 and 3h/2; a linear
    extrapolant through them evaluates the trace.
    """
    v = hf.values
    return 1.5 * v[..., 0] - 0.5 * v[..., 1]
