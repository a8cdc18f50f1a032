"""Seeded families of test fields used by the experiment sweeps.

Families are parameterized by continuum data (frequencies, centers,
widths) drawn once from the seed, then sampled on whatever grid a
sweep asks for, so refining the resolution re-samples the *same*
functions.  Band-limited draws snap their frequencies to exact box
modes k = pi m / L, which keeps them native to every grid in a sweep.

Available names:

``band_random``
    random combinations of resolved modes, odd or even in x_n.
``bump_random``
    smooth compactly supported bumps well inside the half-box;
    admissible for both calculi.
``boundary_adversarial``
    a x_n step(x_n / sigma) profiles: Dirichlet-admissible with a
    deliberately nonzero normal derivative at the boundary.
``counterexample``
    the fixed pair f = g = x_n phi(x_n) (times tangential cutoffs for
    n >= 2) with phi the canonical smooth step equal to 1 on
    [0, 1/2] and 0 beyond 1.
``sine`` / ``cosine``
    single eigenmodes, lowest ones first.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError
from .grid import BC_DIRICHLET, BC_NEUMANN, GridSpec, HalfField, sample_half
from .halfspace_ops import OP_DIRICHLET
from .spectral import smooth_step

__all__ = ["cutoff_profile", "bump", "counterexample_expr", "make_family",
           "FAMILY_NAMES"]

FAMILY_NAMES = ("band_random", "bump_random", "boundary_adversarial",
                "counterexample", "sine", "cosine")


def cutoff_profile(x, scale: float = 1.0):
    """Smooth step in one variable: 1 on [0, scale/2], 0 from scale on."""
    u = np.asarray(x, dtype=float) / scale
    return smooth_step(2.0 - 2.0 * u)


def bump(x, center: float, width: float):
    """C^inf bump supported on [center - width, center + width], peak 1."""
    u = (np.asarray(x, dtype=float) - center) / width
    out = np.zeros_like(u)
    inside = np.abs(u) < 1.0
    ui = u[inside]
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - ui ** 2))
    return out


def counterexample_expr():
    """The boundary profile driving the s = 2 + 1/p breakdown."""

    def expr(*coords):
        xn = coords[-1]
        out = xn * cutoff_profile(xn)
        for x in coords[:-1]:
            out = out * cutoff_profile(np.abs(x))
        return out

    return expr


def _mode_range(grid: GridSpec, ref_N: int):
    """Integer mode numbers inside the resolved band of the reference
    grid, capped low enough that pairwise products stay in band too."""
    ref = GridSpec(grid.n, grid.L, ref_N, grid.stagger)
    slop = 1e-9
    j_min = int(np.ceil(np.log2(np.pi / ref.L) + 1.0 - slop))
    j_max = int(np.floor(np.log2(np.pi / ref.h) - 1.0 + slop))
    m_lo = int(np.ceil(2.0 ** j_min * ref.L / np.pi + slop))
    m_hi = int(np.floor(2.0 ** (j_max - 2) * ref.L / np.pi))
    if m_hi <= m_lo + 4:
        raise ConfigError("reference grid too coarse for a band-random draw")
    return m_lo, m_hi


def _band_random(grid: GridSpec, parity: str, rng, ref_N: int) -> HalfField:
    m_lo, m_hi = _mode_range(grid, ref_N)
    n_modes = int(rng.integers(6, 13))
    # log-uniform spread over the usable modes
    ms = np.unique(np.round(np.exp(
        rng.uniform(np.log(m_lo), np.log(m_hi), n_modes))).astype(int))
    amps = rng.normal(0.0, 1.0, ms.size)
    phases = rng.uniform(0.0, 2.0 * np.pi, (ms.size, max(grid.n - 1, 1)))
    k = np.pi * ms / grid.L

    def expr(*coords):
        xn = coords[-1]
        out = np.zeros(np.broadcast_shapes(*[c.shape for c in coords]))
        for i in range(ms.size):
            if parity == BC_DIRICHLET:
                term = amps[i] * np.sin(k[i] * xn)
            else:
                term = amps[i] * np.cos(k[i] * xn)
            for ax, x in enumerate(coords[:-1]):
                # tangential factor at a low mode, random phase
                m_t = 1 + (int(ms[i]) + ax) % 4
                term = term * np.cos(np.pi * m_t * x / grid.L
                                     + phases[i, ax])
            out = out + term
        return out

    bc = BC_DIRICHLET if parity == BC_DIRICHLET else BC_NEUMANN
    return sample_half(grid, expr, bc=bc)


def _bump_random(grid: GridSpec, parity: str, rng) -> HalfField:
    n_bumps = int(rng.integers(1, 4))
    lo, hi = 1.5, grid.L / 2.0 - 1.5
    if hi <= lo:
        raise ConfigError(f"box L={grid.L} too small for interior bumps")
    centers = rng.uniform(lo, hi, (n_bumps, grid.n))
    widths = rng.uniform(0.4, 1.2, (n_bumps, grid.n))
    amps = rng.uniform(0.5, 1.5, n_bumps) * rng.choice([-1.0, 1.0], n_bumps)
    tang_centers = rng.uniform(-grid.L / 4.0, grid.L / 4.0, (n_bumps, grid.n))

    def expr(*coords):
        out = np.zeros(np.broadcast_shapes(*[c.shape for c in coords]))
        for b in range(n_bumps):
            term = amps[b] * bump(coords[-1], centers[b, -1], widths[b, -1])
            for ax, x in enumerate(coords[:-1]):
                term = term * bump(x, tang_centers[b, ax], widths[b, ax])
            out = out + term
        return out

    bc = BC_DIRICHLET if parity == BC_DIRICHLET else BC_NEUMANN
    return sample_half(grid, expr, bc=bc)


def _boundary_adversarial(grid: GridSpec, rng) -> HalfField:
    scale = float(rng.uniform(0.7, 1.6))
    amp = float(rng.uniform(0.6, 1.4))
    tang_c = rng.uniform(-grid.L / 4.0, grid.L / 4.0, max(grid.n - 1, 1))
    tang_w = rng.uniform(0.8, 1.6, max(grid.n - 1, 1))

    def expr(*coords):
        xn = coords[-1]
        out = amp * xn * cutoff_profile(xn, scale)
        for ax, x in enumerate(coords[:-1]):
            out = out * bump(x, tang_c[ax], tang_w[ax])
        return out

    return sample_half(grid, expr, bc=BC_DIRICHLET)


def _eigenmode(grid: GridSpec, parity: str, index: int) -> HalfField:
    k = np.pi * (index + 1) / grid.L
    if parity == BC_DIRICHLET:
        return sample_half(grid, lambda *c: np.sin(k * c[-1]),
                           bc=BC_DIRICHLET)
    return sample_half(grid, lambda *c: np.cos(k * c[-1]), bc=BC_NEUMANN)


def make_family(name: str, grid: GridSpec, op: str, seed: int, count: int,
                ref_N: int | None = None) -> list[HalfField]:
    """Deterministic list of fields; same seed, same functions, any grid.

    ``ref_N`` is the coarsest resolution of the enclosing sweep; the
    band-random family keeps its frequencies inside that grid's band so
    refinement only re-samples.
    """
    if name not in FAMILY_NAMES:
        raise ConfigError(f"unknown family {name!r} (have {FAMILY_NAMES})")
    if count < 1:
        raise ConfigError("family count must be >= 1")
    ref_N = grid.N if ref_N is None else min(ref_N, grid.N)
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        if name == "band_random":
            out.append(_band_random(grid, op, rng, ref_N))
        elif name == "bump_random":
            out.append(_bump_random(grid, op, rng))
        elif name == "boundary_adversarial":
            if op != OP_DIRICHLET:
                raise ConfigError(
                    "the adversarial family is Dirichlet-tagged by design")
            out.append(_boundary_adversarial(grid, rng))
        elif name == "counterexample":
            # the same samples under either interpretation; the tag
            # decides which reflection the norms will use
            out.append(sample_half(grid, counterexample_expr(), bc=op))
        elif name == "sine":
            out.append(_eigenmode(grid, BC_DIRICHLET, i))
        else:
            out.append(_eigenmode(grid, BC_NEUMANN, i))
    return out
