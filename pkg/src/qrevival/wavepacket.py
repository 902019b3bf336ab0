"""Initial states, their expansion over bound states, and time evolution.

A Gaussian packet (or a single designated eigenstate) is projected onto a
bound-state set by overlap quadrature.  Evolution is diagonal: coefficient
``n`` picks up ``exp(-i * rate_n * tau)`` where ``rate_n`` is the state's
phase rate in scaled time.  The infinitely deep well gets its own projection
and evolution path over the trigonometric basis ``sqrt(2) cos(n pi x)`` for
odd ``n`` and ``sqrt(2) sin(n pi x)`` for even ``n``, whose phase law is
exactly quadratic, ``exp(-2 pi i n^2 tau)``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from ._quad import build_edges, integrate_batched, integrate
from .errors import CompletenessWarning, ConvergenceError
from .spectrum import BoundState, eigenfunction_value

COMPLETENESS_FLOOR = 0.999
_INFINITE_N_CAP = 512
_INFINITE_TRUNCATION = 1e-10


@dataclass(frozen=True)
class GaussianSpec:
    """Zero-mean-momentum Gaussian, ``exp(-(x - x0)^2 / (2 sigma^2))``."""

    x0: float
    sigma: float

    def __post_init__(self):
        if not (np.isfinite(self.sigma) and self.sigma > 0):
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if not (np.isfinite(self.x0) and abs(self.x0) < 0.5):
            raise ValueError(f"packet must start inside the well, got x0={self.x0}")

    def amplitude(self, x):
        return np.exp(-((x - self.x0) ** 2) / (2.0 * self.sigma ** 2))


@dataclass(frozen=True)
class SpectralDecomposition:
    """Expansion coefficients over an ordered bound-state list."""

    coefficients: np.ndarray
    completeness: float


@dataclass(frozen=True)
class InfiniteWellState:
    """Coefficients over the trigonometric basis, index ``n = 1..len``."""

    coefficients: np.ndarray

    @property
    def n(self) -> np.ndarray:
        return np.arange(1, len(self.coefficients) + 1)

    @property
    def completeness(self) -> float:
        return float(np.sum(np.abs(self.coefficients) ** 2))

    @property
    def phase_rates(self) -> np.ndarray:
        return 2.0 * np.pi * self.n ** 2

    @property
    def weights(self) -> np.ndarray:
        return np.abs(self.coefficients) ** 2


def _eigen_rows(alphas, betas, evens, norms, x):
    """Matrix of normalized eigenfunction values, one row per state."""
    x = np.asarray(x)
    phase = np.outer(2.0 * alphas, x)
    out = np.empty_like(phase)
    mask = evens[:, None]
    np.cos(phase, out=out, where=mask)
    np.sin(phase, out=out, where=~mask)

    cols_out = np.flatnonzero(np.abs(x) > 0.5)
    if len(cols_out):
        xo = x[cols_out]
        decay = np.exp(-2.0 * np.outer(betas, np.abs(xo) - 0.5))
        edge = np.where(evens, np.cos(alphas), np.sin(alphas))[:, None]
        orient = np.where(evens[:, None], 1.0, np.sign(xo)[None, :])
        out[:, cols_out] = edge * decay * orient
    out *= norms[:, None]
    return out


def _tail_edges(xmax):
    # Cubic clustering toward the well edge resolves fast-decaying tails.
    u = np.linspace(0.0, 1.0, 25)
    return 0.5 + (xmax - 0.5) * u ** 3


def project(initial, states, *, epsrel=1e-10) -> SpectralDecomposition:
    """Overlap coefficients of an initial state with each bound state.

    ``initial`` is a :class:`GaussianSpec` or a :class:`BoundState` drawn
    from the same well.  Coefficients are real for these real initial
    states.  A :class:`CompletenessWarning` is issued when the captured
    weight falls below ``COMPLETENESS_FLOOR``, which signals that the packet
    leaks into unbound levels and results are outside the method's domain of
    validity.
    """
    if not states:
        raise ValueError("need at least one bound state")
    beta_min = min(s.beta for s in states)

    if isinstance(initial, GaussianSpec):
        xmax = 0.5 + max(10.0 * initial.sigma, 25.0 / (2.0 * beta_min))
        sigma_scale = initial.sigma
        norm = np.sqrt(integrate(
            lambda x: initial.amplitude(x) ** 2,
            -xmax, xmax,
            breakpoints=(-0.5, 0.5),
            min_panels=max(16, int(2.0 * xmax / sigma_scale) + 1),
        ))

        def psi0(x):
            return initial.amplitude(x) / norm
    elif isinstance(initial, BoundState):
        xmax = 0.5 + 25.0 / (2.0 * min(beta_min, initial.beta))
        sigma_scale = 0.5

        def psi0(x):
            return eigenfunction_value(initial, x)
    else:
        raise TypeError(f"unsupported initial state {type(initial).__name__}")

    coeffs = np.empty(len(states))
    for start in range(0, len(states), 64):
        chunk = states[start:start + 64]
        al = np.array([s.alpha for s in chunk])
        be = np.array([s.beta for s in chunk])
        ev = np.array([s.parity == "even" for s in chunk])
        no = np.array([s.norm for s in chunk])

        def f(x, al=al, be=be, ev=ev, no=no):
            rows = _eigen_rows(al, be, ev, no, x)
            rows *= psi0(x)[None, :]
            return rows

        interior = build_edges(
            -0.5, 0.5,
            min_panels=max(8, int(0.75 * al.max()) + 1, int(3.0 / sigma_scale) + 1))
        right = _tail_edges(xmax)
        edges = np.concatenate([-right[::-1], interior[1:-1], right])
        vals, errs, conv = integrate_batched(f, edges, epsrel=epsrel)
        if not conv.all():
            raise ConvergenceError("projection quadrature failed to converge")
        coeffs[start:start + len(chunk)] = vals

    completeness = float(np.sum(coeffs ** 2))
    if completeness < COMPLETENESS_FLOOR:
        warnings.warn(
            f"bound states capture only {completeness:.6f} of the initial state",
            CompletenessWarning, stacklevel=2)
    return SpectralDecomposition(coefficients=coeffs.astype(complex),
                                 completeness=completeness)


def evolve(decomp: SpectralDecomposition, states, tau: float) -> np.ndarray:
    """Coefficients after scaled time ``tau``; magnitudes are preserved."""
    rates = np.array([s.phase_rate for s in states])
    return decomp.coefficients * np.exp(-1j * rates * tau)


def snapshot(decomp: SpectralDecomposition, states, tau: float, grid) -> np.ndarray:
    """Probability density on the given sorted position grid at time ``tau``."""
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or not np.all(np.isfinite(grid)):
        raise ValueError("grid must be a finite 1-d array")
    if np.any(np.diff(grid) < 0):
        raise ValueError("grid must be sorted")
    c = evolve(decomp, states, tau)
    psi = np.zeros(len(grid), dtype=complex)
    for cn, state in zip(c, states):
        psi += cn * eigenfunction_value(state, grid)
    return np.abs(psi) ** 2


def _infinite_rows(n_values, x):
    phase = np.outer(n_values, np.pi * x)
    odd_n = (n_values % 2 == 1)
    return np.sqrt(2.0) * np.where(odd_n[:, None], np.cos(phase), np.sin(phase))


def infinite_project(spec: GaussianSpec, n_max: int | None = None) -> InfiniteWellState:
    """Expand a Gaussian over the trigonometric basis of the box.

    The packet is normalized over the box interior, where the basis is
    complete.  When ``n_max`` is omitted the expansion grows until the
    captured weight reaches ``1 - 1e-10`` or the mode cap, whichever comes
    first.
    """
    norm = np.sqrt(integrate(
        lambda x: spec.amplitude(x) ** 2, -0.5, 0.5,
        min_panels=max(16, int(2.0 / spec.sigma) + 1)))

    target = None if n_max is not None else 1.0 - _INFINITE_TRUNCATION
    cap = n_max if n_max is not None else _INFINITE_N_CAP

    coeffs: list[float] = []
    cumulative = 0.0
    block = 32
    while len(coeffs) < cap:
        n_lo = len(coeffs) + 1
        n_hi = min(n_lo + block - 1, cap)
        n_values = np.arange(n_lo, n_hi + 1)

        def f(x, n_values=n_values):
            return _infinite_rows(n_values, x) * (spec.amplitude(x) / norm)[None, :]

        edges = build_edges(
            -0.5, 0.5,
            min_panels=max(8, int(0.8 * n_hi) + 1, int(3.0 / spec.sigma) + 1))
        vals, errs, conv = integrate_batched(f, edges, epsabs=1e-14, epsrel=1e-11)
        if not conv.all():
            raise ConvergenceError("box-basis projection failed to converge")
        coeffs.extend(vals.tolist())
        cumulative = float(np.sum(np.square(coeffs)))
        if target is not None and cumulative >= target:
            break
    return InfiniteWellState(coefficients=np.asarray(coeffs, dtype=complex))


def infinite_evolve(state: InfiniteWellState, tau: float) -> InfiniteWellState:
    """Quadratic phase law; exactly periodic with unit period."""
    phases = np.exp(-2j * np.pi * state.n ** 2 * tau)
    return InfiniteWellState(coefficients=state.coefficients * phases)


def parity_filtered(state: InfiniteWellState, parity: str,
                    renormalize: bool = True) -> InfiniteWellState:
    """Keep one parity sector of a box-basis state.

    Even-parity amplitudes sit on the cosine modes (odd ``n``), odd-parity
    amplitudes on the sine modes (even ``n``).
    """
    if parity not in ("even", "odd"):
        raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")
    keep_odd_n = (parity == "even")
    mask = (state.n % 2 == 1) == keep_odd_n
    c = np.where(mask, state.coefficients, 0.0)
    if renormalize:
        total = np.sqrt(np.sum(np.abs(c) ** 2))
        if total == 0:
            raise ValueError(f"state has no {parity}-parity component")
        c = c / total
    return InfiniteWellState(coefficients=c)
