"""Bound states of a symmetric square well of finite depth.

Everything is dimensionless.  Positions are measured in units of the well
length (``xbar = x / L``, well interior ``|xbar| <= 1/2``) and the single
parameter ``epsilon`` fixes the depth.  Each bound state is labeled by the
root ``alpha`` of a transcendental equation, with ``beta = sqrt(epsilon^2 -
alpha^2)`` the decay rate in the forbidden region.  Energies are reported as
``alpha^2``; when states are evolved, the time unit is the revival period of
the infinitely deep well, so a state accumulates phase ``exp(-8i alpha^2 tau
/ pi)`` over scaled time ``tau``.

Parity alternates along the spectrum.  Even states obey ``alpha tan alpha =
beta`` and live in ``[k pi, k pi + pi/2)``; odd states obey ``alpha cot alpha
= -beta`` and live in ``(k pi + pi/2, (k+1) pi]``.  Root finding uses the
pole-free rearrangements ``beta cos a - a sin a`` and ``a cos a + beta sin
a``, which change sign across each bracket, so bisection cannot fail.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._quad import build_edges, integrate_batched
from .errors import ConvergenceError

_WEAK_BINDING_BETA = 1e-6
_BISECTION_CAP = 200
_NEWTON_POLISH_STEPS = 3


@dataclass(frozen=True)
class WellConfig:
    """Dimensionless strength of the well; all other scales are absorbed."""

    epsilon: float

    def __post_init__(self):
        eps = self.epsilon
        if not (np.isfinite(eps) and eps > 0):
            raise ValueError(f"well strength must be finite and positive, got {eps}")

    @property
    def predicted_state_count(self) -> int:
        return int(np.floor(2.0 * self.epsilon / np.pi)) + 1


@dataclass(frozen=True)
class BoundState:
    """One bound level: 1-based index, parity, root pair and normalization."""

    index: int
    parity: str
    alpha: float
    beta: float
    norm: float
    weakly_bound: bool = False

    @property
    def energy(self) -> float:
        return self.alpha ** 2

    @property
    def phase_rate(self) -> float:
        """Phase accumulated per unit scaled time."""
        return 8.0 * self.alpha ** 2 / np.pi


@dataclass(frozen=True)
class BarkerApproximation:
    """First-order mapping of the finite well onto a longer infinite well."""

    effective_length_ratio: float
    approx_energy_scale: float
    approx_revival_time: float


def barker(config: WellConfig) -> BarkerApproximation:
    """Closed-form effective-length ratios for a well of strength epsilon."""
    ratio = 1.0 + 1.0 / config.epsilon
    scale = (config.epsilon / (1.0 + config.epsilon)) ** 2
    return BarkerApproximation(
        effective_length_ratio=ratio,
        approx_energy_scale=scale,
        approx_revival_time=ratio ** 2,
    )


def phase_rates(states) -> np.ndarray:
    return np.array([s.phase_rate for s in states])


def transcendental_residual(state: BoundState) -> float:
    """Residual of the defining equation, in its textbook tan/cot form."""
    a, b = state.alpha, state.beta
    if state.parity == "even":
        return a * np.tan(a) - b
    return a / np.tan(a) + b


def _bracket_functions(eps, even_mask):
    def f(a):
        b = np.sqrt(np.maximum(eps * eps - a * a, 0.0))
        return np.where(even_mask,
                        b * np.cos(a) - a * np.sin(a),
                        a * np.cos(a) + b * np.sin(a))
    return f


def _derivative(eps, even_mask, a):
    b = np.sqrt(np.maximum(eps * eps - a * a, 1e-300))
    d_even = -(a / b) * np.cos(a) - b * np.sin(a) - np.sin(a) - a * np.cos(a)
    d_odd = np.cos(a) - a * np.sin(a) - (a / b) * np.sin(a) + b * np.cos(a)
    return np.where(even_mask, d_even, d_odd)


def _solve_roots(eps: float):
    count = int(np.floor(2.0 * eps / np.pi)) + 1
    j = np.arange(count)
    lo = j * (np.pi / 2.0)
    hi = np.minimum((j + 1) * (np.pi / 2.0), eps * (1.0 - 1e-12))
    even_mask = (j % 2 == 0)

    if np.any(hi <= lo):
        raise ConvergenceError(
            f"root bracket collapsed for epsilon={eps}: the strength sits "
            f"within rounding distance of a parity threshold")

    f = _bracket_functions(eps, even_mask)
    fa = f(lo)
    fb = f(hi)
    if np.any(fa * fb > 0):
        bad = int(np.argmax(fa * fb > 0))
        raise ConvergenceError(
            f"no sign change in root bracket {bad} for epsilon={eps}")

    a, b = lo.copy(), hi.copy()
    for _ in range(_BISECTION_CAP):
        mid = 0.5 * (a + b)
        fm = f(mid)
        go_left = fa * fm <= 0
        b = np.where(go_left, mid, b)
        a = np.where(go_left, a, mid)
        fa = np.where(go_left, fa, fm)
        if np.all((b - a) <= 4.0 * np.finfo(float).eps * np.maximum(1.0, b)):
            break
    root = 0.5 * (a + b)

    # Newton polish on the pole-free form; skip steps that would leave the
    # bracket or divide by a vanishing derivative (nearly unbound roots).
    for _ in range(_NEWTON_POLISH_STEPS):
        beta_now = np.sqrt(np.maximum(eps * eps - root * root, 0.0))
        deriv = _derivative(eps, even_mask, root)
        safe = (np.abs(deriv) > 0) & (beta_now > 1e-8)
        step = np.where(safe, f(root) / np.where(safe, deriv, 1.0), 0.0)
        cand = root - step
        ok = (cand > lo) & (cand < hi)
        root = np.where(safe & ok, cand, root)

    beta = np.sqrt(np.maximum(eps * eps - root * root, 0.0))
    return root, beta, even_mask


def _interior_norm_integrals(alpha, even_mask, epsrel=1e-10):
    """Integral of the squared unnormalized interior profile over the well.

    Uses ``cos^2 = (1 + cos)/2`` and ``sin^2 = (1 - cos)/2`` so one cosine
    evaluation per node serves both parities.
    """
    alpha = np.asarray(alpha)
    out = np.empty(len(alpha))
    for start in range(0, len(alpha), 64):
        sl = slice(start, min(start + 64, len(alpha)))
        a_chunk = alpha[sl]
        sign = np.where(even_mask[sl], 1.0, -1.0)

        def f(x, a_chunk=a_chunk, sign=sign):
            m = np.outer(4.0 * a_chunk, x)
            np.cos(m, out=m)
            m *= 0.5 * sign[:, None]
            m += 0.5
            return m

        edges = build_edges(-0.5, 0.5,
                            min_panels=max(8, int(a_chunk.max()) + 1))
        vals, errs, conv = integrate_batched(f, edges, epsrel=epsrel)
        if not conv.all():
            raise ConvergenceError("interior normalization quadrature failed")
        out[sl] = vals
    return out


def solve_spectrum(config: WellConfig, tol: float = 1e-12) -> list[BoundState]:
    """All bound states of the well, ordered by increasing energy.

    ``tol`` bounds the residual of the defining transcendental equation at
    each accepted root, up to the precision achievable in double arithmetic
    for very strong wells (the residual's condition number grows like
    ``epsilon^2 / alpha``).
    """
    if not (0 < tol <= 1e-6):
        raise ValueError(f"tol must lie in (0, 1e-6], got {tol}")
    eps = config.epsilon

    root, beta, even_mask = _solve_roots(eps)

    # Residual acceptance accounts for the conditioning of the tan/cot form.
    tangent = np.tan(root)
    residual = np.where(even_mask,
                        root * tangent - beta,
                        root / tangent + beta)
    slope = np.where(even_mask, np.abs(tangent), np.abs(1.0 / tangent))
    cond = slope + root * (1.0 + slope ** 2) + root / np.maximum(beta, 1e-30)
    achievable = 64.0 * np.finfo(float).eps * cond * np.maximum(1.0, root)
    bad = np.abs(residual) > np.maximum(tol, achievable)
    if bad.any():
        i = int(np.argmax(bad))
        raise ConvergenceError(
            f"root {i + 1} did not converge: residual {residual[i]:.3e}")

    interior = _interior_norm_integrals(root, even_mask)
    tails = np.where(even_mask, np.cos(root), np.sin(root)) ** 2 \
        / (2.0 * np.maximum(beta, 1e-300))
    norms = 1.0 / np.sqrt(interior + tails)

    return [
        BoundState(
            index=i + 1,
            parity="even" if even_mask[i] else "odd",
            alpha=float(root[i]),
            beta=float(beta[i]),
            norm=float(norms[i]),
            weakly_bound=bool(beta[i] < _WEAK_BINDING_BETA),
        )
        for i in range(len(root))
    ]


def closed_form_norm(state: BoundState) -> float:
    """Textbook normalization constant; cross-check for the numerical norm."""
    return np.sqrt(2.0 / (1.0 + 1.0 / state.beta))


def eigenfunction_value(state: BoundState, xbar):
    """Evaluate the normalized eigenfunction at scaled positions.

    Piecewise: trigonometric inside the well, exponentially decaying
    outside.  The outside branch is written as ``exp(-2 beta (|x| - 1/2))``
    so deep wells do not overflow.
    """
    x = np.asarray(xbar, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("positions must be finite")
    scalar = (x.ndim == 0)
    x = np.atleast_1d(x)
    out = np.empty_like(x)
    inside = np.abs(x) <= 0.5
    decay = np.exp(-2.0 * state.beta * (np.abs(x[~inside]) - 0.5))
    if state.parity == "even":
        out[inside] = np.cos(2.0 * state.alpha * x[inside])
        out[~inside] = np.cos(state.alpha) * decay
    else:
        out[inside] = np.sin(2.0 * state.alpha * x[inside])
        out[~inside] = np.sign(x[~inside]) * np.sin(state.alpha) * decay
    out *= state.norm
    return float(out[0]) if scalar else out


def orthonormality_matrix(states) -> np.ndarray:
    """Gram matrix of overlaps between the given states.

    Opposite-parity entries vanish identically by symmetry of the integrand
    and are returned as exact zeros.  Same-parity entries combine an adaptive
    interior quadrature with closed-form tails (the product of two decaying
    branches is a pure exponential).  Entries whose quadrature fails to
    converge are reported collectively.
    """
    if not states:
        raise ValueError("need at least one state")
    n = len(states)
    gram = np.zeros((n, n))
    pairs = [(i, k) for i in range(n) for k in range(i, n)
             if states[i].parity == states[k].parity]

    al = np.array([states[i].alpha for i, _ in pairs])
    ak = np.array([states[k].alpha for _, k in pairs])
    even = np.array([states[i].parity == "even" for i, _ in pairs])
    sign = np.where(even, 1.0, -1.0)

    def f(x):
        # product-to-sum: cos*cos and sin*sin differ only in the sign of the
        # sum-frequency term
        diff = np.outer(2.0 * (al - ak), x)
        np.cos(diff, out=diff)
        total = np.outer(2.0 * (al + ak), x)
        np.cos(total, out=total)
        total *= sign[:, None]
        diff += total
        diff *= 0.5
        return diff

    edges = build_edges(-0.5, 0.5, min_panels=max(8, int(0.5 * (al + ak).max()) + 1))
    vals, errs, conv = integrate_batched(f, edges, epsabs=1e-14, epsrel=1e-12)
    if not conv.all():
        failed = [pairs[q] for q in np.flatnonzero(~conv)]
        raise ConvergenceError(f"overlap quadrature failed for entries {failed}")

    for (i, k), interior in zip(pairs, vals):
        si, sk = states[i], states[k]
        edge_i = np.cos(si.alpha) if si.parity == "even" else np.sin(si.alpha)
        edge_k = np.cos(sk.alpha) if sk.parity == "even" else np.sin(sk.alpha)
        tails = edge_i * edge_k / (si.beta + sk.beta)
        val = si.norm * sk.norm * (interior + tails)
        gram[i, k] = gram[k, i] = val
    return gram
