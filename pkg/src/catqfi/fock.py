"""Truncated Fock-space states for one and two bosonic modes.

Single-mode states are complex amplitude vectors indexed by photon number
0..n_max; two-mode states are amplitude grids over (n_a, n_b).  All
operations are pure functions returning new objects, so values can be
shared freely across threads / parallel maps.

Conventions fixed here and relied on everywhere else:
  * coherent amplitudes  c_n = e^{-|alpha|^2/2} alpha^n / sqrt(n!)
  * the 50:50 beam splitter maps coherent amplitudes
        (g_a, g_b)  ->  ((g_a+g_b)/sqrt(2), (g_b-g_a)/sqrt(2))
  * the phase shifter on a mode multiplies amplitudes by e^{i*phi*n}
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import ceil, lgamma, log, pi, sqrt

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import gammainc

TAIL_TOL = 1e-12


class CutoffError(RuntimeError):
    """A Fock cutoff is too small for the requested state or channel."""


@dataclass(frozen=True, eq=False)
class FockVector:
    """Single-mode pure state: amps[n] is the amplitude of |n>."""

    amps: np.ndarray

    @property
    def n_max(self) -> int:
        return len(self.amps) - 1

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2))

    def normalize(self) -> "FockVector":
        n2 = self.norm_sq()
        if n2 <= 0.0:
            raise ValueError("cannot normalize a zero vector")
        return FockVector(self.amps / sqrt(n2))

    def moment(self, order: int = 1) -> float:
        """<n^order> of the photon-number distribution (state need not be normalized)."""
        p = np.abs(self.amps) ** 2
        n = np.arange(len(p), dtype=float)
        return float(np.sum(n**order * p) / np.sum(p))


@dataclass(frozen=True, eq=False)
class TwoModeState:
    """Two-mode pure state: amps[n_a, n_b] on a square grid 0..n_max per axis."""

    amps: np.ndarray

    def __post_init__(self):
        if self.amps.ndim != 2 or self.amps.shape[0] != self.amps.shape[1]:
            raise ValueError("two-mode amplitude grid must be square")

    @property
    def n_max(self) -> int:
        return self.amps.shape[0] - 1

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2))

    def normalize(self) -> "TwoModeState":
        n2 = self.norm_sq()
        if n2 <= 0.0:
            raise ValueError("cannot normalize a zero vector")
        return TwoModeState(self.amps / sqrt(n2))


@dataclass(frozen=True)
class CatSpec:
    """N evenly phased coherent components of common amplitude alpha."""

    n_components: int
    alpha: complex

    def __post_init__(self):
        if self.n_components < 1:
            raise ValueError("n_components must be >= 1")


def truncation_bound(alpha_abs: float, tail_tol: float = TAIL_TOL) -> int:
    """Smallest n_max with Poisson(|alpha|^2) mass above n_max <= tail_tol, floored at 32.

    P(X > n) for X ~ Poisson(lam) equals the regularized lower incomplete
    gamma function P(n+1, lam).
    """
    if alpha_abs < 0:
        raise ValueError("alpha_abs must be >= 0")
    lam = alpha_abs**2
    if lam == 0.0:
        return 32
    n = int(lam)
    while gammainc(n + 1, lam) > tail_tol:
        n += 1
        if n > lam + 200 * sqrt(lam) + 2000:
            raise CutoffError("Poisson tail scan failed to converge")
    return max(n, 32)


def default_cutoff(alpha_abs: float, tail_tol: float = TAIL_TOL) -> int:
    """Grid size heuristic: max(32, |a|^2 + 10|a| + 20), at least the tail bound."""
    a = abs(alpha_abs)
    heuristic = ceil(a * a + 10 * a + 20)
    return max(32, heuristic, truncation_bound(a, tail_tol))


def _check_tail(amps: np.ndarray, top_index: int) -> None:
    n2 = float(np.sum(np.abs(amps) ** 2))
    if abs(amps[top_index]) ** 2 > TAIL_TOL * n2:
        raise CutoffError(
            f"cutoff too small: |amps[{top_index}]|^2 = "
            f"{abs(amps[top_index])**2:.3e} exceeds {TAIL_TOL:g} * norm^2"
        )


def coherent(alpha: complex, n_max: int) -> FockVector:
    """Coherent state |alpha> truncated at n_max.

    Amplitudes are evaluated in log space, so the cutoff is not limited by
    factorial overflow (n ~ 170).
    """
    alpha = complex(alpha)
    amps = np.zeros(n_max + 1, dtype=complex)
    if alpha == 0:
        amps[0] = 1.0
        return FockVector(amps)
    a2 = abs(alpha) ** 2
    ns = np.arange(n_max + 1)
    log_mod = -a2 / 2 + ns * log(abs(alpha)) - 0.5 * np.array([lgamma(n + 1) for n in ns])
    amps = np.exp(log_mod) * np.exp(1j * ns * np.angle(alpha))
    _check_tail(amps, n_max)
    return FockVector(amps)


def cat_state(spec: CatSpec, n_max: int) -> FockVector:
    """Normalized superposition of N coherent states at phases 2*pi*k/N.

    Built directly on its photon-number support (multiples of N) and
    normalized numerically, so no closed-form normalization constant enters.
    """
    N = spec.n_components
    alpha = complex(spec.alpha)
    if alpha == 0:
        amps = np.zeros(n_max + 1, dtype=complex)
        amps[0] = 1.0
        return FockVector(amps)
    a2 = abs(alpha) ** 2
    ks = np.arange(0, n_max + 1, N)
    log_mod = -a2 / 2 + ks * log(abs(alpha)) - 0.5 * np.array([lgamma(k + 1) for k in ks])
    amps = np.zeros(n_max + 1, dtype=complex)
    amps[ks] = np.exp(log_mod) * np.exp(1j * ks * np.angle(alpha))
    _check_tail(amps, int(ks[-1]))
    return FockVector(amps / np.linalg.norm(amps))


def product_state(a: FockVector, b: FockVector) -> TwoModeState:
    if a.n_max != b.n_max:
        raise ValueError(f"mode cutoffs differ: {a.n_max} vs {b.n_max}")
    return TwoModeState(np.outer(a.amps, b.amps))


@lru_cache(maxsize=512)
def _bs_sector_unitary(n: int) -> np.ndarray:
    """50:50 beam-splitter block on the total-photon-number-n sector.

    exp(theta*(a^dag b - a b^dag)) restricted to span{|k, n-k>} is the
    exponential of a real antisymmetric tridiagonal generator; i*G is made
    real symmetric by the diagonal similarity diag(i^k), so the block is
    built from an exact tridiagonal eigendecomposition.
    """
    if n == 0:
        return np.ones((1, 1))
    k = np.arange(n)
    off = np.sqrt((k + 1.0) * (n - k))  # <k+1|G|k> with G = a^dag b - a b^dag
    w, v = eigh_tridiagonal(np.zeros(n + 1), off)
    d = 1j ** np.arange(n + 1)
    # U = D V exp(-i*theta*w) V^T D^dag, theta = pi/4; result is real orthogonal
    u = (d[:, None] * v) @ (np.exp(-1j * (pi / 4) * w)[:, None] * (v.T * d.conj()[None, :]))
    return np.ascontiguousarray(u.real)


def beam_splitter_5050(a: FockVector, b: FockVector) -> TwoModeState:
    """Mix two modes on a 50:50 beam splitter.

    Sign convention: coherent inputs |g_a>|g_b> map to the product
    |(g_a+g_b)/sqrt2> |(g_b-g_a)/sqrt2>, which reproduces the
    (beta +- alpha)/2 branch structure of a cat + coherent input.
    Total photon number is conserved, so the unitary acts sector by sector;
    sector content falling outside the grid corner is dropped (negligible
    for tail-adequate inputs, visible as a norm deficit otherwise).
    """
    if a.n_max != b.n_max:
        raise ValueError(f"mode cutoffs differ: {a.n_max} vs {b.n_max}")
    n_max = a.n_max
    grid = np.outer(a.amps, b.amps)
    out = np.zeros_like(grid)
    for n in range(2 * n_max + 1):
        k_lo = max(0, n - n_max)
        k_hi = min(n, n_max)
        ks = np.arange(k_lo, k_hi + 1)
        vec = np.zeros(n + 1, dtype=complex)
        vec[ks] = grid[ks, n - ks]
        if not np.any(vec):
            continue
        w = _bs_sector_unitary(n) @ vec
        out[ks, n - ks] = w[ks]
    return TwoModeState(out)


def phase_shift(s: TwoModeState, mode: str, phi: float) -> TwoModeState:
    """Apply e^{i*phi*n} on one mode ('a' or 'b'); exactly norm preserving."""
    ns = np.arange(s.n_max + 1)
    phases = np.exp(1j * phi * ns)
    if mode == "a":
        return TwoModeState(s.amps * phases[:, None])
    if mode == "b":
        return TwoModeState(s.amps * phases[None, :])
    raise ValueError(f"mode must be 'a' or 'b', got {mode!r}")


def number_moment(s: TwoModeState, mode: str, order: int = 1) -> float:
    """<n_mode^order> from the marginal photon-number distribution."""
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    p = np.abs(s.amps) ** 2
    marginal = p.sum(axis=1) if mode == "a" else p.sum(axis=0) if mode == "b" else None
    if marginal is None:
        raise ValueError(f"mode must be 'a' or 'b', got {mode!r}")
    n = np.arange(len(marginal), dtype=float)
    return float(np.sum(n**order * marginal))


def mandel_q(s: FockVector) -> float:
    """Mandel Q = (<n^2> - <n>^2)/<n> - 1; zero for Poissonian statistics."""
    p = np.abs(s.amps) ** 2
    n = np.arange(len(p), dtype=float)
    m1 = float(np.sum(n * p))
    if m1 < 1e-14:
        raise ValueError("Mandel Q undefined for (near-)vacuum: <n> < 1e-14")
    m2 = float(np.sum(n * n * p))
    return (m2 - m1 * m1) / m1 - 1.0


def noon_state(n: int, n_max: int) -> TwoModeState:
    """(|n,0> + |0,n>)/sqrt(2); the vacuum for n = 0."""
    if n < 0 or n > n_max:
        raise ValueError("need 0 <= n <= n_max")
    amps = np.zeros((n_max + 1, n_max + 1), dtype=complex)
    if n == 0:
        amps[0, 0] = 1.0
    else:
        amps[n, 0] = amps[0, n] = 1.0 / sqrt(2)
    return TwoModeState(amps)


def extended_entangled_state(n_components: int, alpha: float, n_max: int | None = None) -> TwoModeState:
    """Normalized (|C_N(alpha)>|0> + |0>|C_N(alpha)>), built from cat amplitudes.

    N = 1 gives the entangled coherent state, N = 2 the modified entangled
    state.
    """
    if n_max is None:
        n_max = default_cutoff(abs(alpha))
    c = cat_state(CatSpec(n_components, alpha), n_max).amps
    amps = np.zeros((n_max + 1, n_max + 1), dtype=complex)
    amps[:, 0] += c
    amps[0, :] += c
    return TwoModeState(amps).normalize()


def overlap(s: TwoModeState, t: TwoModeState) -> complex:
    if s.n_max != t.n_max:
        raise ValueError("overlap requires equal cutoffs")
    return complex(np.vdot(s.amps, t.amps))


def fidelity(s: TwoModeState, t: TwoModeState) -> float:
    """|<s|t>|^2 for normalized pure states."""
    return abs(overlap(s, t)) ** 2
