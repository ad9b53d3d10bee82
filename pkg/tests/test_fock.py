"""Fock-layer tests: constructors, beam splitter, phase shift, moments.

Expected values are produced by test-local oracles (direct series sums,
coherent-state algebra) rather than by the functions under test.
"""

from math import cos, exp, factorial, fsum, lgamma, log, pi, sqrt

import numpy as np
import pytest

from catqfi import closed_form as cf
from catqfi.fock import (
    CatSpec,
    CutoffError,
    FockVector,
    beam_splitter_5050,
    cat_state,
    coherent,
    extended_entangled_state,
    fidelity,
    mandel_q,
    noon_state,
    number_moment,
    phase_shift,
    product_state,
    truncation_bound,
)


def poisson_tail(n_max: int, lam: float) -> float:
    """Direct Poisson tail sum P(X > n_max), smallest terms gathered by fsum."""
    return fsum(
        exp(-lam + n * log(lam) - lgamma(n + 1)) for n in range(n_max + 1, n_max + 500)
    )


# ---------------------------------------------------------------------------
# coherent states
# ---------------------------------------------------------------------------


def test_coherent_vacuum():
    vec = coherent(0.0, 32)
    assert vec.amps[0] == 1.0
    assert np.all(vec.amps[1:] == 0)


def test_coherent_amplitude_direct_formula():
    vec = coherent(1.0, 32)
    assert abs(vec.amps[2] - exp(-0.5) / sqrt(2)) < 1e-15
    assert abs(vec.amps[2].imag) == 0.0


def test_coherent_mean_photon():
    for alpha in (0.7, 1.3 + 0.4j, 2.5):
        vec = coherent(alpha, 64)
        a2 = abs(alpha) ** 2
        assert abs(vec.moment(1) - a2) < 1e-10
        assert abs(vec.moment(2) - (a2 * a2 + a2)) < 1e-10


def test_coherent_complex_phase():
    vec = coherent(1.0j, 32)
    assert abs(vec.amps[1] - 1.0j * exp(-0.5)) < 1e-15


def test_coherent_cutoff_too_small():
    with pytest.raises(CutoffError):
        coherent(3.0, 12)


def test_norm_after_normalize():
    vec = coherent(1.7, 48).normalize()
    assert abs(vec.norm_sq() - 1.0) <= 1e-12


# ---------------------------------------------------------------------------
# truncation bound
# ---------------------------------------------------------------------------


def test_truncation_bound_floor():
    assert truncation_bound(0.0) == 32
    # Poisson(1) crosses 1e-12 at n = 14, below the floor
    assert truncation_bound(1.0, 1e-12) == 32


def test_truncation_bound_tail_oracle():
    for alpha in (2.0, 3.0):
        bound = truncation_bound(alpha, 1e-12)
        lam = alpha * alpha
        assert poisson_tail(bound, lam) <= 1e-12
        if bound > 32:
            assert poisson_tail(bound - 1, lam) > 1e-12


def test_truncation_bound_monotone():
    assert truncation_bound(2.0) >= truncation_bound(1.0)
    assert truncation_bound(3.0) >= truncation_bound(2.0)


# ---------------------------------------------------------------------------
# cat states
# ---------------------------------------------------------------------------


def test_cat_single_component_is_coherent():
    cat = cat_state(CatSpec(1, 0.9), 40)
    coh = coherent(0.9, 40)
    assert np.max(np.abs(cat.amps - coh.amps)) < 1e-14


def test_cat_alpha_zero_is_vacuum():
    cat = cat_state(CatSpec(2, 0.0), 32)
    assert cat.amps[0] == 1.0
    assert np.all(cat.amps[1:] == 0)


def test_cat_support_on_multiples():
    cat = cat_state(CatSpec(3, 1.2), 40)
    nonzero = np.nonzero(cat.amps)[0]
    assert np.all(nonzero % 3 == 0)


def test_cat4_amplitudes_vs_series_oracle():
    # |alpha|^2 = 2: normalization from the direct overlap series,
    # cross-checked against 4[1 + e^{-2a} + 2 e^{-a} cos a]
    a2 = 2.0
    alpha = sqrt(a2)
    m4_series = 16 * exp(-a2) * fsum(a2 ** (4 * n) / factorial(4 * n) for n in range(30))
    m4_closed = 4 * (1 + exp(-2 * a2) + 2 * exp(-a2) * cos(a2))
    assert abs(m4_series - m4_closed) < 1e-13
    cat = cat_state(CatSpec(4, alpha), 40)
    for n in range(0, 4):
        expected = 4 * exp(-a2 / 2) / sqrt(m4_series) * alpha ** (4 * n) / sqrt(factorial(4 * n))
        assert abs(cat.amps[4 * n] - expected) < 1e-12


def test_cat_equals_coherent_superposition():
    # Sum of N coherent vectors at evenly spaced phases, normalized numerically
    N, alpha = 3, 0.9
    total = np.zeros(41, dtype=complex)
    for k in range(N):
        total += coherent(alpha * np.exp(2j * pi * k / N), 40).amps
    total /= np.linalg.norm(total)
    cat = cat_state(CatSpec(N, alpha), 40)
    assert abs(np.vdot(total, cat.amps)) ** 2 > 1 - 1e-12


def test_cat_mean_photon_two_routes():
    # grid moment vs term-wise series over the cat's own support
    N, alpha = 4, 1.3
    a2 = alpha * alpha
    weights = [
        (n, exp(-a2 + n * log(a2) - lgamma(n + 1)) if n else exp(-a2))
        for n in range(0, 120, N)
    ]
    z = fsum(w for _, w in weights)
    mean_series = fsum(n * w for n, w in weights) / z
    cat = cat_state(CatSpec(N, alpha), 48)
    assert cat.moment(1) == pytest.approx(mean_series, abs=1e-10)


def test_cat_is_nth_order_annihilation_eigenstate():
    N, alpha = 4, 1.1
    cat = cat_state(CatSpec(N, alpha), 48)
    amps = cat.amps.copy()
    for _ in range(N):
        lowered = np.zeros_like(amps)
        ns = np.arange(len(amps) - 1)
        lowered[:-1] = np.sqrt(ns + 1.0) * amps[1:]
        amps = lowered
    # a^N |C_N> = alpha^N |C_N> on the retained grid
    expect = alpha**N * cat.amps
    assert np.max(np.abs(amps[:-N] - expect[:-N])) < 1e-10


# ---------------------------------------------------------------------------
# beam splitter
# ---------------------------------------------------------------------------


def test_beam_splitter_vacuum():
    vac = coherent(0.0, 16)
    out = beam_splitter_5050(vac, vac)
    assert abs(out.amps[0, 0] - 1.0) < 1e-14
    assert out.norm_sq() == pytest.approx(1.0, abs=1e-12)


def test_beam_splitter_coherent_branches():
    # |alpha/sqrt2>|beta/sqrt2> -> |(beta+alpha)/2>|(beta-alpha)/2>
    alpha, beta = 1.0, 0.5
    out = beam_splitter_5050(coherent(alpha / sqrt(2), 32), coherent(beta / sqrt(2), 32))
    target = product_state(coherent((beta + alpha) / 2, 32), coherent((beta - alpha) / 2, 32))
    assert fidelity(target, out) > 1 - 1e-10
    assert abs(out.norm_sq() - 1.0) < 1e-10


def test_beam_splitter_dimension_mismatch():
    with pytest.raises(ValueError):
        beam_splitter_5050(coherent(0.3, 16), coherent(0.3, 20))


def test_beam_splitter_preserves_sector_masses():
    a = cat_state(CatSpec(2, 0.8), 32)
    b = coherent(0.6, 32)
    before = product_state(a, b)
    after = beam_splitter_5050(a, b)

    def sector_masses(state):
        p = np.abs(state.amps) ** 2
        masses = np.zeros(2 * state.n_max + 1)
        for i in range(state.n_max + 1):
            for j in range(state.n_max + 1):
                masses[i + j] += p[i, j]
        return masses

    assert np.max(np.abs(sector_masses(before) - sector_masses(after))) < 1e-10


def test_beam_splitter_cat_moment_matches_closed_form():
    alpha = beta = 1.0
    out = beam_splitter_5050(
        cat_state(CatSpec(4, alpha / sqrt(2)), 40), coherent(beta / sqrt(2), 40)
    )
    assert number_moment(out, "b", 1) == pytest.approx(cf.fig1_moments(alpha, beta).mean_nb, abs=1e-10)


# ---------------------------------------------------------------------------
# phase shift and moments
# ---------------------------------------------------------------------------


def test_phase_shift_identity_and_period():
    state = beam_splitter_5050(coherent(0.7, 24), coherent(0.4, 24))
    assert np.max(np.abs(phase_shift(state, "b", 0.0).amps - state.amps)) == 0.0
    assert np.max(np.abs(phase_shift(state, "b", 2 * pi).amps - state.amps)) < 1e-12


def test_phase_shift_additive_composition():
    state = beam_splitter_5050(coherent(0.7, 24), coherent(0.4, 24))
    once = phase_shift(phase_shift(state, "a", 0.3), "a", 0.9)
    combined = phase_shift(state, "a", 1.2)
    assert np.max(np.abs(once.amps - combined.amps)) < 1e-15


def test_phase_shift_noon_component():
    n = 3
    state = noon_state(n, 16)
    shifted = phase_shift(state, "b", 0.37)
    assert shifted.amps[n, 0] == pytest.approx(1 / sqrt(2))
    assert shifted.amps[0, n] == pytest.approx(np.exp(1j * n * 0.37) / sqrt(2))


def test_number_moment_vacuum_and_coherent():
    vac = product_state(coherent(0.0, 16), coherent(0.0, 16))
    assert number_moment(vac, "a", 1) == 0.0
    assert number_moment(vac, "b", 2) == 0.0
    a2 = 1.3**2
    state = product_state(coherent(1.3, 40), coherent(0.0, 40))
    assert number_moment(state, "a", 1) == pytest.approx(a2, abs=1e-10)
    assert number_moment(state, "a", 2) == pytest.approx(a2 * a2 + a2, abs=1e-10)


def test_number_moment_ecs_nav():
    # N_av = |alpha|^2 / (2 (1 + e^{-|alpha|^2})) at |alpha|^2 = 1
    ecs = extended_entangled_state(1, 1.0)
    expected = 1.0 / (2 * (1 + exp(-1.0)))
    assert number_moment(ecs, "a", 1) == pytest.approx(expected, abs=1e-10)
    assert expected == pytest.approx(0.36552928931500245, abs=1e-15)


# ---------------------------------------------------------------------------
# Mandel Q
# ---------------------------------------------------------------------------


def test_mandel_q_coherent_poissonian():
    assert abs(mandel_q(coherent(1.3, 48))) < 1e-10


def test_mandel_q_fock_state():
    amps = np.zeros(16, dtype=complex)
    amps[5] = 1.0
    assert mandel_q(FockVector(amps)) == pytest.approx(-1.0, abs=1e-14)


def test_mandel_q_vacuum_undefined():
    with pytest.raises(ValueError):
        mandel_q(coherent(0.0, 16))


def test_mandel_q_cat2_series_oracle():
    # brute-force moments over the even-photon Poisson profile of a 2HCS
    a = 1.0
    weights = [(n, exp(-a) * a**n / factorial(n)) for n in range(0, 120, 2)]
    z = fsum(w for _, w in weights)
    m1 = fsum(n * w for n, w in weights) / z
    m2 = fsum(n * n * w for n, w in weights) / z
    expected = (m2 - m1 * m1) / m1 - 1.0
    assert mandel_q(cat_state(CatSpec(2, 1.0), 40)) == pytest.approx(expected, abs=1e-10)


# ---------------------------------------------------------------------------
# entangled-state builders
# ---------------------------------------------------------------------------


def test_noon_state_layout():
    state = noon_state(4, 16)
    assert state.amps[4, 0] == pytest.approx(1 / sqrt(2))
    assert state.amps[0, 4] == pytest.approx(1 / sqrt(2))
    assert state.norm_sq() == pytest.approx(1.0)
    assert noon_state(0, 8).amps[0, 0] == 1.0


def test_extended_state_n1_matches_manual_ecs():
    alpha, n_max = 1.0, 40
    c = coherent(alpha, n_max).amps
    manual = np.zeros((n_max + 1, n_max + 1), dtype=complex)
    manual[:, 0] += c
    manual[0, :] += c
    manual /= np.linalg.norm(manual)
    built = extended_entangled_state(1, alpha, n_max)
    assert abs(np.vdot(manual, built.amps)) ** 2 > 1 - 1e-12
