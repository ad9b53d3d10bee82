"""Figure-reproduction sweeps, equal-energy comparison, and the consistency verifier.

Every sweep point is evaluated twice: once from the closed-form module and
once through the truncated-Fock pipeline (state construction -> channels ->
QFI engine), and both rows are emitted.  Curves are parameterized by alpha;
equal-energy comparisons invert N_av(alpha) by bisection on alpha and then
evaluate exactly, never by interpolating delta_phi.
"""

from __future__ import annotations

import sys
import warnings
from dataclasses import dataclass, field
from math import inf, sqrt

import numpy as np

from . import closed_form as cf
from .channels import LossSpec, loss_channel, phase_average
from .fock import (
    CatSpec,
    CutoffError,
    beam_splitter_5050,
    cat_state,
    coherent,
    default_cutoff,
    extended_entangled_state,
    mandel_q,
    noon_state,
    number_moment,
    product_state,
)
from .qfi import DegenerateSpectrumWarning, qfi_mixed, qfi_noon_mixture, qfi_pure

FIGURES = ("fig1", "fig2a", "fig2b", "fig4")

CSV_HEADER = "figure,family,alpha,beta,n_components,transmission,n_av,qfi,delta_phi,path"


def delta_phi(qfi: float) -> float:
    """Single-shot phase uncertainty bound 1/sqrt(F)."""
    return 1.0 / sqrt(qfi) if qfi > 0 else inf


@dataclass(frozen=True)
class SweepRow:
    figure: str
    family: str
    alpha: float
    beta: float | None
    n_components: int | None
    transmission: float
    n_av: float
    qfi: float
    delta_phi: float
    path: str  # closed_form | numeric


@dataclass(frozen=True)
class SweepConfig:
    figure: str
    alpha_grid: tuple
    beta_ratios: tuple = (1.0, 0.5, 0.25, 0.0)
    n_components_list: tuple = (4, 8, 16)
    transmissions: tuple = (0.9, 0.85)

    def __post_init__(self):
        if self.figure not in FIGURES:
            raise ValueError(f"figure must be one of {FIGURES}")
        for name in ("alpha_grid", "beta_ratios", "n_components_list", "transmissions"):
            grid = getattr(self, name)
            if len(grid) == 0:
                raise ValueError(f"{name} must be nonempty")
        if any(b - a <= 0 for a, b in zip(self.alpha_grid, self.alpha_grid[1:])):
            raise ValueError("alpha_grid must be strictly increasing")


def default_config(figure: str) -> SweepConfig:
    """Default grids: fig1 covers N_av up to ~1.4, fig2/fig4 up to ~4."""
    if figure == "fig1":
        grid = np.round(np.arange(0.05, 2.2 + 1e-9, 0.05), 10)
    else:
        grid = np.round(np.arange(0.1, 3.0 + 1e-9, 0.05), 10)
    n_list = (4, 8) if figure == "fig4" else (4, 8, 16)
    return SweepConfig(figure=figure, alpha_grid=tuple(grid), n_components_list=n_list)


# ---------------------------------------------------------------------------
# family curves
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FamilyCurve:
    """One figure curve: a state family at fixed shape parameters, swept in alpha."""

    label: str
    kind: str  # coherent | cat4 | ecs | modified | extended | noon
    variant: str  # pure | phase_averaged
    beta_ratio: float | None = None
    n_components: int | None = None
    transmission: float = 1.0

    @property
    def loss(self) -> LossSpec:
        return LossSpec(self.transmission)


def closed_nav(curve: FamilyCurve, alpha: float) -> float:
    if curve.kind == "coherent":
        return alpha * alpha / 2
    if curve.kind == "cat4":
        return cf.fig1_moments(alpha, curve.beta_ratio * alpha).n_av
    if curve.kind == "ecs":
        return cf.ecs_qfi(alpha)[1]
    if curve.kind == "modified":
        return cf.modified_moments(alpha).n_av
    if curve.kind == "extended":
        return cf.extended_moments(curve.n_components, alpha).n_av
    if curve.kind == "noon":
        return alpha * alpha / 2
    raise ValueError(f"unknown family kind {curve.kind!r}")


def closed_qfi(curve: FamilyCurve, alpha: float) -> float:
    t = curve.transmission
    if curve.variant == "pure":
        if curve.kind == "coherent":
            return 2 * alpha * alpha
        if curve.kind == "cat4":
            return cf.moment_qfi(cf.fig1_moments(alpha, curve.beta_ratio * alpha))
        if curve.kind == "ecs":
            return cf.ecs_qfi(alpha)[0]
        if curve.kind == "modified":
            return cf.moment_qfi(cf.modified_moments(alpha))
        if curve.kind == "extended":
            return cf.moment_qfi(cf.extended_moments(curve.n_components, alpha))
        if curve.kind == "noon":
            return alpha**4
        raise ValueError(f"unknown family kind {curve.kind!r}")
    if curve.kind == "noon":
        # F = T^n n^2 with n = alpha^2, analytically continued in n
        return t ** (alpha * alpha) * alpha**4
    if t == 1.0:
        return cf.pa_qfi(curve.kind, alpha, n_components=curve.n_components)
    mix = cf.lossy_noon_mixture(
        curve.kind, alpha, curve.loss, n_cut=default_cutoff(alpha), n_components=curve.n_components
    )
    return qfi_noon_mixture(mix)


def _noon_integer(alpha: float) -> int | None:
    n = round(alpha * alpha)
    return n if abs(alpha * alpha - n) < 1e-9 else None


def numeric_point(curve: FamilyCurve, alpha: float) -> tuple[float, float] | None:
    """(N_av, QFI) through the truncated-Fock pipeline; None when the family
    has no numeric realization at this alpha (non-integer noon)."""
    if curve.kind == "coherent":
        n_max = default_cutoff(alpha)
        state = product_state(coherent(alpha / sqrt(2), n_max), coherent(alpha / sqrt(2), n_max))
    elif curve.kind == "cat4":
        beta = curve.beta_ratio * alpha
        n_max = default_cutoff(sqrt((alpha * alpha + beta * beta) / 2))
        state = beam_splitter_5050(
            cat_state(CatSpec(4, alpha / sqrt(2)), n_max), coherent(beta / sqrt(2), n_max)
        ).normalize()
    elif curve.kind == "noon":
        n = _noon_integer(alpha)
        if n is None:
            return None
        state = noon_state(n, max(32, n))
    else:
        n_comp = {"ecs": 1, "modified": 2}.get(curve.kind, curve.n_components)
        state = extended_entangled_state(n_comp, alpha)
    nav = number_moment(state, "a", 1)
    if curve.variant == "pure":
        return nav, qfi_pure(state, "one_mode_b")
    mixed = phase_average(state)
    if curve.transmission < 1.0:
        mixed = loss_channel(mixed, curve.loss)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateSpectrumWarning)
        return nav, qfi_mixed(mixed, "n_b")


def figure_curves(cfg: SweepConfig) -> list[FamilyCurve]:
    if cfg.figure == "fig1":
        curves = [
            FamilyCurve("coherent", "coherent", "pure"),
            FamilyCurve("ecs", "ecs", "pure"),
        ]
        for ratio in cfg.beta_ratios:
            label = {1.0: "cat4[b=a]", 0.5: "cat4[b=a/2]", 0.25: "cat4[b=a/4]", 0.0: "cat4[b=0]"}.get(
                ratio, f"cat4[b={ratio}a]"
            )
            curves.append(FamilyCurve(label, "cat4", "pure", beta_ratio=ratio, n_components=4))
        return curves
    variant = "pure" if cfg.figure == "fig2a" else "phase_averaged"
    base = [
        FamilyCurve("noon", "noon", variant),
        FamilyCurve("ecs", "ecs", variant, n_components=1),
        FamilyCurve("modified", "modified", variant, n_components=2),
    ] + [
        FamilyCurve(f"extended[N={n}]", "extended", variant, n_components=n)
        for n in cfg.n_components_list
    ]
    if cfg.figure != "fig4":
        return base
    return [
        FamilyCurve(c.label, c.kind, c.variant, c.beta_ratio, c.n_components, transmission=t)
        for t in cfg.transmissions
        for c in base
    ]


def _make_row(cfg: SweepConfig, curve: FamilyCurve, alpha: float, nav: float, f: float, path: str) -> SweepRow:
    return SweepRow(
        figure=cfg.figure,
        family=curve.label,
        alpha=float(alpha),
        beta=None if curve.beta_ratio is None else curve.beta_ratio * alpha,
        n_components=curve.n_components,
        transmission=curve.transmission,
        n_av=nav,
        qfi=f,
        delta_phi=delta_phi(f),
        path=path,
    )


def run_sweep(cfg: SweepConfig) -> list[SweepRow]:
    """Evaluate each figure curve over the alpha grid by both routes.

    A numeric failure (e.g. cutoff exhaustion) aborts that row with a
    diagnostic on stderr, not the sweep.
    """
    rows: list[SweepRow] = []
    for curve in figure_curves(cfg):
        for alpha in cfg.alpha_grid:
            try:
                rows.append(
                    _make_row(cfg, curve, alpha, closed_nav(curve, alpha), closed_qfi(curve, alpha), "closed_form")
                )
                num = numeric_point(curve, alpha)
                if num is not None:
                    rows.append(_make_row(cfg, curve, alpha, num[0], num[1], "numeric"))
            except (CutoffError, ArithmeticError) as exc:
                print(
                    f"sweep row aborted: {curve.label} alpha={alpha} T={curve.transmission}: {exc}",
                    file=sys.stderr,
                )
    rows.sort(key=lambda r: (r.figure, r.family, r.transmission, r.alpha, r.path))
    return rows


# ---------------------------------------------------------------------------
# equal-energy comparison
# ---------------------------------------------------------------------------


def _curve_from_rows(rows: list[SweepRow], family: str, transmission: float | None) -> tuple[FamilyCurve, list[SweepRow]]:
    sel = [r for r in rows if r.family == family]
    if transmission is not None:
        sel = [r for r in sel if abs(r.transmission - transmission) < 1e-12]
    if not sel:
        raise ValueError(f"no rows for family {family!r}")
    t_values = sorted({r.transmission for r in sel})
    figures = sorted({r.figure for r in sel})
    if len(t_values) > 1 or len(figures) > 1:
        raise ValueError(
            f"family {family!r} is ambiguous in these rows (figures {figures}, T {t_values}); filter first"
        )
    ref = sel[0]
    variant = "pure" if ref.figure in ("fig1", "fig2a") else "phase_averaged"
    kind = family.split("[")[0]
    beta_ratio = None
    if kind == "cat4":
        with_alpha = next(r for r in sel if r.alpha > 0)
        beta_ratio = with_alpha.beta / with_alpha.alpha
    curve = FamilyCurve(
        label=family,
        kind=kind,
        variant=variant,
        beta_ratio=beta_ratio,
        n_components=ref.n_components,
        transmission=ref.transmission,
    )
    closed = sorted((r for r in sel if r.path == "closed_form"), key=lambda r: r.alpha)
    return curve, closed


def _invert_nav(curve: FamilyCurve, closed_rows: list[SweepRow], n_av: float) -> float:
    """Bisection solve of closed_nav(alpha) = n_av over the sampled alpha range."""
    navs = [r.n_av for r in closed_rows]
    if any(b - a <= 0 for a, b in zip(navs, navs[1:])):
        raise ValueError(f"N_av is not monotone in alpha for family {curve.label!r}")
    if not navs[0] <= n_av <= navs[-1]:
        raise ValueError(
            f"N_av={n_av} outside the sampled range [{navs[0]:.6g}, {navs[-1]:.6g}] of {curve.label!r}"
        )
    lo, hi = closed_rows[0].alpha, closed_rows[-1].alpha
    for _ in range(200):
        if hi - lo < 1e-14 * max(1.0, hi):
            break
        mid = 0.5 * (lo + hi)
        if closed_nav(curve, mid) < n_av:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def interpolate_at_nav(rows: list[SweepRow], family: str, n_av: float, transmission: float | None = None) -> float:
    """delta_phi of a family at a requested N_av, by alpha bisection + exact evaluation."""
    curve, closed = _curve_from_rows(rows, family, transmission)
    alpha = _invert_nav(curve, closed, n_av)
    return delta_phi(closed_qfi(curve, alpha))


def find_crossover(
    rows: list[SweepRow],
    family_a: str,
    family_b: str,
    bracket: tuple[float, float],
    transmission: float | None = None,
    tol: float = 1e-4,
) -> float:
    """N_av where the delta_phi curves of two families cross, to `tol` in N_av."""
    lo, hi = bracket

    def gap(n_av: float) -> float:
        return interpolate_at_nav(rows, family_a, n_av, transmission) - interpolate_at_nav(
            rows, family_b, n_av, transmission
        )

    g_lo, g_hi = gap(lo), gap(hi)
    if not g_lo * g_hi < 0:
        raise ValueError(
            f"no sign change of delta_phi({family_a}) - delta_phi({family_b}) over {bracket}"
        )
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        g_mid = gap(mid)
        if g_mid == 0.0:
            return mid
        if g_lo * g_mid < 0:
            hi = mid
        else:
            lo, g_lo = mid, g_mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# consistency verification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    name: str
    params: dict
    expected: float
    actual: float
    error: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.error <= self.tol


@dataclass
class ConsistencyReport:
    checks: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def summary(self) -> str:
        lines = [
            f"{'PASS' if c.passed else 'FAIL'}  {c.name}  {c.params}  "
            f"expected={c.expected:.12g} actual={c.actual:.12g} err={c.error:.3e} tol={c.tol:g}"
            for c in self.checks
        ]
        lines += [f"note  {n}" for n in self.notes]
        lines.append(
            f"{len(self.checks) - len(self.failures)}/{len(self.checks)} checks passed"
        )
        return "\n".join(lines)


def _rel_err(expected: float, actual: float) -> float:
    return abs(expected - actual) / max(abs(expected), 1e-6)


def mandel_q_ratio_gap(n_components: int, alpha: float) -> tuple[float, float]:
    """(F_Q1/N_av of the extended state, 4(1+Q) of its cat): reported, not asserted.

    The two sides coincide only approximately; the vacuum-overlap
    normalization of the entangled state breaks exact equality.
    """
    m = cf.extended_moments(n_components, alpha)
    ratio = cf.moment_qfi(m) / m.n_av
    q = mandel_q(cat_state(CatSpec(n_components, alpha), default_cutoff(alpha)))
    return ratio, 4.0 * (1.0 + q)


def verify_consistency(
    alphas: tuple = (0.25, 0.5, 1.0, 1.5, 2.0, 3.0),
    beta_ratios: tuple = (0.0, 0.25, 0.5, 1.0),
    n_components_list: tuple = (1, 2, 4, 8, 16),
    transmissions: tuple = (0.9, 0.85),
    tol: float = 1e-8,
) -> ConsistencyReport:
    """Closed-form vs truncated-Fock cross-validation over the whole grid.

    Every check compares one quantity produced by the analytic route with
    the same quantity from the independent numeric pipeline.
    """
    report = ConsistencyReport()

    def add(name: str, params: dict, expected: float, actual: float, this_tol: float = tol):
        report.checks.append(
            CheckResult(name, params, expected, actual, _rel_err(expected, actual), this_tol)
        )

    # fig1 entangled states: grid moments vs analytic expressions
    for alpha in alphas:
        for ratio in beta_ratios:
            curve = FamilyCurve("cat4", "cat4", "pure", beta_ratio=ratio, n_components=4)
            nav_n, f_n = numeric_point(curve, alpha)
            add("pure-qfi[cat4]", {"alpha": alpha, "beta_ratio": ratio}, closed_qfi(curve, alpha), f_n)
            add("nav[cat4]", {"alpha": alpha, "beta_ratio": ratio}, closed_nav(curve, alpha), nav_n)

    # pure + phase-averaged + lossy families; points where the QFI itself sits
    # below ~1e-9 are skipped (the state is vacuum to double precision and no
    # trace-1 numeric route can resolve the comparison at the stated metric)
    for alpha in alphas:
        for n_comp in n_components_list:
            kind = {1: "ecs", 2: "modified"}.get(n_comp, "extended")
            label = {1: "ecs", 2: "modified"}.get(n_comp, f"extended[N={n_comp}]")
            pure = FamilyCurve(label, kind, "pure", n_components=n_comp)
            nav_n, f_n = numeric_point(pure, alpha)
            add(f"pure-qfi[{label}]", {"alpha": alpha}, closed_qfi(pure, alpha), f_n)
            add(f"nav[{label}]", {"alpha": alpha}, closed_nav(pure, alpha), nav_n)
            pa = FamilyCurve(label, kind, "phase_averaged", n_components=n_comp)
            mixed_curves = [pa] + [
                FamilyCurve(label, kind, "phase_averaged", n_components=n_comp, transmission=t)
                for t in transmissions
            ]
            for curve in mixed_curves:
                f_cf = closed_qfi(curve, alpha)
                name = "pa-qfi" if curve.transmission == 1.0 else "lossy-qfi"
                params = {"alpha": alpha}
                if curve.transmission < 1.0:
                    params["T"] = curve.transmission
                if f_cf < 1e-9:
                    report.notes.append(
                        f"skipped {name}[{label}] {params}: QFI {f_cf:.3e} below the "
                        "double-precision resolution of a trace-1 state"
                    )
                    continue
                add(f"{name}[{label}]", params, f_cf, numeric_point(curve, alpha)[1])

    # noon exactness (lossless and lossy) at integer n
    for n in (1, 2, 3, 4):
        for t in (1.0,) + tuple(transmissions):
            curve = FamilyCurve("noon", "noon", "phase_averaged", transmission=t)
            alpha = sqrt(float(n))
            add(
                "noon-qfi",
                {"n": n, "T": t},
                t**n * n * n,
                numeric_point(curve, alpha)[1],
                this_tol=1e-12,
            )

    # phase-reference identity: F_q(phase averaged, n_b) = F_Q2(pure, two-mode +-phi/2)
    for alpha in (0.5, 1.5):
        for n_comp, label in ((1, "ecs"), (2, "modified"), (4, "extended[N=4]")):
            state = extended_entangled_state(n_comp, alpha)
            f_q2 = qfi_pure(state, "two_mode_half")
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", DegenerateSpectrumWarning)
                f_pa = qfi_mixed(phase_average(state), "n_b")
            add(f"fq-equals-fq2[{label}]", {"alpha": alpha}, f_q2, f_pa)

    # T = 1 loss path is the identity
    for alpha in (0.5, 1.0):
        pa_curve = FamilyCurve("ecs", "ecs", "phase_averaged", n_components=1)
        lossless = numeric_point(pa_curve, alpha)[1]
        t1 = FamilyCurve("ecs", "ecs", "phase_averaged", n_components=1, transmission=1.0)
        add("t1-identity[ecs]", {"alpha": alpha}, lossless, numeric_point(t1, alpha)[1], this_tol=1e-10)

    for n_comp in (2, 4):
        ratio, four_q = mandel_q_ratio_gap(n_comp, 1.0)
        report.notes.append(
            f"F_Q1/N_av vs 4(1+Q) for N={n_comp}, alpha=1: {ratio:.6f} vs {four_q:.6f} "
            f"(gap {abs(ratio - four_q):.3e}; reported, not asserted)"
        )
    return report


# ---------------------------------------------------------------------------
# output encodings
# ---------------------------------------------------------------------------


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def rows_to_csv(rows: list[SweepRow]) -> str:
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(
            ",".join(
                _fmt(v)
                for v in (
                    r.figure,
                    r.family,
                    r.alpha,
                    r.beta,
                    r.n_components,
                    r.transmission,
                    r.n_av,
                    r.qfi,
                    r.delta_phi,
                    r.path,
                )
            )
        )
    return "\n".join(lines) + "\n"


def rows_to_records(rows: list[SweepRow]) -> list[dict]:
    """JSON-ready records mirroring the CSV schema (non-finite values -> null)."""
    records = []
    for r in rows:
        rec = {
            "figure": r.figure,
            "family": r.family,
            "alpha": _round12(r.alpha),
            "beta": _round12(r.beta),
            "n_components": r.n_components,
            "transmission": _round12(r.transmission),
            "n_av": _round12(r.n_av),
            "qfi": _round12(r.qfi),
            "delta_phi": _round12(r.delta_phi),
            "path": r.path,
        }
        records.append(rec)
    return records


def _round12(value):
    if value is None:
        return None
    if not np.isfinite(value):
        return None
    return float(format(value, ".12g"))
