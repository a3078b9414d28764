"""Self-test suite: ten numbered end-to-end checks of the whole package.

Each check returns a :class:`CriterionResult` with a one-line detail string;
``run_all`` executes any subset.  The CLI ``selftest`` subcommand and the
test suite both call these functions, so there is exactly one definition of
what "working" means.

Simulation results are memoized per process: several checks share the same
parameter grid (the efficiency grid doubles as the fidelity and the energy
bookkeeping grid), and re-running a full grid of integrations per check
would triple the wall time for no information.
"""

from __future__ import annotations

import math
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import analytic
from .config import (
    MediumSpec,
    OutputSpec,
    QubitSpec,
    RunConfig,
    ScheduleSpec,
    SweepAxis,
    SweepSpec,
)
from .dynamics import ProtocolSchedule, RunResult, recall_params, run_protocol
from .medium import LONGITUDINAL, TRANSVERSE, MediumConfig
from .metrics import analyze, energy_closure, measure_efficiency
from .qubit import FieldRecord, TimeBinQubit, make_qubit
from .runner import sweep_run

__all__ = ["CriterionResult", "run_all", "CRITERIA"]


@dataclass(frozen=True)
class CriterionResult:
    number: int
    label: str
    passed: bool
    detail: str

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} criterion {self.number:2d} [{self.label}]: {self.detail}"


# ---------------------------------------------------------------------------
# shared run cache


_CACHE: dict = {}

_GRID_T1 = 12.0
_GRID_TAU_O = 5.0
_GRID_ALPHA = math.sqrt(0.7)
_GRID_BETA = math.sqrt(0.3)
_GRID_PHI = 0.9

_TIMING_T1 = 14.0
_ETAS = (0.5, 1.0, 2.0, 4.0)
_DEPTHS = (1.0, 2.0, 4.0)
_KAPPAS = (math.pi / 2, math.pi, 4 * math.pi)   # effective depth 2*pi*zeta/chi


def _grid_qubit() -> TimeBinQubit:
    return make_qubit(_GRID_ALPHA, _GRID_BETA, _GRID_PHI, _GRID_TAU_O)


def _basis_qubit() -> TimeBinQubit:
    return make_qubit(1.0, 0.0, 0.0, _GRID_TAU_O)


def _cached_run(key, builder):
    if key not in _CACHE:
        _CACHE[key] = builder()
    return _CACHE[key]


def _transverse_run(
    eta: float,
    depth: float,
    delta_k_L: float = 0.0,
    gamma_eg: float = 0.0,
    nt: int = 4096,
) -> RunResult:
    key = ("t", eta, depth, delta_k_L, gamma_eg, nt)

    def build():
        qubit = _grid_qubit()
        medium = MediumConfig(
            kind=TRANSVERSE,
            delta_inh=10.0,
            alpha_o_L=depth,
            gamma_eg=gamma_eg,
            delta_k_L=delta_k_L,
        )
        schedule = ProtocolSchedule(t1=_GRID_T1, eta=eta, nt=nt)
        return run_protocol(qubit, medium, schedule)

    return _cached_run(key, build)


def _longitudinal_run(eta: float, zeta_over_chi: float) -> RunResult:
    key = ("l", eta, zeta_over_chi)

    def build():
        qubit = _grid_qubit()
        medium = MediumConfig(
            kind=LONGITUDINAL, delta_inh=10.0, zeta_over_chi=zeta_over_chi
        )
        schedule = ProtocolSchedule(t1=_GRID_T1, eta=eta)
        return run_protocol(qubit, medium, schedule)

    return _cached_run(key, build)


def _shape_l2(a: FieldRecord, b_t: np.ndarray, b_a: np.ndarray) -> float:
    """L2 distance between unit-energy, phase-aligned envelope shapes."""
    b = np.interp(a.t, b_t, b_a.real) + 1j * np.interp(a.t, b_t, b_a.imag)
    ua = a.a / math.sqrt(float(np.sum(np.abs(a.a) ** 2)) * a.dt)
    nb = math.sqrt(float(np.sum(np.abs(b) ** 2)) * a.dt)
    if nb == 0.0:
        return 1.0
    ub = b / nb
    ov = np.sum(np.conj(ua) * ub) * a.dt
    phase = ov / abs(ov) if abs(ov) > 0 else 1.0
    return float(np.sqrt(np.sum(np.abs(ua * phase - ub) ** 2) * a.dt))


# ---------------------------------------------------------------------------
# criteria


def criterion_1() -> CriterionResult:
    """Symmetric recall: deep transverse medium at eta=1 returns the input."""
    qubit = _grid_qubit()
    medium = MediumConfig(kind=TRANSVERSE, delta_inh=10.0, alpha_o_L=6.0)
    schedule = ProtocolSchedule(t1=16.0, eta=1.0)
    start = time.perf_counter()
    result = run_protocol(qubit, medium, schedule)
    elapsed = time.perf_counter() - start

    eps = measure_efficiency(result)
    exact = (1.0 - math.exp(-6.0)) ** 2
    rel = abs(eps / exact - 1.0)

    # At eta=1 the echo is the time-reversed input (bins swapped by the
    # reversal), i.e. input envelope evaluated at 2*t1 - t.
    reversed_a = np.interp(
        2 * schedule.t1 - result.echo.t, result.input.t, result.input.a.real
    ) + 1j * np.interp(
        2 * schedule.t1 - result.echo.t, result.input.t, result.input.a.imag
    )
    l2 = _shape_l2(result.echo, result.echo.t, reversed_a)

    passed = rel <= 0.02 and l2 <= 0.02 and elapsed < 10.0
    detail = (
        f"efficiency {eps:.5f} vs {exact:.5f} ({100 * rel:.3f}% off, <=2%), "
        f"reversed-input shape L2 {l2:.1e} (<=2e-2), runtime {elapsed:.1f}s (<10s)"
    )
    return CriterionResult(1, "symmetric recall", passed, detail)


def criterion_2() -> CriterionResult:
    """Mode-overlap efficiency: 50% points and compression symmetry."""
    roots = (3.0 + 2.0 * math.sqrt(2.0), 3.0 - 2.0 * math.sqrt(2.0))
    half_err = max(abs(analytic.epsilon_o(r) - 0.5) for r in roots)
    sym_err = 0.0
    for eta in (0.1, 0.25, 0.5, 2.0, 4.0, 10.0):
        a, b = analytic.epsilon_o(eta), analytic.epsilon_o(1.0 / eta)
        sym_err = max(sym_err, abs(a - b) / a)
    passed = half_err <= 1e-12 and sym_err <= 1e-14
    detail = (
        f"|eps(3+-2sqrt2)-1/2| = {half_err:.1e} (<=1e-12), "
        f"eta<->1/eta asymmetry {sym_err:.1e} (<=1e-14)"
    )
    return CriterionResult(2, "efficiency symmetry", passed, detail)


def criterion_3() -> CriterionResult:
    """Gain crosses unity near eta=1.7 and saturates at the deep-medium limit."""

    def gain(eta: float, depth: float) -> float:
        p = analytic.TransverseParams(eta=eta, alpha_o_L=depth, t1=1.0)
        return analytic.gain_transverse(p, 1.0, 0.0)

    lo, hi = 1.0, 3.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if gain(mid, 2.0) < 1.0:
            lo = mid
        else:
            hi = mid
    crossing = 0.5 * (lo + hi)

    g_100 = gain(100.0, 20.0)
    limit_100 = analytic.gain_transverse_infinite_depth(100.0)
    rel_limit = abs(g_100 / limit_100 - 1.0)
    g_deep = gain(250.0, 40.0)
    rel_four = abs(g_deep / 4.0 - 1.0)

    passed = abs(crossing - 1.7) <= 0.05 and rel_limit <= 0.01 and rel_four <= 0.01
    detail = (
        f"gain=1 at eta={crossing:.3f} (1.7+-0.05); at eta=100, depth 20: "
        f"{g_100:.4f} vs limit {limit_100:.4f} ({100 * rel_limit:.3f}% off); "
        f"at eta=250, depth 40: {g_deep:.4f} vs 4 ({100 * rel_four:.2f}% off, <=1%)"
    )
    return CriterionResult(3, "gain thresholds", passed, detail)


def _transverse_rel_err(eta: float, depth: float, nt: int) -> float:
    result = _transverse_run(eta, depth, nt=nt)
    p = analytic.TransverseParams(eta=eta, alpha_o_L=depth, t1=_GRID_T1)
    exact = analytic.efficiency_transverse(p)
    return abs(measure_efficiency(result) / exact - 1.0)


def criterion_4() -> CriterionResult:
    """Transverse efficiency grid vs closed form, with grid-halving trend."""
    start = time.perf_counter()
    worst = 0.0
    non_monotone = []
    for eta in _ETAS:
        for depth in _DEPTHS:
            errs = [_transverse_rel_err(eta, depth, nt) for nt in (2048, 4096, 8192)]
            worst = max(worst, errs[1])
            if not (errs[0] > errs[1] > errs[2]):
                non_monotone.append((eta, depth, errs))
    elapsed = time.perf_counter() - start
    passed = worst <= 0.03 and not non_monotone and elapsed < 300.0
    detail = (
        f"12-point grid worst rel err {100 * worst:.2f}% (<=3%), residuals shrink "
        f"under step halving at {12 - len(non_monotone)}/12 points, "
        f"runtime {elapsed:.0f}s (<300s)"
    )
    return CriterionResult(4, "transverse efficiency grid", passed, detail)


def criterion_5() -> CriterionResult:
    """Longitudinal efficiency grid vs closed form + small-depth equivalence."""
    worst = 0.0
    for eta in _ETAS:
        for kappa in _KAPPAS:
            zeta = kappa / (2 * math.pi)
            result = _longitudinal_run(eta, zeta)
            p = analytic.LongitudinalParams(
                eta=eta, zeta_over_chi=zeta, delta_inh=10.0, t1=_GRID_T1
            )
            exact = analytic.efficiency_longitudinal(p)
            worst = max(worst, abs(measure_efficiency(result) / exact - 1.0))

    # Small effective depth: both broadening geometries store and recall
    # with the same efficiency, whose kappa->0 limit is kappa^2/eta.
    kappa, eta = 0.1 * math.pi, 2.0
    eps_l = measure_efficiency(_longitudinal_run(eta, kappa / (2 * math.pi)))
    eps_t = measure_efficiency(_transverse_run(eta, kappa))
    equiv = abs(eps_l / eps_t - 1.0)
    ratios = []
    for k in (kappa, 0.03 * math.pi, 0.01 * math.pi, 0.003 * math.pi):
        p = analytic.LongitudinalParams(
            eta=eta, zeta_over_chi=k / (2 * math.pi), delta_inh=10.0, t1=_GRID_T1
        )
        ratios.append(abs(analytic.efficiency_longitudinal(p) / (k * k / eta) - 1.0))
    limit_ok = all(a > b for a, b in zip(ratios, ratios[1:])) and ratios[-1] <= 0.10

    passed = worst <= 0.05 and equiv <= 0.10 and limit_ok
    detail = (
        f"12-point grid worst rel err {100 * worst:.2f}% (<=5%); small-depth "
        f"scheme equivalence {100 * equiv:.2f}% (<=10%); kappa^2/eta deviation "
        f"falls {' -> '.join(f'{100 * r:.1f}%' for r in ratios)} as kappa -> 0"
    )
    return CriterionResult(5, "longitudinal efficiency grid", passed, detail)


def criterion_6() -> CriterionResult:
    """Worked per-bin frequency-pull number at the reference operating point."""
    p = analytic.LongitudinalParams(
        eta=3.0, zeta_over_chi=1.0, delta_inh=10.0, t1=20.0, tau_o=2.0
    )
    early, late = analytic.freq_shifts(p)
    dt_seconds = 100e-9
    split_hz = abs(early - late) / dt_seconds / (2 * math.pi)
    rel = abs(split_hz / 17.32e3 - 1.0)
    passed = rel <= 0.01
    detail = (
        f"|bin frequency split| = {split_hz / 1e3:.4f} kHz vs 17.32 kHz "
        f"({100 * rel:.3f}% off, <=1%)"
    )
    return CriterionResult(6, "frequency-pull number", passed, detail)


def criterion_7() -> CriterionResult:
    """Fidelity >= 0.99 after the optimal deterministic rotation."""
    qubit = _grid_qubit()
    worst_t = 1.0
    flips = 0
    for eta in _ETAS:
        for depth in _DEPTHS:
            for dk in (0.0, math.pi / 2):
                for gam in (0.0, 0.02):
                    result = _transverse_run(eta, depth, dk, gam)
                    medium = MediumConfig(
                        kind=TRANSVERSE,
                        delta_inh=10.0,
                        alpha_o_L=depth,
                        gamma_eg=gam,
                        delta_k_L=dk,
                    )
                    schedule = ProtocolSchedule(t1=_GRID_T1, eta=eta)
                    report = analyze(result, qubit, recall_params(medium, schedule, qubit))
                    worst_t = min(worst_t, report.fidelity)
                    flips += report.bit_flip_applied

    # Longitudinal spot check at the criterion-6 operating point.  That
    # point's bin separation (2 bin widths) is below the constructor's
    # distinguishability floor, so the run uses the smallest legal
    # separation (4 widths), which only enlarges the inter-bin phase error
    # the rotation has to absorb.
    q6 = make_qubit(_GRID_ALPHA, _GRID_BETA, _GRID_PHI, 4.0)
    medium = MediumConfig(kind=LONGITUDINAL, delta_inh=10.0, zeta_over_chi=1.0)
    schedule = ProtocolSchedule(t1=20.0, eta=3.0)
    result = run_protocol(q6, medium, schedule)
    report_l = analyze(result, q6, recall_params(medium, schedule, q6))

    passed = worst_t >= 0.99 and report_l.fidelity >= 0.99 and flips == 0
    detail = (
        f"48-point transverse grid worst F {worst_t:.4f} (>=0.99, "
        f"{flips} spurious bit flips); longitudinal spot F {report_l.fidelity:.4f}"
    )
    return CriterionResult(7, "fidelity after optimal rotation", passed, detail)


def criterion_8() -> CriterionResult:
    """Echo centroid lands at (1+1/eta)*t1; gradient phase-mismatch delay."""
    qubit = _basis_qubit()
    worst_steps = 0.0
    for eta in (0.5, 1.0, 2.0, 3.0):
        for kind in (TRANSVERSE, LONGITUDINAL):
            if kind == TRANSVERSE:
                medium = MediumConfig(kind=kind, delta_inh=20.0, alpha_o_L=1.0)
                schedule = ProtocolSchedule(
                    t1=_TIMING_T1, eta=eta, nt=2560, n_nodes=401
                )
            else:
                medium = MediumConfig(kind=kind, delta_inh=10.0, zeta_over_chi=0.02)
                schedule = ProtocolSchedule(t1=_TIMING_T1, eta=eta, nt=2560)
            result = run_protocol(qubit, medium, schedule)
            step = result.echo.dt
            base = (1.0 + 1.0 / eta) * _TIMING_T1
            worst_steps = max(worst_steps, abs(result.echo_peak_time - base) / step)

    medium = MediumConfig(
        kind=LONGITUDINAL, delta_inh=10.0, zeta_over_chi=0.5, delta_k_L=40.0
    )
    schedule = ProtocolSchedule(t1=_TIMING_T1, eta=2.0, nt=4096)
    result = run_protocol(qubit, medium, schedule)
    p = recall_params(medium, schedule, qubit)
    base = (1.0 + 1.0 / schedule.eta) * _TIMING_T1
    shifted = base + p.timing_shift
    dk_steps = abs(result.echo_peak_time - shifted) / result.echo.dt

    passed = worst_steps <= 1.0 and dk_steps <= 2.0
    detail = (
        f"centroid vs (1+1/eta)*t1 worst |offset| {worst_steps:.2f} steps (<=1) "
        f"over 4 compressions x 2 media; phase-mismatch delay off by "
        f"{dk_steps:.2f} steps (<=2) at delay 2 bin widths"
    )
    return CriterionResult(8, "echo timing", passed, detail)


def criterion_9() -> CriterionResult:
    """Lossless runs: four energy channels sum to the input energy."""
    worst = 0.0
    for eta in _ETAS:
        for depth in _DEPTHS:
            worst = max(worst, abs(energy_closure(_transverse_run(eta, depth)) - 1.0))
        for kappa in _KAPPAS:
            run = _longitudinal_run(eta, kappa / (2 * math.pi))
            worst = max(worst, abs(energy_closure(run) - 1.0))
    passed = worst <= 1e-2
    detail = f"worst |closure-1| = {worst:.1e} (<=1e-2) over all 24 grid runs"
    return CriterionResult(9, "energy bookkeeping", passed, detail)


def _phase_surface_config(eta_lo, eta_hi, out_name) -> RunConfig:
    return RunConfig(
        qubit=QubitSpec(alpha=1.0, beta=0.0, phi=0.0, tau_o=2.0),
        medium=MediumSpec(kind=LONGITUDINAL, delta_inh=10.0, zeta_over_chi=3.0),
        schedule=ScheduleSpec(t1=20.0, eta=2.0),
        sweep=SweepSpec(
            axis1=SweepAxis("tau_o", 0.5, 4.0, 8, "linear"),
            axis2=SweepAxis("eta", eta_lo, eta_hi, 8, "log"),
            metric="phase_diff",
        ),
        output=OutputSpec(path=out_name),
    )


def criterion_10(out_dir=None) -> CriterionResult:
    """Inter-bin phase surfaces: emitted, vanish at eta=1, shrink with t1."""
    base = Path(out_dir) if out_dir is not None else Path(tempfile.mkdtemp())
    emitted = []
    for name, lo, hi in (
        ("phase_surface_compression", 1.25, 4.0),
        ("phase_surface_decompression", 0.25, 0.8),
    ):
        art = sweep_run(_phase_surface_config(lo, hi, name), out_dir=base / name)
        ok = art.files["sweep"].exists() and art.rows == 64
        emitted.append(ok)

    def diff(eta, tau_o, t1):
        p = analytic.LongitudinalParams(
            eta=eta, zeta_over_chi=3.0, delta_inh=10.0, t1=t1, tau_o=tau_o
        )
        return analytic.phase_diff_01(p)

    near_one = max(abs(diff(1.0 + s * 1e-4, 2.0, 20.0)) for s in (-1.0, 1.0))

    attenuated = True
    for tau_o in np.linspace(0.5, 4.0, 8):
        for eta in list(np.geomspace(1.25, 4.0, 8)) + list(np.geomspace(0.25, 0.8, 8)):
            v20 = abs(diff(eta, float(tau_o), 20.0))
            v40 = abs(diff(eta, float(tau_o), 40.0))
            attenuated = attenuated and v40 < v20

    passed = all(emitted) and near_one < 1e-3 and attenuated
    detail = (
        f"two 64-row surfaces under {base}; |phase diff| at eta=1+-1e-4 = "
        f"{near_one:.1e} (<1e-3); farther switch time attenuates the surface "
        f"pointwise: {attenuated}"
    )
    return CriterionResult(10, "inter-bin phase surfaces", passed, detail)


CRITERIA = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
    10: criterion_10,
}


def run_all(numbers=None, out_dir=None) -> list[CriterionResult]:
    """Run the requested criteria (all by default) in numeric order."""
    selected = sorted(numbers) if numbers else sorted(CRITERIA)
    results = []
    for n in selected:
        if n not in CRITERIA:
            raise ValueError(f"no criterion number {n}")
        check = CRITERIA[n]
        results.append(check(out_dir) if n == 10 else check())
    return results
