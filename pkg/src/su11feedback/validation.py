"""Release-gate checks: closed forms, oracle agreement and qualitative behaviour.

Each check returns a :class:`CheckResult`; :func:`run_all` runs them in order.
The tolerances are fixed module constants, but every check accepts its
tolerance as an argument so sensitivity probes can tighten it.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import gaussian
from .experiments import compare_resources, preset, rows_to_csv, run_sweep
from .fock import fock_intensity, fock_qfi, fock_scheme
from .qfi import (
    closed_form_partial_one_pass,
    closed_form_sequential_two_pass,
    closed_form_standard,
    qfi_noisy,
    qfi_pure,
)
from .schemes import SchemeConfig, SchemeKind, build, estimate_period, finite_difference_dstate

__all__ = ["CheckResult", "CHECKS", "run_all", "phi_grid"]

SEQ, PAR, STD, SWAP = (SchemeKind.SEQUENTIAL, SchemeKind.PARTIAL, SchemeKind.STANDARD,
                       SchemeKind.SWAPPING)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail} ({self.seconds:.2f} s)"


def phi_grid(n: int) -> np.ndarray:
    """``n`` phases evenly covering ``[0, 2 pi)``."""
    return 2 * np.pi * np.arange(n) / n


def _qfi(cfg: SchemeConfig, phi: float) -> float:
    out = build(cfg, phi)
    return qfi_pure(out.state, out.dstate).H


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


def check_metric(tol: float = 1e-10) -> CheckResult:
    """Squeezers and phase shifters preserve ``K``, and so do their products."""
    worst = 0.0
    k = gaussian.metric(3)
    for r in (0.0, 0.1, 0.7, 1.5):
        for theta in (0.0, 0.4, np.pi):
            for i, j in ((0, 1), (0, 2), (2, 1)):
                s = gaussian.squeezer_block(gaussian.SqueezeParam(r, theta))
                w = np.eye(6, dtype=complex)
                idx = np.array([2 * i, 2 * i + 1, 2 * j, 2 * j + 1])
                w[np.ix_(idx, idx)] = s
                w = gaussian.phase_shifter(0.3, 3, i).mat @ w
                scale = max(1.0, np.linalg.norm(w, 2) ** 2)
                worst = max(worst, np.max(np.abs(w @ k @ w.conj().T - k)) / scale)
    return CheckResult("metric-preservation", worst <= tol, f"max error {worst:.2e} (tol {tol:g})")


def check_standard(tol: float = 1e-9) -> CheckResult:
    worst = spread = 0.0
    for r in (0.05, 0.1, 0.5):
        vals = np.array([_qfi(SchemeConfig(STD, r=r), p) for p in phi_grid(32)])
        ref = closed_form_standard(r)
        worst = max(worst, np.max(np.abs(vals - ref)) / ref)
        spread = max(spread, (vals.max() - vals.min()) / ref)
    ok = worst <= tol and spread < tol
    return CheckResult("1 standard QFI = sinh^2(2r)", ok,
                       f"max rel err {worst:.2e}, phi spread {spread:.2e} (tol {tol:g})")


def _closed_form_check(name, kind, loops, formula, tol):
    worst, where = 0.0, None
    for r in (0.05, 0.1, 0.5):
        for p in phi_grid(32):
            got = _qfi(SchemeConfig(kind, r=r, loops=loops), p)
            ref = formula(r, p)
            err = abs(got - ref) / max(abs(ref), 1e-300)
            if err > worst:
                worst, where = err, (r, p, got, ref)
    detail = f"max rel err {worst:.3g} (tol {tol:g})"
    if where is not None and worst > tol:
        r, p, got, ref = where
        detail += f"; worst at r={r}, phi={p:.4f}: pipeline {got:.9g} vs formula {ref:.9g}"
    return CheckResult(name, worst <= tol, detail)


def check_sequential_closed_form(tol: float = 1e-9) -> CheckResult:
    return _closed_form_check("2 sequential N=2 closed form", SEQ, 2,
                              closed_form_sequential_two_pass, tol)


def check_partial_closed_form(tol: float = 1e-9) -> CheckResult:
    return _closed_form_check("3 partial N=1 closed form", PAR, 1,
                              closed_form_partial_one_pass, tol)


def check_oracle(int_tol: float = 1e-6, qfi_tol: float = 1e-4) -> CheckResult:
    worst_n = worst_h = 0.0
    for kind in (SEQ, PAR):
        for n in (1, 2, 3):
            for p in (0.0, np.pi / 4, np.pi / 2):
                cfg = SchemeConfig(kind, r=0.1, loops=n)
                out = build(cfg, p)
                fs = fock_scheme(cfg, p)
                worst_n = max(worst_n, np.max(np.abs(fock_intensity(fs) - gaussian.intensity(out.state))))
                worst_h = max(worst_h, _rel(fock_qfi(cfg, p).H, qfi_pure(out.state, out.dstate).H))
    ok = worst_n <= int_tol and worst_h <= qfi_tol
    return CheckResult("4 Fock oracle equivalence", ok,
                       f"intensity abs err {worst_n:.2e} (tol {int_tol:g}), "
                       f"QFI rel err {worst_h:.2e} (tol {qfi_tol:g})")


def check_derivative(tol: float = 1e-6, h: float = 1e-5) -> CheckResult:
    worst = 0.0
    configs = [SchemeConfig(STD, r=0.1)]
    for n in range(1, 11):
        configs += [SchemeConfig(SEQ, r=0.1, loops=n), SchemeConfig(PAR, r=0.1, loops=n),
                    SchemeConfig(SWAP, r=0.1, loops=n, swap_interval=4)]
    for cfg in configs:
        for p in phi_grid(16):
            d = build(cfg, p).dstate
            fd = finite_difference_dstate(cfg, p, h)
            # dstate vanishes identically at phi = pi for even N; floor the scale at 1
            err = np.linalg.norm(d - fd) / max(np.linalg.norm(d), 1.0)
            worst = max(worst, err)
    return CheckResult("5 analytic vs finite-difference dstate", worst <= tol,
                       f"max rel Frobenius err {worst:.2e} (tol {tol:g})")


def _scaled(kind, r, phi, loops):
    return np.array([_qfi(SchemeConfig(kind, r=r, loops=n), phi) / n**2 for n in loops])


def check_scaled_qfi() -> CheckResult:
    phi = np.pi / 4
    seq = _scaled(SEQ, 0.1, phi, range(1, 21))
    par = _scaled(PAR, 0.1, phi, range(1, 11))
    seq_r2 = _scaled(SEQ, 0.2, phi, range(1, 21))
    non_monotone = bool(np.any(np.diff(seq) < 0) and np.any(np.diff(seq) > 0))
    par_up = bool(np.all(np.diff(par) >= 0))
    mean_up = seq_r2.mean() > seq.mean()
    return CheckResult(
        "6 scaled QFI shapes", non_monotone and par_up and mean_up,
        f"sequential oscillates={non_monotone}, partial non-decreasing={par_up}, "
        f"mean(r=0.2)={seq_r2.mean():.4g} > mean(r=0.1)={seq.mean():.4g}: {mean_up}",
    )


def check_loss() -> CheckResult:
    etas = [round(0.1 * i, 1) for i in range(10)]
    parts = []
    ok = True
    for kind in (SEQ, PAR):
        vals = []
        for eta in etas + [1.0]:
            out = build(SchemeConfig(kind, r=0.1, loops=5, eta=eta), np.pi / 4)
            vals.append(qfi_noisy(out.state, out.dstate).H)
        pure = build(SchemeConfig(kind, r=0.1, loops=5), np.pi / 4)
        ratio = qfi_noisy(pure.state, pure.dstate).H / qfi_pure(pure.state, pure.dstate).H
        dec = bool(np.all(np.diff(vals[:-1]) < 0))
        zero = vals[-1] == 0.0
        two = abs(ratio - 2.0) < 1e-12
        ok &= dec and zero and two
        parts.append(f"{kind.value}: decreasing={dec}, H(eta=1)={vals[-1]:g}, noisy/pure={ratio:.15g}")
    return CheckResult("7 loss behaviour", ok, "; ".join(parts))


def check_sensitivity(n_max: int = 12, slack: int = 1) -> CheckResult:
    rows = compare_resources(0.1, np.pi / 4, n_max)
    seq = np.array([row.delta_phi for row in rows if row.scheme == SEQ.value])
    par = np.array([row.delta_phi for row in rows if row.scheme == PAR.value])
    n_min = int(np.argmin(seq)) + 1
    # last N (from 2 on) up to which sequential stays below partial
    below = seq[1:] < par[1:]
    last_below = 1 + int(np.argmin(below)) if not below.all() else n_max
    min_ok = abs(n_min - 4) <= slack
    cross_ok = abs(last_below - 6) <= slack
    return CheckResult(
        "8 sensitivity comparison", min_ok and cross_ok,
        f"sequential delta_phi minimum at N={n_min} (want 4+-{slack}); "
        f"sequential below partial up to N={last_below} (want 6+-{slack})",
    )


def check_swap_interval() -> CheckResult:
    k = estimate_period(SchemeConfig(SEQ, r=0.1), np.pi / 4)
    return CheckResult("9a swap interval estimate", k == 4, f"estimate_period = {k} (want 4)")


def check_swapping(k: int = 4, n_max: int = 16) -> CheckResult:
    phi = np.pi / 4
    ints, hs = [], []
    for n in range(k, n_max + 1, k):
        out = build(SchemeConfig(SWAP, r=0.1, loops=n, swap_interval=k), phi)
        ints.append(gaussian.intensity(out.state)[0])
        hs.append(qfi_pure(out.state, out.dstate).H)
    seq = build(SchemeConfig(SEQ, r=0.1, loops=n_max), phi)
    seq_int = gaussian.intensity(seq.state)[0]
    seq_h = qfi_pure(seq.state, seq.dstate).H
    grow = bool(np.all(np.diff(ints) > 0) and np.all(np.diff(hs) > 0))
    beat = ints[-1] > seq_int and hs[-1] > seq_h
    return CheckResult(
        "9b swapping growth", grow and beat,
        f"block-end intensities {np.round(ints, 4).tolist()}, QFI {np.round(hs, 2).tolist()}; "
        f"N={n_max}: swap ({ints[-1]:.4g}, {hs[-1]:.4g}) vs sequential ({seq_int:.4g}, {seq_h:.4g})",
    )


def check_fig7(budget: float = 10.0) -> CheckResult:
    spec = preset("fig7")
    t0 = time.perf_counter()
    first = rows_to_csv(run_sweep(spec), spec.precision)
    elapsed = time.perf_counter() - t0
    second = rows_to_csv(run_sweep(spec), spec.precision)
    same = first == second
    n = first.count("\n") - 1
    return CheckResult("10 fig7 determinism and runtime", same and elapsed < budget,
                       f"{n} rows in {elapsed:.2f} s (budget {budget:g} s), identical={same}")


CHECKS: list[Callable[[], CheckResult]] = [
    check_metric,
    check_standard,
    check_sequential_closed_form,
    check_partial_closed_form,
    check_oracle,
    check_derivative,
    check_scaled_qfi,
    check_loss,
    check_sensitivity,
    check_swap_interval,
    check_swapping,
    check_fig7,
]


def run_check(fn: Callable[[], CheckResult]) -> CheckResult:
    t0 = time.perf_counter()
    try:
        res = fn()
    except Exception as exc:  # a crashing check is a failed check
        res = CheckResult(fn.__name__, False, f"{type(exc).__name__}: {exc}")
    res.seconds = time.perf_counter() - t0
    res.passed = bool(res.passed)
    return res


def run_all() -> list[CheckResult]:
    return [run_check(fn) for fn in CHECKS]
