"""Self-contained verification suites behind ``ntk verify``.

Each suite cross-checks a fast code path against one of the brute-force
oracles on freshly generated toy instances and reports one line per
check. Suites are deterministic (fixed seeds) and complete in seconds.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .model import gen_gaussian_matrix, gen_instance
from .oracles import (brute_force_binary_ot, brute_force_lp_min,
                      estimate_ric, exhaustive_ric, finite_diff_grad,
                      grid_min_g_alpha)
from .regularizers import KIND_TOKENS, Regularizer, alpha_star, eval_g_alpha
from .rng import Stream, derive_substream
from .solvers import gradient_step, nt_inner_loop
from .thresholding import bottom_k_indices, top_k_indices

_SUITE_SEED = 0x5EED0001


def _instance_parts(seed: int, m: int, n: int, k: int):
    inst = gen_instance(m, n, k, 0.0, seed)
    a = inst.matrix
    u = gradient_step(a, inst.y, np.zeros(n), 2.0)
    return a, inst.y, u, k


def suite_lp(cases: int = 200) -> tuple[bool, list[str]]:
    """Closed-form selection equals exhaustive extreme-point enumeration."""
    lines = []
    ok = True
    stream = Stream(derive_substream(_SUITE_SEED, 1))
    mismatches = 0
    for i in range(cases):
        n = 6 + int(stream.raw(1)[0] % 7)
        k = 1 + int(stream.raw(1)[0] % 3)
        c = stream.gaussian(n)
        oracle = brute_force_lp_min(c, k)
        fast = bottom_k_indices(c, k)
        if not np.array_equal(oracle.argmin, fast):
            mismatches += 1
        if abs(oracle.value - math.fsum(sorted(c.tolist())[:k])) > 1e-12:
            mismatches += 1
    # Deliberate ties exercise the smallest-index rule.
    tied = brute_force_lp_min(np.array([2.0, 1.0, 1.0, 3.0]), 2)
    if not np.array_equal(tied.argmin, [1, 2]):
        mismatches += 1
    ok = mismatches == 0
    lines.append(f"lp: {cases} random + 1 tie case, mismatches={mismatches}")
    return ok, lines


def suite_ot(cases: int = 60) -> tuple[bool, list[str]]:
    """Exhaustive optimal selection lower-bounds the fast inner loop."""
    lines = []
    violations = 0
    equal = 0
    stream = Stream(derive_substream(_SUITE_SEED, 2))
    for i in range(cases):
        n = 8 + int(stream.raw(1)[0] % 5)
        k = 1 + int(stream.raw(1)[0] % 3)
        a, y, u, k = _instance_parts(int(stream.raw(1)[0]), 6, n, k)
        reg = Regularizer("quad")
        alpha = alpha_star(reg, a, u)
        w_plus = nt_inner_loop(a, y, u, k, alpha, 1, reg)
        fast_value = eval_g_alpha(a, y, u, w_plus, alpha, reg).f_value
        oracle = brute_force_binary_ot(a, y, u, k)
        if oracle.value > fast_value + 1e-9 * (1.0 + abs(fast_value)):
            violations += 1
        if abs(oracle.value - fast_value) <= 1e-9 * (1.0 + abs(fast_value)):
            equal += 1
    lines.append(f"ot: {cases} instances, lower-bound violations={violations}, "
                 f"exact matches={equal}")
    return violations == 0, lines


def suite_grad(cases_per_kind: int = 25) -> tuple[bool, list[str]]:
    """Analytic objective gradients match central finite differences."""
    lines = []
    worst = 0.0
    stream = Stream(derive_substream(_SUITE_SEED, 3))
    for kind in KIND_TOKENS:
        for i in range(cases_per_kind):
            a, y, u, k = _instance_parts(int(stream.raw(1)[0]), 8, 16, 3)
            w = stream.uniform(16)
            reg = Regularizer(kind).bound(u)
            alpha = 2.5
            analytic = eval_g_alpha(a, y, u, w, alpha, reg).gradient
            numeric = finite_diff_grad(
                lambda p: eval_g_alpha(a, y, u, p, alpha, reg).g_value,
                w, 1e-6)
            rel = float(np.linalg.norm(analytic - numeric)
                        / max(1.0, np.linalg.norm(analytic)))
            worst = max(worst, rel)
    ok = worst <= 1e-5
    lines.append(f"grad: {cases_per_kind} points x {len(KIND_TOKENS)} kinds, "
                 f"worst relative error={worst:.3e} (bound 1e-5)")
    return ok, lines


def suite_ric(cases: int = 25) -> tuple[bool, list[str]]:
    """Sampled isometry-defect bounds never exceed the exhaustive value."""
    lines = []
    violations = 0
    stream = Stream(derive_substream(_SUITE_SEED, 4))
    for i in range(cases):
        n = 8 + int(stream.raw(1)[0] % 5)
        m = 6 + int(stream.raw(1)[0] % 3)
        order = 1 + int(stream.raw(1)[0] % 3)
        a = gen_gaussian_matrix(m, n, int(stream.raw(1)[0])).matrix
        sampled = estimate_ric(a, order, samples=40,
                               seed=int(stream.raw(1)[0]))
        exact = exhaustive_ric(a, order)
        if sampled.delta_lower > exact + 1e-12:
            violations += 1
    qmat, _ = np.linalg.qr(Stream(123).gaussian(64).reshape(8, 8))
    ortho = estimate_ric(qmat, 3, samples=50, seed=7).delta_lower
    ortho_ok = ortho <= 1e-12
    lines.append(f"ric: {cases} matrices, bound violations={violations}; "
                 f"orthonormal defect={ortho:.2e} (bound 1e-12)")
    return violations == 0 and ortho_ok, lines


def suite_path(seed: int = 11) -> tuple[bool, list[str]]:
    """Grid minimizers trace the expected regularization path: the penalty
    term is nonincreasing and the data term nondecreasing in alpha, and a
    huge alpha forces a (grid-resolution) binary point."""
    lines = []
    n, k, step = 5, 2, 0.1
    a = gen_gaussian_matrix(4, n, seed).matrix
    stream = Stream(derive_substream(_SUITE_SEED, 5))
    u = 0.5 + stream.uniform(n)
    y = a @ (u * np.array([1.0, 0.0, 1.0, 0.0, 0.3]))
    reg = Regularizer("quad")
    slack = 2.0 * step * n
    phis = []
    fs = []
    for alpha in (1.0, 10.0, 100.0, 1000.0):
        best = grid_min_g_alpha(a, y, u, k, alpha, reg, step)
        residual = y - a @ (u * best.argmin)
        fs.append(float(residual @ residual))
        phis.append(best.value - fs[-1])  # alpha*phi component
        phis[-1] /= alpha
    phi_monotone = all(phis[i + 1] <= phis[i] + slack for i in range(3))
    f_monotone = all(fs[i + 1] >= fs[i] - slack for i in range(3))
    huge = grid_min_g_alpha(a, y, u, k, 1e9, reg, step)
    dist = float(np.abs(huge.argmin - np.round(huge.argmin)).max())
    binary_ok = dist <= step
    lines.append(f"path: penalty nonincreasing={phi_monotone}, "
                 f"data term nondecreasing={f_monotone}, "
                 f"binary at huge alpha (offset {dist:.2f} <= {step})")
    return phi_monotone and f_monotone and binary_ok, lines


SUITES: dict[str, Callable[[], tuple[bool, list[str]]]] = {
    "lp": suite_lp,
    "ot": suite_ot,
    "grad": suite_grad,
    "ric": suite_ric,
    "path": suite_path,
}


def run_suite(name: str) -> tuple[bool, list[str]]:
    if name not in SUITES:
        raise KeyError(name)
    return SUITES[name]()
