"""Shared helpers for the test suite."""

import numpy as np

from ntk.regularizers import eval_g_alpha


def chord_violations(a, y, u, alpha, reg, pairs, rng, slack=1e-9):
    """Count violations of midpoint-style concavity over random chords.

    For random w1, w2 in [0, 1]^n and t in (0, 1), concavity requires
    g(t*w1 + (1-t)*w2) >= t*g(w1) + (1-t)*g(w2) up to a relative slack.
    """
    n = u.shape[0]
    violations = 0
    for _ in range(pairs):
        w1 = rng.random(n)
        w2 = rng.random(n)
        t = rng.uniform(0.05, 0.95)
        g1 = eval_g_alpha(a, y, u, w1, alpha, reg).g_value
        g2 = eval_g_alpha(a, y, u, w2, alpha, reg).g_value
        gm = eval_g_alpha(a, y, u, t * w1 + (1 - t) * w2, alpha, reg).g_value
        bound = t * g1 + (1 - t) * g2 - slack * (1.0 + abs(g1) + abs(g2))
        if gm < bound:
            violations += 1
    return violations


def random_problem(rng, m, n, k, step_length=2.0):
    """Random normalized-Gaussian instance plus a gradient-step vector u
    taken from a random k-sparse iterate (numpy RNG; independent of the
    package's seeded generator)."""
    a = rng.standard_normal((m, n))
    a /= np.linalg.norm(a, axis=0)
    x_true = np.zeros(n)
    x_true[rng.choice(n, size=k, replace=False)] = rng.standard_normal(k)
    y = a @ x_true
    x_iter = np.zeros(n)
    x_iter[rng.choice(n, size=k, replace=False)] = rng.standard_normal(k)
    u = x_iter + step_length * (a.T @ (y - a @ x_iter))
    return a, y, u, x_true
