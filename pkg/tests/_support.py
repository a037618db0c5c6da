"""Shared test helpers: independent oracles and instance generators."""

import numpy as np

from subsetscreen import standardize


def jacobi_max_eigenvalue(S, sweeps=60, tol=1e-14):
    """Largest eigenvalue of a symmetric matrix by cyclic Jacobi rotations.

    Deliberately written from scratch (no eigensolver calls) so it can
    serve as an independent check of the power-iteration route.
    """
    A = np.array(S, dtype=float)
    if not np.allclose(A, A.T, atol=1e-12 * max(1.0, np.abs(A).max())):
        raise ValueError("matrix is not symmetric")
    m = A.shape[0]
    scale = max(1.0, np.abs(A).max())
    for _ in range(sweeps):
        off = np.sqrt(np.sum(np.tril(A, -1) ** 2))
        if off <= tol * scale:
            break
        for i in range(m - 1):
            for j in range(i + 1, m):
                if abs(A[i, j]) <= tol * scale / m:
                    continue
                # rotation angle annihilating A[i, j]
                theta = 0.5 * np.arctan2(2.0 * A[i, j], A[j, j] - A[i, i])
                c, s = np.cos(theta), np.sin(theta)
                rows_i, rows_j = A[i, :].copy(), A[j, :].copy()
                A[i, :] = c * rows_i - s * rows_j
                A[j, :] = s * rows_i + c * rows_j
                cols_i, cols_j = A[:, i].copy(), A[:, j].copy()
                A[:, i] = c * cols_i - s * cols_j
                A[:, j] = s * cols_i + c * cols_j
    return float(np.max(np.diag(A)))


def random_problem(seed, n=30, p=8, d=2, sigma=0.5, beta_value=2.0):
    """Generic seeded dense instance with signal on the first d columns."""
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, p))
    beta = np.zeros(p)
    beta[:d] = beta_value
    y = X @ beta + sigma * rng.standard_normal(n)
    return standardize(X, y)


def orthogonal_design(seed, n=24, p=8):
    """Centered design with exactly orthogonal columns of squared norm n."""
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal((n, p))
    raw -= raw.mean(axis=0)
    Q, _ = np.linalg.qr(raw)
    return Q * np.sqrt(n)


def unique_solution_problem(seed, n=40, M=3, sigma=0.2):
    """Well-separated sparse instance whose size-M optimum is unique.

    Strong +-3 signals on a random support of size M with small noise;
    p varies in 8..10 with the seed.
    """
    rng = np.random.default_rng(seed)
    p = 8 + int(rng.integers(0, 3))
    X = rng.standard_normal((n, p))
    beta = np.zeros(p)
    support = rng.choice(p, size=M, replace=False)
    beta[support] = rng.choice([-3.0, 3.0], size=M)
    y = X @ beta + sigma * rng.standard_normal(n)
    return standardize(X, y), M
