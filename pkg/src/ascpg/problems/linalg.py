import numpy as np


class LeastSquaresSolution:
    """Solution set ``X* = argmin_x |A x - c|^2`` of a linear least-squares problem.

    ``X*`` is the affine set ``point + null(A)`` where ``point`` is the
    minimum-norm minimizer. ``curvature`` is the smallest nonzero eigenvalue of
    ``A^T A``, i.e. the constant ``lam`` in
    ``|A x - c|^2 - |A P(x) - c|^2 >= lam |x - P(x)|^2``.
    """

    def __init__(self, A, c, rtol=1e-10):
        A = np.asarray(A, dtype=float)
        c = np.asarray(c, dtype=float)
        U, s, Vt = np.linalg.svd(A, full_matrices=True)
        tol = rtol * (s[0] if s.size else 0.0) * max(A.shape)
        r = int((s > tol).sum())
        self.rank = r
        self.point = Vt[:r].T @ ((U[:, :r].T @ c) / s[:r])
        self.null_basis = Vt[r:].T
        self.curvature = float(s[r - 1] ** 2) if r else 0.0
        self.lipschitz = float(s[0] ** 2) if r else 0.0

    def project(self, x):
        N = self.null_basis
        if N.shape[1] == 0:
            return self.point.copy()
        return self.point + N @ (N.T @ (np.asarray(x, dtype=float) - self.point))
