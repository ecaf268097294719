"""Kinetic energy partitions of an instantaneous system state (Z, Zdot).

Five decompositions of the total kinetic energy T = (M/2) ||Zdot||^2 are
computed:

  T = T_lambda + T_rho            grand-angular / hyperradial split
  T = T_rot + T_I                 tangent / normal split of Zdot at Z
  T_rot = T_ext + T_int + T_res   projections onto physical- and
                                  kinematic-rotation tangent spaces
  T_rot = T_J + T_K + T_ac        momentum-quadratic split
  T_rot = E_out + E_in + E_c      direct-sum split in the SVD frame,
                                  refined into E_outA/B and E_inA/B

The fast path works in the SVD frame of Z: the rates of the orthogonal
factors are recovered from 2x2 solves on W = D.T @ Zdot @ X, and the
tangent-space projections reduce to closed-form expressions in W and the
singular values.  project_oracle recomputes the projections by explicit
least squares over spanning sets of the tangent spaces and exists to keep
the fast path honest.
"""

from dataclasses import dataclass

import numpy as np

from .linalg import SvdFactors, embed_diagonal, svd, sym_eigen
from .momenta import MomentaResult, momenta_fast


@dataclass(frozen=True)
class ToleranceConfig:
    """Relative thresholds used by the SVD-frame rate solve.

    gap_tol scales xi_1^2: singular value pairs whose squared gap is below
    gap_tol * xi_1^2 are treated as repeated (degenerate).  zero_tol scales
    xi_1: singular values below zero_tol * xi_1 count as zero when the
    positive count k is decided.  Random continuous samples are generically
    non-degenerate, so these guard numerics, not semantics.
    """

    gap_tol: float = 1e-9
    zero_tol: float = 1e-12


DEFAULT_TOLERANCES = ToleranceConfig()


@dataclass
class SvdFrame:
    """SVD factors of Z together with their rates along Zdot.

    W = D.T @ Zdot @ X is the rate matrix in the SVD frame; xidot is its
    diagonal; A = D.T @ Ddot and B = X.T @ Xdot are the (exactly skew)
    factor rates recovered from W; k counts singular values above the zero
    threshold.  degenerate marks that at least one pair of non-zero
    singular values was too close to solve, in which case the affected A, B
    entries are left zero.
    """

    factors: SvdFactors
    xidot: np.ndarray
    A: np.ndarray
    B: np.ndarray
    k: int
    W: np.ndarray
    degenerate: bool


@dataclass(frozen=True)
class PartitionResult:
    """All 19 energy terms of one system plus its squared momenta."""

    T: float
    T_lambda: float
    T_rho: float
    T_rot: float
    T_I: float
    T_xi: float
    T_ext: float
    T_int: float
    T_res: float
    T_J: float
    T_K: float
    T_ac: float
    E_out: float
    E_outA: float
    E_outB: float
    E_in: float
    E_inA: float
    E_inB: float
    E_c: float
    momenta: MomentaResult
    degenerate: bool

    def terms(self):
        """The 19 energy terms as an ordered name -> value dict."""
        return {
            name: getattr(self, name)
            for name in (
                "T", "T_lambda", "T_rho", "T_rot", "T_I", "T_xi",
                "T_ext", "T_int", "T_res", "T_J", "T_K", "T_ac",
                "E_out", "E_outA", "E_outB", "E_in", "E_inA", "E_inB", "E_c",
            )
        }


def svd_rates(z, zdot, cfg=DEFAULT_TOLERANCES):
    """Factor rates of the SVD of z along the direction zdot.

    Writes W = D.T @ zdot @ X and recovers, entry by entry,

      xidot_s = W[s, s]
      A[s, t], B[s, t] for s < t <= m from the 2x2 system
          W[s, t] =  A[s, t] xi_t - xi_s B[s, t]
          W[t, s] = -A[s, t] xi_s + xi_t B[s, t]
      A[i, s] = W[i, s] / xi_s for rows i > m (d > n)
      B[s, a] = -W[s, a] / xi_s for columns a > m (n > d)

    so that W = A @ Upsilon + Upsilon_dot - Upsilon @ B on every entry the
    solve determines.  Pairs of non-zero singular values whose squared gap
    is below the tolerance are skipped (flagged degenerate, entries zero);
    tail entries with xi_s at zero are likewise left zero.
    """
    z = np.asarray(z, dtype=float)
    zdot = np.asarray(zdot, dtype=float)
    if z.shape != zdot.shape:
        raise ValueError(f"shape mismatch: Z {z.shape} vs Zdot {zdot.shape}")
    factors = svd(z)
    xi = factors.xi
    if xi[0] == 0.0:
        raise ValueError("Z is identically zero")
    d, n = z.shape
    m = min(d, n)
    w = np.einsum("id,in,na->da", factors.D, zdot, factors.X)
    xidot = np.diagonal(w)[:m].copy()

    gap_abs = cfg.gap_tol * xi[0] * xi[0]
    zero_abs = cfg.zero_tol * xi[0]
    k = int(np.sum(xi > zero_abs))

    a_raw = np.zeros((d, d))
    b_raw = np.zeros((n, n))
    degenerate = False
    for s in range(m - 1):
        for t in range(s + 1, m):
            det = xi[t] * xi[t] - xi[s] * xi[s]
            if abs(det) > gap_abs:
                a_raw[s, t] = (xi[t] * w[s, t] + xi[s] * w[t, s]) / det
                b_raw[s, t] = (xi[s] * w[s, t] + xi[t] * w[t, s]) / det
            elif xi[s] > zero_abs or xi[t] > zero_abs:
                degenerate = True
    for s in range(min(m, k)):
        if d > m:
            a_raw[m:, s] = w[m:, s] / xi[s]
        if n > m:
            b_raw[s, m:] = -w[s, m:] / xi[s]
    a_skew = a_raw - a_raw.T
    b_skew = b_raw - b_raw.T
    return SvdFrame(
        factors=factors, xidot=xidot, A=a_skew, B=b_skew,
        k=k, W=w, degenerate=degenerate,
    )


def _pad_xi(xi, size):
    out = np.zeros(size)
    out[: xi.size] = xi
    return out


def _tangent_projection_energies(mass, frame, d, n, zero_abs):
    """T_ext and T_int from the normal equations in the SVD frame.

    The skew matrix R minimizing ||Zdot - R @ Z|| solves
    R @ (Z Z^T) + (Z Z^T) @ R = Zdot Z^T - Z Zdot^T; in the D basis Z Z^T is
    diagonal, so entrywise R'[i, j] = (W[i, j] xi_j - xi_i W[j, i]) /
    (xi_i^2 + xi_j^2), and T_ext = (M/2) ||R' Upsilon||^2.  Entries where
    both singular values sit at zero are unconstrained (those directions
    annihilate Z) and are set to zero.  T_int is the mirror image.
    """
    w = frame.W
    m = min(d, n)
    xi_d = _pad_xi(frame.factors.xi, d)
    xi_n = _pad_xi(frame.factors.xi, n)

    wd = np.zeros((d, d))
    wd[:, :m] = w[:, :m]
    num = wd * xi_d[None, :] - xi_d[:, None] * wd.T
    den = xi_d[:, None] ** 2 + xi_d[None, :] ** 2
    live = (xi_d[:, None] > zero_abs) | (xi_d[None, :] > zero_abs)
    r_prime = np.where(live, num / np.where(den > 0.0, den, 1.0), 0.0)
    t_ext = 0.5 * mass * float(np.sum((r_prime * xi_d[None, :]) ** 2))

    wn = np.zeros((n, n))
    wn[:m, :] = w[:m, :]
    num = xi_n[:, None] * wn - wn.T * xi_n[None, :]
    den = xi_n[:, None] ** 2 + xi_n[None, :] ** 2
    live = (xi_n[:, None] > zero_abs) | (xi_n[None, :] > zero_abs)
    q_prime = np.where(live, num / np.where(den > 0.0, den, 1.0), 0.0)
    t_int = 0.5 * mass * float(np.sum((xi_n[:, None] * q_prime) ** 2))
    return t_ext, t_int


def compute_partition(mass, z, zdot, cfg=DEFAULT_TOLERANCES):
    """All 19 energy terms and 4 squared momenta of one system.

    T_rot is taken as the exact complement T - T_I, and T_res, T_ac, E_c as
    exact complements of their partitions, so the five partition identities
    hold by construction.  The singular-expansion terms are reported from
    the regularized solve when Z has (numerically) repeated non-zero
    singular values; the degenerate flag marks those systems.
    """
    z = np.asarray(z, dtype=float)
    zdot = np.asarray(zdot, dtype=float)
    if z.shape != zdot.shape:
        raise ValueError(f"shape mismatch: Z {z.shape} vs Zdot {zdot.shape}")
    if not (np.all(np.isfinite(z)) and np.all(np.isfinite(zdot))):
        raise ValueError("non-finite entries")
    z2 = float(np.sum(z * z))
    if z2 == 0.0:
        raise ValueError("zero hyperradius")
    d, n = z.shape
    m = min(d, n)

    frame = svd_rates(z, zdot, cfg)
    xi = frame.factors.xi
    xidot = frame.xidot
    zero_abs = cfg.zero_tol * xi[0]
    k = frame.k

    zd2 = float(np.sum(zdot * zdot))
    inner = float(np.sum(z * zdot))
    total = 0.5 * mass * zd2
    t_rho = 0.5 * mass * inner * inner / z2

    mom = momenta_fast(mass, z, zdot, xi, xidot)
    t_lambda = mom.Lambda2 / (2.0 * mass * z2)
    t_xi = mom.L2 / (2.0 * mass * z2)
    t_j = mom.J2 / (2.0 * mass * z2)
    t_k = mom.K2 / (2.0 * mass * z2)

    t_inert = 0.5 * mass * float(np.sum(xidot * xidot))
    t_rot = total - t_inert

    t_ext, t_int = _tangent_projection_energies(mass, frame, d, n, zero_abs)
    t_res = t_rot - t_ext - t_int
    t_ac = t_rot - t_j - t_k

    ups = embed_diagonal(xi, d, n)
    e_out = 0.5 * mass * float(np.sum((frame.A @ ups) ** 2))
    e_in = 0.5 * mass * float(np.sum((ups @ frame.B) ** 2))
    e_c = t_rot - e_out - e_in

    a2 = frame.A * frame.A
    b2 = frame.B * frame.B
    xi2 = xi[:k] * xi[:k]
    e_out_a = 0.5 * mass * float(np.sum(a2[:k, :k] * xi2[None, :]))
    e_out_b = 0.5 * mass * float(np.sum(a2[k:, :k] * xi2[None, :]))
    e_in_a = 0.5 * mass * float(np.sum(b2[:k, :k] * xi2[None, :]))
    e_in_b = 0.5 * mass * float(np.sum(b2[k:, :k] * xi2[None, :]))

    return PartitionResult(
        T=total, T_lambda=t_lambda, T_rho=t_rho, T_rot=t_rot, T_I=t_inert,
        T_xi=t_xi, T_ext=t_ext, T_int=t_int, T_res=t_res,
        T_J=t_j, T_K=t_k, T_ac=t_ac,
        E_out=e_out, E_outA=e_out_a, E_outB=e_out_b,
        E_in=e_in, E_inA=e_in_a, E_inB=e_in_b, E_c=e_c,
        momenta=mom, degenerate=frame.degenerate,
    )


@dataclass(frozen=True)
class OracleProjections:
    """Projection energies recomputed by explicit least squares."""

    T_ext: float
    T_int: float
    T_rot: float
    E_out: float
    E_in: float
    split_valid: bool


def _rotation_span(z):
    """Spanning matrices (E_pq - E_qp) @ Z of the physical tangent space."""
    d, n = z.shape
    basis = []
    for p in range(d - 1):
        for q in range(p + 1, d):
            mat = np.zeros((d, n))
            mat[p] = z[q]
            mat[q] = -z[p]
            basis.append(mat.ravel())
    return basis


def _kinematic_span(z):
    """Spanning matrices Z @ (E_ab - E_ba) of the kinematic tangent space."""
    d, n = z.shape
    basis = []
    for a in range(n - 1):
        for b in range(a + 1, n):
            mat = np.zeros((d, n))
            mat[:, b] = z[:, a]
            mat[:, a] = -z[:, b]
            basis.append(mat.ravel())
    return basis


def _project(basis, target):
    """Squared norm of the projection of target onto span(basis).

    Normal equations with a rank-revealing pseudo-inverse; the rank cut is
    1e-10 relative to the largest Gram eigenvalue.  Also returns the
    projected vector itself.
    """
    if not basis:
        return 0.0, np.zeros_like(target), np.zeros(0)
    a = np.stack(basis, axis=1)
    gram = a.T @ a
    coeff = np.linalg.pinv(gram, rcond=1e-10) @ (a.T @ target)
    proj = a @ coeff
    return float(np.sum(proj * proj)), proj, coeff


def project_oracle(mass, z, zdot, cfg=DEFAULT_TOLERANCES):
    """Brute-force T_ext, T_int, T_rot, E_out, E_in by explicit projection.

    Builds the spanning sets of the two tangent spaces and projects Zdot on
    each and on their joint span.  When all positive singular values of Z
    are pairwise distinct the joint tangent component splits uniquely into
    the two spans; the split coefficients then give E_out and E_in.  When
    the condition fails the split is skipped and flagged.
    """
    z = np.asarray(z, dtype=float)
    zdot = np.asarray(zdot, dtype=float)
    target = zdot.ravel()
    basis_r = _rotation_span(z)
    basis_q = _kinematic_span(z)

    ext2, _, _ = _project(basis_r, target)
    int2, _, _ = _project(basis_q, target)
    rot2, _, coeff = _project(basis_r + basis_q, target)

    xi = svd(z).xi
    zero_abs = cfg.zero_tol * xi[0] if xi[0] > 0 else 0.0
    gap_abs = cfg.gap_tol * xi[0] * xi[0]
    positive = xi[xi > zero_abs]
    split_valid = True
    for i in range(positive.size - 1):
        if abs(positive[i] ** 2 - positive[i + 1] ** 2) <= gap_abs:
            split_valid = False
    e_out2 = e_in2 = 0.0
    if split_valid:
        nr = len(basis_r)
        if nr:
            out_vec = np.stack(basis_r, axis=1) @ coeff[:nr]
            e_out2 = float(np.sum(out_vec * out_vec))
        if basis_q:
            in_vec = np.stack(basis_q, axis=1) @ coeff[nr:]
            e_in2 = float(np.sum(in_vec * in_vec))
    return OracleProjections(
        T_ext=0.5 * mass * ext2,
        T_int=0.5 * mass * int2,
        T_rot=0.5 * mass * rot2,
        E_out=0.5 * mass * e_out2,
        E_in=0.5 * mass * e_in2,
        split_valid=split_valid,
    )


def eigenvector_split_oracle(mass, z, zdot, cfg=DEFAULT_TOLERANCES):
    """E_outA, E_outB, E_inA, E_inB via eigenvector derivatives.

    Independent route: the unit eigenvectors u_i of Z Z^T (and v_a of
    Z^T Z) are differentiated by first-order perturbation theory along
    Sdot = Zdot Z^T + Z Zdot^T, giving

      u_j . udot_i = u_j^T Sdot u_i / (lambda_i - lambda_j),

    and the four components are the xi^2-weighted sums of the squared
    overlaps inside (A) and outside (B) the positive-eigenvalue block.
    Requires pairwise distinct positive singular values.
    """
    z = np.asarray(z, dtype=float)
    zdot = np.asarray(zdot, dtype=float)
    xi = svd(z).xi
    zero_abs = cfg.zero_tol * xi[0]
    k = int(np.sum(xi > zero_abs))

    def one_side(s_mat, sdot, dim):
        _, vectors = sym_eigen(s_mat)
        overlap = vectors.T @ sdot @ vectors
        lam_acc = np.zeros(dim)
        lam_acc[: xi.size] = xi * xi
        comp_a = comp_b = 0.0
        for i in range(k):
            for j in range(dim):
                if j == i:
                    continue
                coupling = overlap[j, i] / (lam_acc[i] - lam_acc[j])
                if j < k:
                    if j > i:
                        comp_a += (lam_acc[i] + lam_acc[j]) * coupling * coupling
                else:
                    comp_b += lam_acc[i] * coupling * coupling
        return 0.5 * mass * comp_a, 0.5 * mass * comp_b

    sdot_left = zdot @ z.T + z @ zdot.T
    e_out_a, e_out_b = one_side(z @ z.T, sdot_left, z.shape[0])
    sdot_right = zdot.T @ z + z.T @ zdot
    e_in_a, e_in_b = one_side(z.T @ z, sdot_right, z.shape[1])
    return e_out_a, e_out_b, e_in_a, e_in_b
