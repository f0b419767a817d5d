"""Pontryagin machinery for the cruise problem.

Everything needed to classify and evaluate the controls lives here: the
Hamiltonian and co-state dynamics, the throttle switching function, the
bracket vectors A, B, D built from the drift field Q and control field P,
the algebraic co-state solve on the singular arc, and the singular throttle
feedback (both the generic form and the degenerate zero-time-weight form
driven by the determinant transport condition).

First-level Jacobians are analytic; the second-level derivatives (dA/dX and
the determinant gradient) use central finite differences with steps sized
per scaled coordinate.  The co-state linear system is solved after column
scaling by the state scales so the 4x4 matrix is well conditioned despite
raw SI magnitudes spanning nine orders.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import (
    CruiseContext,
    eval_P,
    eval_Q,
    jacobian_P,
    jacobian_Q,
    zermelo_rhs,
)
from .errors import DegenerateArcError, IllConditionedSystemError, SingularDenominatorError

# Nondimensionalization used to condition the co-state algebra:
# x, y by 1e6 m; v by 1e2 m/s; m by 1e4 kg; t by 1e3 s.
STATE_SCALES = (1.0e6, 1.0e6, 1.0e2, 1.0e4)
TIME_SCALE = 1.0e3

EPS_DET = 1.0e-10   # on the column-scaled determinant
EPS_DEN = 1.0e-12   # on the feedback denominator (unit-costate normalization)


@dataclass(frozen=True)
class Costate:
    lam_x: float
    lam_y: float
    lam_v: float
    lam_m: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.lam_x, self.lam_y, self.lam_v, self.lam_m)


def hamiltonian(ctx: CruiseContext, x: float, y: float, v: float, m: float,
                chi: float, throttle: float, lam) -> float:
    """Inner product of the co-state with the dynamics (interior arcs)."""
    q = eval_Q(ctx, x, y, v, m, chi)
    p = eval_P(ctx, v, m)
    return sum(lam[i] * (q[i] + throttle * p[i]) for i in range(4))


def costate_rhs(ctx: CruiseContext, x: float, y: float, v: float, m: float,
                chi: float, throttle: float, lam):
    """d lambda / dt = -(dQ/dX + pi dP/dX)^T lambda."""
    jq = jacobian_Q(ctx, x, y, v, m, chi)
    jp = jacobian_P(ctx, v, m)
    out = []
    for j in range(4):
        acc = 0.0
        for i in range(4):
            acc += lam[i] * (jq[i][j] + throttle * jp[i][j])
        out.append(-acc)
    return tuple(out)


def switching_function(ctx: CruiseContext, v: float, m: float, lam) -> float:
    """S = <lambda, P> = lam_v T_max/m - lam_m C_s(v) T_max."""
    return lam[2] * ctx.T_max / m - lam[3] * ctx.fuel_coeff(v) * ctx.T_max


def lie_A(ctx: CruiseContext, v: float, m: float, chi: float):
    """Bracket vector A = (dP/dX) Q - (dQ/dX) P, analytic.

    Wind cancels out of the bracket, so A depends on (v, m, chi) only.
    """
    tmax = ctx.T_max
    d = ctx.drag(m, v)
    d_v, d_m = ctx.drag_partials(m, v)
    cs = ctx.fuel_coeff(v)
    return (
        -tmax * math.cos(chi) / m,
        -tmax * math.sin(chi) / m,
        tmax * (d_v / (m * m) + cs * (d / (m * m) - d_m / m)),
        ctx.cs_slope * tmax * d / m,
    )


def dA_dchi(ctx: CruiseContext, m: float, chi: float):
    """Partial of A w.r.t. heading; only the planar components move."""
    tmax = ctx.T_max
    return (tmax * math.sin(chi) / m, -tmax * math.cos(chi) / m, 0.0, 0.0)


def _dA_dX_fd(ctx: CruiseContext, v: float, m: float, chi: float, rel: float = 1e-6):
    """Central-difference Jacobian of A w.r.t. the state.

    A has no (x, y) dependence, so only the v and m columns are nonzero.
    Steps are sized per scaled coordinate: h_i = rel * max(s_i, |X_i|).
    """
    hv = rel * max(STATE_SCALES[2], abs(v))
    hm = rel * max(STATE_SCALES[3], abs(m))
    a_vp = lie_A(ctx, v + hv, m, chi)
    a_vm = lie_A(ctx, v - hv, m, chi)
    a_mp = lie_A(ctx, v, m + hm, chi)
    a_mm = lie_A(ctx, v, m - hm, chi)
    col_v = tuple((a_vp[i] - a_vm[i]) / (2.0 * hv) for i in range(4))
    col_m = tuple((a_mp[i] - a_mm[i]) / (2.0 * hm) for i in range(4))
    return tuple((0.0, 0.0, col_v[i], col_m[i]) for i in range(4))


def lie_B_D(ctx: CruiseContext, x: float, y: float, v: float, m: float,
            chi: float, fd_rel: float = 1e-6):
    """Second-level bracket vectors.

    B = (dA/dX) Q - (dQ/dX) A  and  D = (dA/dX) P - (dP/dX) A.
    """
    da = _dA_dX_fd(ctx, v, m, chi, fd_rel)
    a = lie_A(ctx, v, m, chi)
    q = eval_Q(ctx, x, y, v, m, chi)
    p = eval_P(ctx, v, m)
    jq = jacobian_Q(ctx, x, y, v, m, chi)
    jp = jacobian_P(ctx, v, m)
    b = tuple(
        sum(da[i][j] * q[j] for j in range(4))
        - sum(jq[i][j] * a[j] for j in range(4))
        for i in range(4)
    )
    d = tuple(
        sum(da[i][j] * p[j] for j in range(4))
        - sum(jp[i][j] * a[j] for j in range(4))
        for i in range(4)
    )
    return b, d


def build_M(ctx: CruiseContext, x: float, y: float, v: float, m: float,
            chi: float):
    """The 4x4 co-state system matrix: rows (P, A, Q with zeroed mass slot,
    heading row (tan chi, -1, 0, 0))."""
    q = eval_Q(ctx, x, y, v, m, chi)
    p = eval_P(ctx, v, m)
    a = lie_A(ctx, v, m, chi)
    return (
        (p[0], p[1], p[2], p[3]),
        (a[0], a[1], a[2], a[3]),
        (q[0], q[1], q[2], 0.0),
        (math.tan(chi), -1.0, 0.0, 0.0),
    )


def _solve4(mat, rhs):
    """Dense 4x4 solve with partial pivoting; returns (x, det, pivot_ratio)."""
    a = [list(row) for row in mat]
    b = list(rhs)
    det = 1.0
    piv_max, piv_min = 0.0, math.inf
    for k in range(4):
        p = max(range(k, 4), key=lambda i: abs(a[i][k]))
        if p != k:
            a[k], a[p] = a[p], a[k]
            b[k], b[p] = b[p], b[k]
            det = -det
        piv = a[k][k]
        det *= piv
        if piv == 0.0:
            return None, 0.0, math.inf
        piv_max = max(piv_max, abs(piv))
        piv_min = min(piv_min, abs(piv))
        for i in range(k + 1, 4):
            f = a[i][k] / piv
            if f != 0.0:
                for j in range(k + 1, 4):
                    a[i][j] -= f * a[k][j]
                b[i] -= f * b[k]
    x = [0.0] * 4
    for i in range(3, -1, -1):
        acc = b[i]
        row = a[i]
        for j in range(i + 1, 4):
            acc -= row[j] * x[j]
        x[i] = acc / row[i]
    return x, det, piv_max / piv_min


def _equilibrate(mat):
    """Column-scale by the state scales, then normalize each row by its
    Euclidean norm.  Row 2-norms (not max) keep the result smooth in the
    state, which the zero-weight determinant gradient relies on."""
    cols = [[mat[i][j] / STATE_SCALES[j] for j in range(4)] for i in range(4)]
    rows = []
    norms = []
    for r in cols:
        nrm = math.sqrt(sum(e * e for e in r))
        if nrm == 0.0:
            nrm = 1.0
        norms.append(nrm)
        rows.append([e / nrm for e in r])
    return rows, norms


def scaled_det(mat) -> float:
    """Determinant of the equilibrated system matrix (bounded by 1)."""
    rows, _ = _equilibrate(mat)
    return _det4(rows)


def _det4(m) -> float:
    a = [row[:] for row in m]
    det = 1.0
    for k in range(4):
        p = max(range(k, 4), key=lambda i: abs(a[i][k]))
        if p != k:
            a[k], a[p] = a[p], a[k]
            det = -det
        piv = a[k][k]
        if piv == 0.0:
            return 0.0
        det *= piv
        for i in range(k + 1, 4):
            f = a[i][k] / piv
            for j in range(k + 1, 4):
                a[i][j] -= f * a[k][j]
    return det


def solve_costates_unit(ctx: CruiseContext, x: float, y: float, v: float,
                        m: float, chi: float, eps_det: float = EPS_DET):
    """Solve the singular-arc co-state system normalized to unit cost weight.

    Returns lambda satisfying <l,P>=0, <l,A>=0, <l,Q>=-1, lx tan(chi)-ly=0
    together with the scaled determinant.  The physical co-state for weight
    alpha is alpha times this vector.
    """
    mat = build_M(ctx, x, y, v, m, chi)
    rows, norms = _equilibrate(mat)
    rhs = (0.0, 0.0, -1.0 / norms[2], 0.0)
    sol, det, cond = _solve4(rows, rhs)
    if sol is None or abs(det) < eps_det:
        raise IllConditionedSystemError(det, cond)
    lam = tuple(sol[j] / STATE_SCALES[j] for j in range(4))
    return lam, det


def solve_costates_on_singular(ctx: CruiseContext, x: float, y: float,
                               v: float, m: float, chi: float, alpha: float,
                               eps_det: float = EPS_DET) -> Costate:
    """Co-state on the singular arc for cost weight alpha > 0."""
    if alpha <= 0.0:
        raise ValueError("algebraic co-state solve requires alpha > 0")
    lam, _ = solve_costates_unit(ctx, x, y, v, m, chi, eps_det)
    return Costate(*(alpha * li for li in lam))


def costates_adjugate(ctx: CruiseContext, x: float, y: float, v: float,
                      m: float, chi: float, alpha: float) -> Costate:
    """Adjugate-form co-state solve; kept as an oracle for the LU path."""
    mat = np.array(build_M(ctx, x, y, v, m, chi))
    scaled = mat / np.array(STATE_SCALES)[None, :]
    det = np.linalg.det(scaled)
    adj = np.linalg.inv(scaled) * det
    lam_scaled = adj @ np.array([0.0, 0.0, -alpha, 0.0]) / det
    return Costate(*(lam_scaled / np.array(STATE_SCALES)))


@dataclass(frozen=True)
class FeedbackEval:
    """One evaluation of the singular throttle feedback with diagnostics."""

    throttle: float          # unclamped value
    lam: tuple | None        # physical co-state (None on the alpha=0 route)
    det_scaled: float        # column-scaled determinant of the system matrix
    lc: float                # -<lambda, D>, the second-order condition value
    chidot: float


def singular_throttle(ctx: CruiseContext, x: float, y: float, v: float,
                      m: float, chi: float, chidot: float, alpha: float,
                      eps_det: float = EPS_DET,
                      eps_den: float = EPS_DEN) -> FeedbackEval:
    """Feedback throttle on the singular arc from the vanishing of the
    second derivative of the switching function."""
    lam_u, det = solve_costates_unit(ctx, x, y, v, m, chi, eps_det)
    b, d = lie_B_D(ctx, x, y, v, m, chi)
    da_chi = dA_dchi(ctx, m, chi)
    num = sum(lam_u[i] * b[i] for i in range(4)) + chidot * sum(
        lam_u[i] * da_chi[i] for i in range(4)
    )
    den = sum(lam_u[i] * d[i] for i in range(4))
    if abs(den) <= eps_den:
        raise SingularDenominatorError(
            f"<lambda, D> = {den:.3e} below threshold {eps_den:.1e}"
        )
    lam = tuple(alpha * li for li in lam_u)
    return FeedbackEval(
        throttle=-num / den,
        lam=lam,
        det_scaled=det,
        lc=-alpha * den,
        chidot=chidot,
    )


def _det_at(ctx: CruiseContext, x: float, y: float, v: float, m: float,
            chi: float) -> float:
    return scaled_det(build_M(ctx, x, y, v, m, chi))


def singular_throttle_alpha0(ctx: CruiseContext, x: float, y: float, v: float,
                             m: float, chi: float, chidot: float,
                             fd_rel: float = 1e-6,
                             eps_den: float = EPS_DEN) -> FeedbackEval:
    """Zero-time-weight singular throttle from determinant transport.

    With zero cost weight the algebraic co-state solve degenerates and the
    singular arc rides the zero set of det(M); holding d/dt det(M) = 0 along
    the flow gives the throttle.  The full transport derivative is used,
    including the heading-rate term (which vanishes for constant wind).
    """
    xs = (x, y, v, m)
    grad = [0.0] * 4
    for i in range(4):
        h = fd_rel * max(STATE_SCALES[i], abs(xs[i]))
        pert = list(xs)
        pert[i] = xs[i] + h
        fp = _det_at(ctx, pert[0], pert[1], pert[2], pert[3], chi)
        pert[i] = xs[i] - h
        fm = _det_at(ctx, pert[0], pert[1], pert[2], pert[3], chi)
        grad[i] = (fp - fm) / (2.0 * h)
    hc = fd_rel
    det_chi = (_det_at(ctx, x, y, v, m, chi + hc)
               - _det_at(ctx, x, y, v, m, chi - hc)) / (2.0 * hc)
    q = eval_Q(ctx, x, y, v, m, chi)
    p = eval_P(ctx, v, m)
    num = sum(grad[i] * q[i] for i in range(4)) + det_chi * chidot
    den = sum(grad[i] * p[i] for i in range(4))
    if abs(den) <= eps_den:
        raise DegenerateArcError(
            f"determinant-gradient denominator {den:.3e} below {eps_den:.1e}"
        )
    return FeedbackEval(
        throttle=-num / den,
        lam=None,
        det_scaled=_det_at(ctx, x, y, v, m, chi),
        lc=math.nan,
        chidot=chidot,
    )


def evaluate_feedback(ctx: CruiseContext, x: float, y: float, v: float,
                      m: float, chi: float, alpha: float,
                      eps_det: float = EPS_DET,
                      eps_den: float = EPS_DEN) -> FeedbackEval:
    """Singular throttle at a point, dispatching on the cost weight."""
    grads = ctx.wind.wind_gradients(x, y)
    chidot = zermelo_rhs(chi, grads)
    if alpha == 0.0:
        return singular_throttle_alpha0(ctx, x, y, v, m, chi, chidot,
                                        eps_den=eps_den)
    return singular_throttle(ctx, x, y, v, m, chi, chidot, alpha,
                             eps_det, eps_den)


def legendre_clebsch(ctx: CruiseContext, x: float, y: float, v: float,
                     m: float, chi: float, lam) -> float:
    """-<lambda, D>; nonnegativity is the second-order necessary condition."""
    _, d = lie_B_D(ctx, x, y, v, m, chi)
    return -sum(lam[i] * d[i] for i in range(4))
