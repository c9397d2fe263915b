"""Normal geodesics of the model as a Hamiltonian flow on the cotangent bundle.

The kinetic energy is built from the frame momentum functions
``P_a(q, p) = p(X_a(q))``: the sub-Riemannian Hamiltonian sums the squares of
the four horizontal momenta, the Riemannian one adds the three vertical
momenta.  The generic right-hand side is the exact derivative of that
Hamiltonian (quadratic in p, polynomial in q through the frame matrix), and
a classical fixed-step RK4 integrator drives it, recording the energy at
every sample and stopping gracefully when the flow leaves the chart
``K > 0`` or produces non-finite values.

For the quaternionic Heisenberg case ``(m, l) = (0, 1)`` the flow is solved
in closed form: packing the horizontal coordinates as the quaternion
``omega = w + i x + j y + k z``, the horizontal momentum quaternion obeys
``P' = -Lambda P`` with the constant imaginary quaternion
``Lambda = i p_r + j p_s + k p_t``, so ``P(u) = exp(-Lambda u) P(0)`` and

    omega(u) = omega(0) + Lambda^{-1} (1 - exp(-Lambda u)) P(0),

an arc of a circle of radius ``|P(0)|/|Lambda|`` (a straight line when
``Lambda = 0``).  The vertical coordinates follow by quadrature of
``(r', s', t') = (1/2) Im(omega * conj(omega'))``; that integrand is the one
that reproduces the Hamiltonian equations for r, s, t exactly (the published
form of the integrals conjugates the other factor, which does not).

The hand-derived first-order system published for this case is kept here as
an independently transcribed fixture (`printed_heisenberg_rhs`).  Its s-dot
line swaps two coefficients relative to the Hamiltonian derivation; the
generic path is authoritative and `sdot_mismatch` reports the difference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from .errors import DomainViolation, ModeMismatch, TooFewSamples
from .frames import (
    J_TWIST,
    ModelParams,
    frame_derivs,
    frame_matrix,
    structure_constants,
)
from .quaternions import as_quaternion_array, exp_imaginary, qconj, qmul

__all__ = [
    "GeodesicMode",
    "CotangentState",
    "Trajectory",
    "CircleVerdict",
    "frame_momenta",
    "hamiltonian",
    "hamilton_rhs",
    "printed_heisenberg_rhs",
    "generic_rhs_momentum_chart",
    "sdot_mismatch",
    "integrate",
    "closed_form_geodesic",
    "closed_form_trajectory",
    "POISSON_PAIRS",
    "poisson_bracket_values",
    "poisson_check",
    "circle_check",
]

#: threshold below which the rotation quaternion counts as zero (line branch)
DEGENERATE_LAMBDA = 1e-12

#: minimum number of Simpson panels for the vertical-coordinate quadrature
MIN_SIMPSON_PANELS = 10_000

#: relative residual threshold for the circle / line verdicts
CIRCLE_RESIDUAL_TOL = 1e-4

#: the six horizontal frame pairs, 1-based (X_4..X_7)
POISSON_PAIRS: Tuple[Tuple[int, int], ...] = (
    (4, 5),
    (4, 6),
    (4, 7),
    (5, 6),
    (5, 7),
    (6, 7),
)


class GeodesicMode(Enum):
    """Which momenta enter the kinetic energy.

    ``heisenberg`` is the sub-Riemannian flow pinned to (m, l) = (0, 1),
    where the closed form applies; ``subriemannian`` uses the horizontal
    momenta for any admissible (m, l); ``riemannian`` adds the vertical ones.
    """

    HEISENBERG = "heisenberg"
    SUBRIEMANNIAN = "subriemannian"
    RIEMANNIAN = "riemannian"


def _coerce_mode(mode) -> GeodesicMode:
    if isinstance(mode, GeodesicMode):
        return mode
    try:
        return GeodesicMode(str(mode))
    except ValueError:
        raise ValueError(
            f"unknown geodesic mode {mode!r}; expected one of "
            f"{[m.value for m in GeodesicMode]}"
        ) from None


def _check_mode_params(mode: GeodesicMode, params: ModelParams) -> None:
    if mode is GeodesicMode.HEISENBERG and not (params.m == 0.0 and params.l == 1.0):
        raise ModeMismatch(
            "heisenberg mode requires (m, l) = (0, 1); got "
            f"({params.m}, {params.l})"
        )


@dataclass(frozen=True)
class CotangentState:
    """A point of the cotangent bundle: coordinates q and covector p.

    Both arrays use the coordinate order (r, s, t, w, x, y, z); p holds the
    components of ``p_r dr + ... + p_z dz`` in the same order.
    """

    q: np.ndarray
    p: np.ndarray

    def __init__(self, q, p):
        q = np.asarray(q, dtype=float)
        p = np.asarray(p, dtype=float)
        if q.shape != (7,) or p.shape != (7,):
            raise ValueError("CotangentState needs 7 coordinates and 7 momenta")
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p))):
            raise ValueError("CotangentState components must be finite")
        q.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    @classmethod
    def from_components(cls, *values) -> "CotangentState":
        """Build from 14 reals ordered r,s,t,w,x,y,z,pr,ps,pt,pw,px,py,pz."""
        if len(values) == 1:
            values = tuple(values[0])
        flat = np.asarray(values, dtype=float)
        if flat.shape != (14,):
            raise ValueError("expected 14 reals (7 coordinates + 7 momenta)")
        return cls(flat[:7], flat[7:])

    def as_vector(self) -> np.ndarray:
        """The flat 14-vector (q, p)."""
        return np.concatenate([self.q, self.p])


def frame_momenta(q, p, params: ModelParams) -> np.ndarray:
    """Frame momentum functions P_a = p(X_a), i.e. (F^T p)_a, a = 1..7."""
    F = frame_matrix(q, params)
    p = np.asarray(p, dtype=float)
    return np.einsum("...ma,...m->...a", F, p)


# --- generic Hamiltonian right-hand side -----------------------------------


def _rhs_arrays(
    q: np.ndarray, p: np.ndarray, params: ModelParams, riemannian: bool
) -> Tuple[np.ndarray, np.ndarray]:
    """Exact (q-dot, p-dot) of the kinetic Hamiltonian, no domain checks.

    Uses the block structure of the frame: columns 4..7 have vertical part
    B[i, b] = (l/2) (J_i u)_b and horizontal part K*I; only the u-derivatives
    of F are nonzero, so p_r, p_s, p_t are conserved identically.
    """
    u = q[3:]
    K = 1.0 + params.m * float(u @ u)
    B = 0.5 * params.l * (J_TWIST @ u)  # (3, 4): rows i, columns b
    Ph = B.T @ p[:3] + K * p[3:]  # horizontal frame momenta P_{4..7}
    qdot = np.empty(7)
    qdot[:3] = B @ Ph
    qdot[3:] = K * Ph
    # M[b, c] = sum_nu (d F[nu, 3+b] / d u_c) p_nu
    M = 0.5 * params.l * np.einsum("ibc,i->bc", J_TWIST, p[:3]) + (
        2.0 * params.m
    ) * np.outer(p[3:], u)
    pdot = np.zeros(7)
    pdot[3:] = -(Ph @ M)
    if riemannian:
        qdot[:3] += p[:3]  # vertical frame fields are the coordinate fields
    return qdot, pdot


def _k_of(q: np.ndarray, params: ModelParams) -> float:
    u = q[3:]
    return 1.0 + params.m * float(u @ u)


def hamiltonian(state: CotangentState, params: ModelParams, mode) -> float:
    """Kinetic energy H = (1/2) sum of squared active frame momenta."""
    mode = _coerce_mode(mode)
    _check_mode_params(mode, params)
    K = _k_of(state.q, params)
    if not np.isfinite(K) or K <= 0.0:
        raise DomainViolation("conformal factor K <= 0: point outside the chart")
    P = frame_momenta(state.q, state.p, params)
    H = 0.5 * float(P[3:] @ P[3:])
    if mode is GeodesicMode.RIEMANNIAN:
        H += 0.5 * float(P[:3] @ P[:3])
    return H


def hamilton_rhs(
    state: CotangentState, params: ModelParams, mode
) -> Tuple[np.ndarray, np.ndarray]:
    """Exact (q-dot, p-dot) of the normal geodesic equations.

    q-dot^mu = dH/dp_mu and p-dot_mu = -dH/dx^mu, differentiated in closed
    form.  The returned p-dot has vanishing r, s, t components identically
    (the frame never depends on the vertical coordinates).
    """
    mode = _coerce_mode(mode)
    _check_mode_params(mode, params)
    K = _k_of(state.q, params)
    if not np.isfinite(K) or K <= 0.0:
        raise DomainViolation("conformal factor K <= 0: point outside the chart")
    return _rhs_arrays(
        state.q, state.p, params, riemannian=(mode is GeodesicMode.RIEMANNIAN)
    )


# --- the published first-order system (fixture) ----------------------------


def _printed_momenta(q: np.ndarray, p: np.ndarray) -> Tuple[float, float, float, float]:
    """The four horizontal momentum functions exactly as published."""
    r, s, t, w, x, y, z = q
    pr, ps, pt, pw, px, py, pz = p
    PW = pw + 0.5 * (x * pr + y * ps + z * pt)
    PX = px - 0.5 * (w * pr + z * ps - y * pt)
    PY = py + 0.5 * (z * pr - w * ps - x * pt)
    PZ = pz - 0.5 * (y * pr - x * ps + w * pt)
    return PW, PX, PY, PZ


def printed_heisenberg_rhs(state: CotangentState) -> np.ndarray:
    """The published 14-line system for (m, l) = (0, 1), transcribed verbatim.

    Returns the derivative of the mixed state
    (r, s, t, w, x, y, z, p_r, p_s, p_t, P_W, P_X, P_Y, P_Z).
    The s-dot line is kept exactly as published even though it disagrees
    with dH/dp_s (see `sdot_mismatch`); everything else matches the generic
    Hamiltonian path.
    """
    q, p = state.q, state.p
    _, _, _, w, x, y, z = q
    pr, ps, pt = p[:3]
    PW, PX, PY, PZ = _printed_momenta(q, p)
    rdot = 0.5 * (x * PW - w * PX + z * PY - y * PZ)
    sdot = 0.5 * (y * PW - z * PX + x * PY - w * PZ)  # as published
    tdot = 0.5 * (z * PW + y * PX - x * PY - w * PZ)
    PWdot = pr * PX + ps * PY + pt * PZ
    PXdot = -pr * PW - ps * PZ + pt * PY
    PYdot = pr * PZ - ps * PW - pt * PX
    PZdot = -pr * PY + ps * PX - pt * PW
    return np.array(
        [rdot, sdot, tdot, PW, PX, PY, PZ, 0.0, 0.0, 0.0, PWdot, PXdot, PYdot, PZdot]
    )


def generic_rhs_momentum_chart(state: CotangentState) -> np.ndarray:
    """The authoritative right-hand side in the same mixed chart.

    Converts the exact (q-dot, p-dot) at (m, l) = (0, 1) to the derivative of
    (r, s, t, w, x, y, z, p_r, p_s, p_t, P_W, P_X, P_Y, P_Z) by the chain
    rule, for line-by-line comparison with `printed_heisenberg_rhs`.
    """
    hp = ModelParams(0.0, 1.0)
    qdot, pdot = hamilton_rhs(state, hp, GeodesicMode.HEISENBERG)
    F = frame_matrix(state.q, hp)
    dF = frame_derivs(state.q, hp)
    # d/du of P_a = F[mu, a] p_mu along the flow
    Pdot = np.einsum("emn,e,m->n", dF, qdot, state.p) + np.einsum(
        "mn,m->n", F, pdot
    )
    return np.concatenate([qdot, pdot[:3], Pdot[3:]])


def sdot_mismatch(state: CotangentState) -> float:
    """Published s-dot minus the Hamiltonian dH/dp_s, at (m, l) = (0, 1).

    Equals (1/2)(x P_Y - w P_Z) - (1/2)(-w P_Y + x P_Z): the published line
    carries the P_Y and P_Z coefficients of the t-dot/r-dot pattern in the
    wrong slots.  Zero only where (w + x)(P_Y - P_Z) vanishes.
    """
    _, _, _, w, x, _, _ = state.q
    _, _, PY, PZ = _printed_momenta(state.q, state.p)
    return 0.5 * (x * PY - w * PZ) - 0.5 * (-w * PY + x * PZ)


# --- fixed-step RK4 ---------------------------------------------------------


@dataclass(frozen=True)
class Trajectory:
    """An integrated (or sampled) curve in the cotangent bundle.

    ``u`` is a uniform, increasing parameter grid; ``q`` and ``p`` hold one
    row per sample in the coordinate order (r, s, t, w, x, y, z); ``H`` is
    the recorded energy.  ``status`` is one of ``complete``, ``domain-exit``
    (the flow reached K <= 0; samples up to the last admissible step are
    kept and ``exit_step`` names the 1-based step that failed) or
    ``step-rejected`` (non-finite values appeared at ``exit_step``).
    """

    u: np.ndarray
    q: np.ndarray
    p: np.ndarray
    H: np.ndarray
    mode: GeodesicMode
    params: ModelParams
    h: float
    status: str = "complete"
    exit_step: Optional[int] = None

    @property
    def n_samples(self) -> int:
        return int(self.u.shape[0])

    def state(self, k: int) -> CotangentState:
        """The k-th sample as a CotangentState."""
        return CotangentState(self.q[k], self.p[k])

    def to_rows(self) -> np.ndarray:
        """Samples as rows (u, r, s, t, w, x, y, z, pr, ps, pt, pw, px, py, pz, H)."""
        return np.column_stack([self.u, self.q, self.p, self.H])


def _energy(q: np.ndarray, p: np.ndarray, params: ModelParams, riem: bool) -> float:
    u = q[3:]
    K = 1.0 + params.m * float(u @ u)
    B = 0.5 * params.l * (J_TWIST @ u)
    Ph = B.T @ p[:3] + K * p[3:]
    H = 0.5 * float(Ph @ Ph)
    if riem:
        H += 0.5 * float(p[:3] @ p[:3])
    return H


def integrate(s0: CotangentState, params: ModelParams, mode, h: float, n: int) -> Trajectory:
    """Classical RK4 with n fixed steps of size h from s0.

    The chart condition K > 0 is checked at every stage point; if it fails
    the partial trajectory is returned with status ``domain-exit``.  If a
    step produces non-finite values the status is ``step-rejected``.  The
    energy H is recorded at every retained sample.
    """
    mode = _coerce_mode(mode)
    _check_mode_params(mode, params)
    if not (h > 0.0) or not math.isfinite(h):
        raise ValueError("step size h must be positive and finite")
    if n < 1:
        raise ValueError("need at least one step")
    riem = mode is GeodesicMode.RIEMANNIAN
    K0 = _k_of(s0.q, params)
    if not np.isfinite(K0) or K0 <= 0.0:
        raise DomainViolation("initial point outside the chart (K <= 0)")

    qs = [s0.q.copy()]
    ps = [s0.p.copy()]
    Hs = [_energy(s0.q, s0.p, params, riem)]
    status = "complete"
    exit_step: Optional[int] = None

    q = s0.q.copy()
    p = s0.p.copy()
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, n + 1):
            failed = None
            stages_q = []
            stages_p = []
            qa, pa = q, p
            for coeff in (0.5, 0.5, 1.0, None):
                Kst = _k_of(qa, params)
                if not np.isfinite(Kst) or not (
                    np.all(np.isfinite(qa)) and np.all(np.isfinite(pa))
                ):
                    failed = "step-rejected"
                    break
                if Kst <= 0.0:
                    failed = "domain-exit"
                    break
                dq, dp = _rhs_arrays(qa, pa, params, riem)
                stages_q.append(dq)
                stages_p.append(dp)
                if coeff is not None:
                    qa = q + coeff * h * dq
                    pa = p + coeff * h * dp
            if failed is None:
                q = q + (h / 6.0) * (
                    stages_q[0] + 2.0 * stages_q[1] + 2.0 * stages_q[2] + stages_q[3]
                )
                p = p + (h / 6.0) * (
                    stages_p[0] + 2.0 * stages_p[1] + 2.0 * stages_p[2] + stages_p[3]
                )
                if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p))):
                    failed = "step-rejected"
                elif _k_of(q, params) <= 0.0:
                    failed = "domain-exit"
            if failed is not None:
                status = failed
                exit_step = k
                break
            qs.append(q.copy())
            ps.append(p.copy())
            Hs.append(_energy(q, p, params, riem))

    m_kept = len(qs)
    return Trajectory(
        u=np.arange(m_kept) * h,
        q=np.array(qs),
        p=np.array(ps),
        H=np.array(Hs),
        mode=mode,
        params=params,
        h=h,
        status=status,
        exit_step=exit_step,
    )


# --- closed form for the quaternionic Heisenberg flow -----------------------


def _closed_form_eval(
    omega0: np.ndarray, P0: np.ndarray, lam_vec: np.ndarray, vs: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """omega(v) and P(v) on a grid vs, from the quaternion closed form."""
    lam = float(np.linalg.norm(lam_vec))
    if lam < DEGENERATE_LAMBDA:
        P_vals = np.broadcast_to(P0, vs.shape + (4,)).copy()
        omega_vals = omega0[None, :] + vs[:, None] * P0[None, :]
        return omega_vals, P_vals
    E = exp_imaginary(-vs[:, None] * lam_vec[None, :])  # exp(-Lambda v)
    P_vals = qmul(E, P0[None, :])
    lam_inv = np.concatenate([[0.0], -lam_vec]) / lam**2  # Lambda^{-1}
    one = np.array([1.0, 0.0, 0.0, 0.0])
    pref = qmul(np.broadcast_to(lam_inv, E.shape), one[None, :] - E)
    omega_vals = omega0[None, :] + qmul(pref, P0[None, :])
    return omega_vals, P_vals


def _vertical_integrand(omega_vals: np.ndarray, P_vals: np.ndarray) -> np.ndarray:
    """(1/2) Im(omega * conj(omega')) as a (..., 3) array; omega' = P."""
    return 0.5 * qmul(omega_vals, qconj(P_vals))[..., 1:]


def _simpson_weights(panels: int) -> np.ndarray:
    w = np.ones(panels + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w


def closed_form_geodesic(
    omega0,
    P0,
    pr: float,
    ps: float,
    pt: float,
    r0: float,
    s0: float,
    t0: float,
    u: float,
    panels: int = MIN_SIMPSON_PANELS,
) -> np.ndarray:
    """Evaluate the closed-form Heisenberg geodesic at parameter u.

    ``omega0`` and ``P0`` are the initial horizontal position and momentum
    packed as quaternions (w, x, y, z components); pr, ps, pt are the
    conserved vertical momenta and (r0, s0, t0) the initial vertical
    coordinates.  Returns the point (r, s, t, w, x, y, z).

    The horizontal part is omega(u) = omega0 + Lambda^{-1}(1 - exp(-Lambda u)) P0
    with Lambda = i pr + j ps + k pt (a straight line omega0 + P0 u when
    |Lambda| < 1e-12); the vertical part integrates
    (1/2) Im(omega conj(omega')) by composite Simpson quadrature.
    """
    omega0 = as_quaternion_array(omega0)
    P0 = as_quaternion_array(P0)
    lam_vec = np.array([pr, ps, pt], dtype=float)
    panels = max(2, int(panels))
    if panels % 2:
        panels += 1
    vs = np.linspace(0.0, float(u), panels + 1)
    omega_vals, P_vals = _closed_form_eval(omega0, P0, lam_vec, vs)
    g = _vertical_integrand(omega_vals, P_vals)
    step = float(u) / panels
    integral = (step / 3.0) * np.einsum("j,jd->d", _simpson_weights(panels), g)
    vertical = np.array([r0, s0, t0]) + integral
    return np.concatenate([vertical, omega_vals[-1]])


def heisenberg_closed_form_inputs(s0: CotangentState):
    """Split a cotangent state into closed-form inputs (at (m, l) = (0, 1)).

    Returns (omega0, P0, pr, ps, pt, r0, s0, t0) with omega0 and P0 as
    (4,) arrays.
    """
    hp = ModelParams(0.0, 1.0)
    P = frame_momenta(s0.q, s0.p, hp)
    return (
        s0.q[3:].copy(),
        P[3:].copy(),
        float(s0.p[0]),
        float(s0.p[1]),
        float(s0.p[2]),
        float(s0.q[0]),
        float(s0.q[1]),
        float(s0.q[2]),
    )


def closed_form_trajectory(s0: CotangentState, h: float, n: int) -> Trajectory:
    """Sample the closed-form Heisenberg geodesic on the grid u_k = k h.

    Produces a Trajectory directly comparable with `integrate` in heisenberg
    mode: same chart, same sample spacing, full momentum components
    recovered from P(u) through the coframe.  The vertical quadrature uses
    at least MIN_SIMPSON_PANELS Simpson panels over the whole span.
    """
    if not (h > 0.0) or not math.isfinite(h):
        raise ValueError("step size h must be positive and finite")
    if n < 1:
        raise ValueError("need at least one step")
    omega0, P0, pr, ps, pt, r0, s0v, t0 = heisenberg_closed_form_inputs(s0)
    lam_vec = np.array([pr, ps, pt])
    pps = max(2, 2 * math.ceil(0.5 * MIN_SIMPSON_PANELS / n))
    total = n * pps
    vs = np.linspace(0.0, n * h, total + 1)
    omega_vals, P_vals = _closed_form_eval(omega0, P0, lam_vec, vs)
    g = _vertical_integrand(omega_vals, P_vals)
    delta = h / pps
    # composite Simpson on each step's pps panels, then cumulative sums
    w_inner = _simpson_weights(pps)[:-1]
    blocks = g[:total].reshape(n, pps, 3)
    ends = g[pps::pps]
    per_step = (delta / 3.0) * (np.einsum("j,kjd->kd", w_inner, blocks) + ends)
    vertical = np.vstack([[r0, s0v, t0], np.array([r0, s0v, t0]) + np.cumsum(per_step, axis=0)])

    omega_s = omega_vals[::pps]
    P_s = P_vals[::pps]
    qarr = np.column_stack([vertical, omega_s])
    # recover covector components: p_vert constant, p_horiz = P_h - B^T p_vert
    Bv = 0.5 * np.einsum("ibd,kd->kib", J_TWIST, omega_s)
    p_h = P_s - np.einsum("kib,i->kb", Bv, lam_vec)
    parr = np.column_stack([np.broadcast_to(lam_vec, (n + 1, 3)), p_h])
    H_s = 0.5 * np.sum(P_s * P_s, axis=-1)
    return Trajectory(
        u=np.arange(n + 1) * h,
        q=qarr,
        p=parr,
        H=H_s,
        mode=GeodesicMode.HEISENBERG,
        params=ModelParams(0.0, 1.0),
        h=h,
        status="complete",
    )


# --- Poisson brackets of the momentum functions ------------------------------


def poisson_bracket_values(state: CotangentState) -> np.ndarray:
    """{P_A, P_B} for the six horizontal pairs at (m, l) = (0, 1).

    Exact differentiation of the momentum functions: with P_A = F[mu,A] p_mu,
    {P_A, P_B} = sum_i (d_i P_A F[i,B] - d_i P_B F[i,A]).
    """
    hp = ModelParams(0.0, 1.0)
    F = frame_matrix(state.q, hp)
    dF = frame_derivs(state.q, hp)
    dP = np.einsum("ima,m->ia", dF, state.p)  # d P_a / d x^i
    vals = np.empty(len(POISSON_PAIRS))
    for k, (a1, b1) in enumerate(POISSON_PAIRS):
        a, b = a1 - 1, b1 - 1
        vals[k] = float(dP[:, a] @ F[:, b] - dP[:, b] @ F[:, a])
    return vals


def poisson_check(state: CotangentState) -> np.ndarray:
    """|{P_A, P_B} + P_{[X_A, X_B]}| for the six horizontal pairs.

    The expected value -P_{[A,B]} expands the bracket in the frame from the
    exact structure constants at (m, l) = (0, 1); the momentum map is a Lie
    algebra anti-homomorphism, so every residual should vanish.
    """
    hp = ModelParams(0.0, 1.0)
    vals = poisson_bracket_values(state)
    c = structure_constants(state.q, hp)
    P = frame_momenta(state.q, state.p, hp)
    res = np.empty(len(POISSON_PAIRS))
    for k, (a1, b1) in enumerate(POISSON_PAIRS):
        expected = -float(c[a1 - 1, b1 - 1, :] @ P)
        res[k] = abs(vals[k] - expected)
    return res


# --- circle / line recognition ----------------------------------------------


@dataclass(frozen=True)
class CircleVerdict:
    """Outcome of the arc test on the horizontal projection of a trajectory.

    ``kind`` is ``circle`` (with center, radius, and the fitted rotation
    vector lam = (pr, ps, pt)), ``line``, or ``neither``; ``residual`` is the
    relative misfit of the constant-rotation model d2w/du2 = -Lambda dw/du.
    """

    kind: str
    center: Optional[np.ndarray]
    radius: Optional[float]
    lam: Optional[np.ndarray]
    residual: float


def _left_mult_matrix(v: np.ndarray) -> np.ndarray:
    """4x3 matrix M with (i l1 + j l2 + k l3) * v = M @ (l1, l2, l3)."""
    v0, v1, v2, v3 = v
    return np.array(
        [
            [-v1, -v2, -v3],
            [v0, v3, -v2],
            [-v3, v0, v1],
            [v2, -v1, v0],
        ]
    )


def circle_check(traj: Trajectory) -> CircleVerdict:
    """Classify the horizontal projection (w, x, y, z) as circle, line, or neither.

    Velocities and accelerations come from central divided differences on
    the uniform grid; a constant imaginary quaternion Lambda is fitted by
    least squares to d2w/du2 = -Lambda dw/du.  Negligible total velocity
    change means a line; a good fit with constant speed means a circle of
    radius (mean speed)/|Lambda| about the conserved center
    omega + Lambda^{-1} omega'; anything else is neither.
    """
    N = traj.n_samples
    if N < 8:
        raise TooFewSamples(f"need at least 8 samples for the arc test, got {N}")
    uu = traj.u
    h = float(uu[1] - uu[0])
    if h <= 0 or np.max(np.abs(np.diff(uu) - h)) > 1e-9 * max(abs(h), 1.0):
        raise ValueError("arc test requires a uniform increasing parameter grid")
    om = traj.q[:, 3:]
    v = (om[2:] - om[:-2]) / (2.0 * h)
    a = (om[2:] - 2.0 * om[1:-1] + om[:-2]) / (h * h)
    speeds = np.linalg.norm(v, axis=1)
    vmax = float(np.max(speeds))
    amax = float(np.max(np.linalg.norm(a, axis=1)))
    span = float(uu[-1] - uu[0])

    # line: the velocity change over the whole span is negligible
    if amax * span <= max(1e-6 * vmax, 1e-14):
        residual = amax * span / max(vmax, 1e-300)
        return CircleVerdict("line", None, None, None, residual)

    rows = np.concatenate([_left_mult_matrix(vk) for vk in v], axis=0)
    rhs = -a.reshape(-1)
    lam, *_ = np.linalg.lstsq(rows, rhs, rcond=None)
    misfit = float(np.linalg.norm(rows @ lam - rhs))
    scale = float(np.linalg.norm(rhs))
    residual = misfit / max(scale, 1e-300)
    speed_variation = float((np.max(speeds) - np.min(speeds)) / max(vmax, 1e-300))
    lam_norm = float(np.linalg.norm(lam))

    if residual < CIRCLE_RESIDUAL_TOL and speed_variation < CIRCLE_RESIDUAL_TOL and lam_norm > 0.0:
        lam_inv = np.concatenate([[0.0], -lam]) / lam_norm**2
        centers = om[1:-1] + qmul(np.broadcast_to(lam_inv, v.shape), v)
        center = centers.mean(axis=0)
        radius = float(np.mean(np.linalg.norm(om - center[None, :], axis=1)))
        return CircleVerdict("circle", center, radius, lam.copy(), residual)
    return CircleVerdict("neither", None, None, None, residual)
