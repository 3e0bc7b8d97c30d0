"""Lanczos-type iterative solver driven by the two degree-gap recurrences.

One step advances the residual family and the monic auxiliary family
together:

    r_k = A_k [ (A^2 + B_k A + C_k I) r_{k-2} + (E_k A^2 + F_k A) z_{k-3} ]
    x_k = x_{k-2} - A_k [ (A + B_k I) r_{k-2} + (E_k A + F_k I) z_{k-3} ]
    z_k = (C_k A + D_k I) z_{k-3} + (A^2 + F_k A + G_k I) z_{k-2}

with coefficients computed from inner products against the sliding left
window u_j = (A^T)^j y. Degrees 1..4 are bootstrapped from direct moment
systems, the closed-form recurrences take over at k = 5. Breakdowns are
caught and answered by a minimal restart policy: keep the best iterate,
reseed y, bootstrap again.

Cost contract per step: 6 applications of A (A*r_{k-2} and A*z_{k-3}
products are reused between the r and x updates) plus one of A^T to
advance the left window. Bootstrap costs 10 applications of A plus 7 of
A^T.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import linalg, moments, oracle, recurrences
from .errors import (
    BootstrapBreakdown,
    BreakdownError,
    DimensionMismatch,
    NonexistentPolynomial,
    NumericOverflow,
    RestartsExhausted,
)

BOOTSTRAP_DEGREE = 4

STATUS_CONVERGED = "Converged"
STATUS_MAX_ITERATIONS = "MaxIterations"
STATUS_BREAKDOWN_EXHAUSTED = "BreakdownExhausted"


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-8
    max_iter: int | None = None  # defaults to 2n + 10 at solve time
    max_restarts: int = 5
    breakdown_eps: float = 1e-12
    seed: int = 0

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter is not None and self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.max_restarts < 0:
            raise ValueError("max_restarts must be >= 0")
        if not (0.0 < self.breakdown_eps < 1e-6):
            raise ValueError("breakdown_eps must lie in (0, 1e-6)")


@dataclass
class SolverState:
    """Iteration state positioned to produce degree k next.

    The windows hold exactly what one combined step consumes: the two
    previous iterates and residuals, three auxiliary vectors, and the
    five left vectors u_{k-2}..u_{k+2} (u_{j+1} = A^T u_j by
    construction). `history` is append-only across restarts.
    """

    k: int
    y: np.ndarray
    x_km1: np.ndarray | None = None
    x_km2: np.ndarray | None = None
    r_km1: np.ndarray | None = None
    r_km2: np.ndarray | None = None
    z_km1: np.ndarray | None = None
    z_km2: np.ndarray | None = None
    z_km3: np.ndarray | None = None
    u_window: list | None = None
    history: list = field(default_factory=list)
    best_x: np.ndarray | None = None
    best_resnorm: float = np.inf
    restarts: int = 0
    restart_causes: list = field(default_factory=list)
    converged: bool = False
    solution: np.ndarray | None = None


@dataclass(frozen=True)
class SolveReport:
    status: str
    iterations: int
    restarts: int
    restart_causes: tuple
    entries: tuple  # (k, residual_norm, event)
    final_relative_residual: float

    @property
    def residual_history(self) -> tuple:
        return tuple((k, rn) for k, rn, ev in self.entries if ev in ("bootstrap", "step"))


def bootstrap(A: linalg.Matrix, b, x0, y, tol: float = 1e-8) -> SolverState:
    """Set up the iteration by solving the degree 1..4 moment systems directly.

    Builds ten Krylov vectors A^i r0 once and forms moments, the oracle
    polynomials P_1..P_4 and P1_1..P1_4, and from them r_j, z_j and x_j
    as linear combinations (no further matvecs). The left window
    u_3..u_7 is seeded with seven transpose products. Early convergence
    (some ||r_j|| <= tol * ||b||) short-circuits; a nonexistent oracle
    polynomial with the residual still above tolerance raises
    BootstrapBreakdown.
    """
    bv = linalg.as_vector(b)
    x0v = linalg.as_vector(x0)
    yv = linalg.as_vector(y)
    if A.rows != A.cols or A.rows != len(bv) or len(x0v) != len(bv) or len(yv) != len(bv):
        raise DimensionMismatch("bootstrap: inconsistent dimensions")
    if not np.any(yv):
        raise ValueError("left seed y must be nonzero")
    bn = float(np.linalg.norm(bv))
    conv_floor = tol * bn

    r0 = bv - linalg.matvec(A, x0v)
    state = SolverState(k=0, y=yv, best_x=x0v.copy(), best_resnorm=float(np.linalg.norm(r0)))
    state.history.append((0, state.best_resnorm, "bootstrap"))
    if state.best_resnorm <= conv_floor:
        state.converged = True
        state.solution = x0v.copy()
        return state

    powers = moments.krylov_vectors(A, r0, 2 * BOOTSTRAP_DEGREE + 1)
    c = moments.MomentSequence(
        np.array([float(yv @ p) for p in powers]),
        (f"matrix:{A.rows}x{A.cols}", f"r0:{len(r0)}", f"y:{len(yv)}"),
    )

    xs = {0: x0v.copy()}
    rs = {0: r0}
    zs = {0: r0.copy()}
    for j in range(1, BOOTSTRAP_DEGREE + 1):
        try:
            pj = oracle.oracle_p(c, j)
            p1j = oracle.oracle_p1(c, j)
        except NonexistentPolynomial as exc:
            if state.best_resnorm <= conv_floor:
                state.converged = True
                state.solution = state.best_x
                return state
            raise BootstrapBreakdown(j) from exc
        rs[j] = sum(pj.coeffs[i] * powers[i] for i in range(j + 1))
        zs[j] = sum(p1j.coeffs[i] * powers[i] for i in range(j + 1))
        xs[j] = x0v - sum(pj.coeffs[i] * powers[i - 1] for i in range(1, j + 1))
        rn = float(np.linalg.norm(rs[j]))
        if not np.isfinite(rn):
            raise NumericOverflow("bootstrap residual overflowed")
        state.history.append((j, rn, "bootstrap"))
        if rn < state.best_resnorm:
            state.best_resnorm, state.best_x = rn, xs[j].copy()
        if rn <= conv_floor:
            state.converged = True
            state.solution = xs[j]
            state.k = j + 1
            return state

    us = [yv]
    for _ in range(BOOTSTRAP_DEGREE + 3):
        us.append(linalg.transpose_matvec(A, us[-1]))

    state.k = BOOTSTRAP_DEGREE + 1
    state.x_km1, state.x_km2 = xs[4], xs[3]
    state.r_km1, state.r_km2 = rs[4], rs[3]
    state.z_km1, state.z_km2, state.z_km3 = zs[4], zs[3], zs[2]
    state.u_window = us[3:8]
    return state


def step(state: SolverState, A: linalg.Matrix, b, eps: float = 1e-12) -> SolverState:
    """Advance one degree: new r, x, z and a one-slot shift of the left window.

    Exactly 6 applications of A plus 1 of A^T. Breakdowns from the
    coefficient computation propagate before any state is modified.
    """
    if state.k < BOOTSTRAP_DEGREE + 1 or state.u_window is None:
        raise ValueError("state is not positioned for recurrence steps")
    sp = recurrences.assemble_scalar_products(state.u_window, state.r_km2, state.z_km3, state.z_km2)
    ca = recurrences.a13_coefficients(sp, eps=eps)
    cb = recurrences.b13_coefficients(sp, eps=eps)

    ar = linalg.matvec(A, state.r_km2)
    a2r = linalg.matvec(A, ar)
    az3 = linalg.matvec(A, state.z_km3)
    a2z3 = linalg.matvec(A, az3)
    r_k = ca.a_k * (a2r + ca.b_k * ar + ca.c_k * state.r_km2 + ca.e_k * a2z3 + ca.f_k * az3)
    x_k = state.x_km2 - ca.a_k * (ar + ca.b_k * state.r_km2 + ca.e_k * az3 + ca.f_k * state.z_km3)

    az2 = linalg.matvec(A, state.z_km2)
    a2z2 = linalg.matvec(A, az2)
    z_k = cb.c_k * az3 + cb.d_k * state.z_km3 + a2z2 + cb.f_k * az2 + cb.g_k * state.z_km2

    rn = float(np.linalg.norm(r_k))
    if not (np.isfinite(rn) and np.all(np.isfinite(z_k)) and np.all(np.isfinite(x_k))):
        raise NumericOverflow(f"iterate overflowed at degree {state.k}")

    u_next = linalg.transpose_matvec(A, state.u_window[-1])
    new = replace(
        state,
        k=state.k + 1,
        x_km1=x_k, x_km2=state.x_km1,
        r_km1=r_k, r_km2=state.r_km1,
        z_km1=z_k, z_km2=state.z_km1, z_km3=state.z_km2,
        u_window=state.u_window[1:] + [u_next],
        history=state.history + [(state.k, rn, "step")],
        restart_causes=list(state.restart_causes),
    )
    if rn < new.best_resnorm:
        new.best_resnorm, new.best_x = rn, x_k.copy()
    return new


def restart(state: SolverState, A: linalg.Matrix, b, config: SolverConfig,
            cause: str = "Unknown", rng=None) -> SolverState:
    """Answer a breakdown: keep the best iterate, reseed y, bootstrap again.

    Short-circuits to a converged state when the best residual already
    meets the tolerance. Every bootstrap attempt consumes one unit of the
    restart budget; RestartsExhausted is raised when it runs out. History
    is carried over append-only.
    """
    bv = linalg.as_vector(b)
    bn = float(np.linalg.norm(bv))
    if state.best_resnorm <= config.tol * bn:
        done = replace(state, converged=True, solution=state.best_x,
                       history=list(state.history), restart_causes=list(state.restart_causes))
        return done
    if rng is None:
        rng = np.random.default_rng(config.seed)

    history = list(state.history)
    causes = list(state.restart_causes)
    restarts = state.restarts
    best_x, best_rn = state.best_x, state.best_resnorm
    k_at_failure = state.k
    while True:
        restarts += 1
        if restarts > config.max_restarts:
            raise RestartsExhausted(f"{restarts - 1} restarts used without convergence")
        causes.append(cause)
        history.append((k_at_failure, best_rn, f"restart:{cause}"))
        y = _draw_left_seed(rng, A, bv, best_x)
        try:
            fresh = bootstrap(A, bv, best_x, y, tol=config.tol)
        except (BreakdownError, NumericOverflow) as exc:
            cause = _cause_label(exc)
            k_at_failure = 0
            continue
        break

    fresh.history = history + fresh.history
    fresh.restarts = restarts
    fresh.restart_causes = causes
    if best_rn < fresh.best_resnorm:
        fresh.best_resnorm, fresh.best_x = best_rn, best_x
    return fresh


def solve(A: linalg.Matrix, b, x0=None, config: SolverConfig | None = None):
    """Run the solver until convergence, iteration cap, or restart exhaustion.

    Returns (x, SolveReport). Never raises on numerical failure; every
    failure mode lands in the report status. The convergence test is
    ||r_k|| <= tol * ||b||.
    """
    cfg = config if config is not None else SolverConfig()
    bv = linalg.as_vector(b)
    n = A.rows
    if A.cols != n or len(bv) != n:
        raise DimensionMismatch("solve needs a square matrix matching b")
    x0v = np.zeros(n) if x0 is None else linalg.as_vector(x0)
    max_iter = cfg.max_iter if cfg.max_iter is not None else 2 * n + 10
    rng = np.random.default_rng(cfg.seed)
    bn = float(np.linalg.norm(bv))
    conv_floor = cfg.tol * bn

    y = _draw_left_seed(rng, A, bv, x0v)
    try:
        state = bootstrap(A, bv, x0v, y, tol=cfg.tol)
    except (BreakdownError, NumericOverflow) as exc:
        r0n = float(np.linalg.norm(bv - linalg.matvec(A, x0v)))
        seed_state = SolverState(k=0, y=y, best_x=x0v.copy(), best_resnorm=r0n,
                                 history=[(0, r0n, "bootstrap")])
        try:
            state = restart(seed_state, A, bv, cfg, cause=_cause_label(exc), rng=rng)
        except RestartsExhausted:
            return seed_state.best_x, _report(seed_state, STATUS_BREAKDOWN_EXHAUSTED, bn)

    while True:
        if state.converged:
            status = STATUS_CONVERGED
            break
        if _iterations(state.history) >= max_iter:
            status = STATUS_MAX_ITERATIONS
            break
        try:
            state = step(state, A, bv, eps=cfg.breakdown_eps)
        except (BreakdownError, NumericOverflow) as exc:
            try:
                state = restart(state, A, bv, cfg, cause=_cause_label(exc), rng=rng)
            except RestartsExhausted:
                status = STATUS_BREAKDOWN_EXHAUSTED
                break
            continue
        if state.history[-1][1] <= conv_floor:
            state.converged = True
            state.solution = state.x_km1
    x = state.solution if state.solution is not None else state.best_x
    return x, _report(state, status, bn)


def _iterations(history) -> int:
    return sum(1 for k, _, ev in history if k >= 1 and ev in ("bootstrap", "step"))


def _cause_label(exc) -> str:
    if isinstance(exc, BreakdownError):
        return exc.cause
    return "Overflow"


def _draw_left_seed(rng, A, b, x0, max_tries: int = 1000) -> np.ndarray:
    """Unit-normal y, rejected while nearly orthogonal to the current residual."""
    r0 = b - linalg.matvec(A, x0)
    r0n = float(np.linalg.norm(r0))
    for _ in range(max_tries):
        y = rng.standard_normal(len(b))
        if r0n == 0.0:
            return y
        if abs(float(y @ r0)) >= 1e-10 * float(np.linalg.norm(y)) * r0n:
            return y
    raise RuntimeError("could not draw a usable left seed")


def _report(state: SolverState, status: str, bn: float) -> SolveReport:
    denom = bn if bn > 0 else 1.0
    return SolveReport(
        status=status,
        iterations=_iterations(state.history),
        restarts=state.restarts,
        restart_causes=tuple(state.restart_causes),
        entries=tuple(state.history),
        final_relative_residual=state.best_resnorm / denom,
    )
