"""Steady and transient drivers with the lagged discontinuity-capturing
linearization, and the linear-solve contract."""

import logging
import time
from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import LinearOperator, gmres, spilu, splu

from boundtransport.common.constants import LinearSolverKind, SolveMode
from boundtransport.common.errors import NonConvergenceError, SingularMatrixError
from boundtransport.fem.femcore import AssembledSystem, assemble, dirichlet_values
from boundtransport.fem.mesh import Mesh
from boundtransport.physics.models import ReactionCoefficients
from boundtransport.physics.xform import inflow_value, to_physical
from boundtransport.schemas.fem.settings import DCConfig, SolverConfig
from boundtransport.schemas.physics.params import Transform
from boundtransport.schemas.results.reports import PassStats, SolveReport

logger = logging.getLogger(__name__)

REFINEMENT_STEPS = 3


@dataclass(frozen=True, eq=False)
class TransportProblem:
    """Everything one concentration solve needs besides the solver settings."""

    mesh: Mesh
    velocity: np.ndarray
    reaction: ReactionCoefficients
    transform: Transform = field(default_factory=Transform)
    dc: DCConfig = field(default_factory=DCConfig)
    c_inflow: float = 0.0
    dirichlet: Mapping[int, float] | None = None

    def boundary_values(self) -> dict[int, float]:
        if self.dirichlet is not None:
            return dict(self.dirichlet)
        return dirichlet_values(self.mesh, self.velocity, self.transform, self.c_inflow)


def _residual(sys: AssembledSystem, x: np.ndarray) -> float:
    norm_b = float(np.linalg.norm(sys.rhs))
    if norm_b == 0.0:
        return float(np.linalg.norm(sys.matrix @ x))
    return float(np.linalg.norm(sys.rhs - sys.matrix @ x) / norm_b)


def linear_solve(
    sys: AssembledSystem,
    tol: float = 1e-10,
    max_iters: int = 1000,
    method: LinearSolverKind = LinearSolverKind.DIRECT,
) -> np.ndarray:
    """Solve the free-node system to the relative residual ``tol``.

    The direct path factorizes once and applies iterative refinement; the
    iterative path runs ILU-preconditioned GMRES.
    """
    A = sparse.csc_matrix(sys.matrix)
    b = np.asarray(sys.rhs, dtype=float)
    if A.shape[0] == 0:
        return np.zeros(0)
    if not np.any(b):
        return np.zeros_like(b)

    if method is LinearSolverKind.DIRECT:
        try:
            lu = splu(A)
        except RuntimeError as e:
            raise SingularMatrixError(f"factorization failed: {e}") from e
        x = lu.solve(b)
        if not np.all(np.isfinite(x)):
            raise SingularMatrixError("factorization produced non-finite values")
        for _ in range(REFINEMENT_STEPS):
            if _residual(sys, x) <= tol:
                break
            x = x + lu.solve(b - A @ x)
    else:
        try:
            ilu = spilu(A, drop_tol=1e-5, fill_factor=20)
        except RuntimeError as e:
            raise SingularMatrixError(f"incomplete factorization failed: {e}") from e
        M = LinearOperator(A.shape, ilu.solve)
        x, info = gmres(A, b, rtol=tol, atol=0.0, maxiter=max_iters, M=M, restart=100)
        if info < 0:
            raise SingularMatrixError("GMRES breakdown")

    residual = _residual(sys, x)
    if not residual <= tol:
        raise NonConvergenceError(
            f"linear solve reached relative residual {residual:.3e} > {tol:.1e}",
            residual=residual,
        )
    return x


def _pass_stats(index: int, problem: TransportProblem, cbar: np.ndarray) -> PassStats:
    c = np.asarray(to_physical(problem.transform, cbar))
    stats = PassStats(
        index=index,
        min=float(c.min()),
        max=float(c.max()),
        neg_nodes=int(np.count_nonzero(c < 0.0)),
    )
    logger.info(stats.log_line())
    return stats


def _solve(problem, cfg, dt, cbar_prev, cbar_old, dirichlet, nu_floor=None):
    sys = assemble(
        problem.mesh,
        problem.velocity,
        problem.reaction,
        problem.transform,
        dt=dt,
        cbar_prev=cbar_prev,
        cbar_old=cbar_old,
        cfg=problem.dc,
        dirichlet=dirichlet,
        nu_floor=nu_floor,
    )
    x = linear_solve(sys, cfg.linear_tol, cfg.max_linear_iters, cfg.linear_solver)
    return sys.expand(x), sys.dc_nu


def solve_steady(
    problem: TransportProblem, cfg: SolverConfig | None = None
) -> tuple[np.ndarray, SolveReport]:
    """Pass 1 without DC, then ``dc_passes − 1`` solves with ν_DC lagged on
    the previous pass. Returns c̄ and the per-pass statistics.

    ν_DC never decreases from one pass to the next: each pass uses the
    pointwise maximum of its own ν_DC and the one of the pass before.
    """
    cfg = cfg or SolverConfig()
    dirichlet = problem.boundary_values()
    passes = cfg.dc_passes if problem.dc.enabled else 1
    started = time.perf_counter()

    cbar = None
    nu = None
    history = []
    for i in range(1, passes + 1):
        cbar, nu = _solve(problem, cfg, None, cbar, None, dirichlet, nu)
        history.append(_pass_stats(i, problem, cbar))

    elapsed = time.perf_counter() - started
    logger.debug(f"steady solve finished in {elapsed:.2f}s")
    return cbar, SolveReport(passes=history, elapsed_s=elapsed)


def initial_condition(problem: TransportProblem) -> np.ndarray:
    """Inflow value extended over the whole mesh."""
    value = inflow_value(problem.transform, problem.c_inflow)
    return np.full(problem.mesh.n_nodes, value)


def solve_transient(
    problem: TransportProblem,
    cfg: SolverConfig,
    cbar0: np.ndarray | None = None,
) -> tuple[list[np.ndarray], SolveReport]:
    """Backward-Euler steps with ν_DC lagged one time level.

    Returns the initial field followed by every ``output_stride``-th step
    (the last step is always kept).
    """
    if cfg.mode is not SolveMode.TRANSIENT or cfg.dt is None:
        raise ValueError("transient solve needs mode=transient and a time step")
    dirichlet = problem.boundary_values()
    cbar = initial_condition(problem) if cbar0 is None else np.array(cbar0, dtype=float)
    started = time.perf_counter()

    frames = [cbar.copy()]
    history = []
    for step in range(1, cfg.n_steps + 1):
        lagged = cbar if problem.dc.enabled else None
        cbar, _ = _solve(problem, cfg, cfg.dt, lagged, cbar, dirichlet)
        if step % cfg.output_stride == 0 or step == cfg.n_steps:
            frames.append(cbar.copy())
            history.append(_pass_stats(step, problem, cbar))

    elapsed = time.perf_counter() - started
    logger.debug(f"{cfg.n_steps} time steps finished in {elapsed:.2f}s")
    return frames, SolveReport(passes=history, elapsed_s=elapsed)
