"""End-to-end run: build the problem a RunConfig describes, solve it and
write every artifact under the output directory."""

import logging
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from boundtransport.analysis.postproc import (
    delta_phb,
    field_stats,
    outflow_average,
    sample_line,
)
from boundtransport.cases.channel import build_channel
from boundtransport.common.constants import (
    WHOLE_BLOOD_VISCOSITY,
    ReactionModelKind,
    SolveMode,
    StressMeasure,
    TransformKind,
)
from boundtransport.common.errors import ConfigError, InputOutputError
from boundtransport.config import get_configs
from boundtransport.fem.femcore import recover_gradient
from boundtransport.fem.mesh import Mesh
from boundtransport.fem.solver import TransportProblem, solve_steady, solve_transient
from boundtransport.fileio.fields import (
    read_nodal_field,
    write_line_csv,
    write_nodal_field,
    write_stats_csv,
)
from boundtransport.fileio.mesh_io import load_mesh
from boundtransport.fileio.run_config import dump_config
from boundtransport.fileio.vtk import write_vtk
from boundtransport.physics import morphology
from boundtransport.physics.models import (
    ReactionCoefficients,
    drug_coefficients,
    ih_from_linearized,
    pore_coefficients,
    powerlaw_coefficients,
    shear_rate,
    strain_rate_invariant_stress,
)
from boundtransport.physics.xform import to_physical
from boundtransport.schemas.physics.params import PowerLawParams, Transform
from boundtransport.schemas.requests.run_config import RunConfig
from boundtransport.schemas.results.reports import OutflowSummary, RunSummary

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PreparedRun:
    """Problem data derived from a config, before any solve."""

    problem: TransportProblem
    powerlaw: PowerLawParams | None
    extra_fields: dict[str, np.ndarray]


def _flow(config: RunConfig):
    case = None
    if config.mesh.source == "channel":
        case = build_channel(config.channel)
        mesh = case.mesh
    else:
        mesh = load_mesh(config.mesh.path, config.mesh.format)
    if config.velocity.source == "channel":
        velocity = case.velocity
    else:
        velocity = read_nodal_field(config.velocity.path, mesh.n_nodes, mesh.dim)
    return mesh, velocity, case


def _morphology_state(config: RunConfig, grad_u: np.ndarray) -> np.ndarray:
    m = config.model.morphology
    started = time.perf_counter()
    S = morphology.steady_morphology(
        grad_u, m.params, t_end=m.t_end, dt=m.dt, steady_tol=m.steady_tol
    )
    logger.debug(f"morphology for {len(S)} nodes in {time.perf_counter() - started:.2f}s")
    return S


def _reaction(config: RunConfig, mesh: Mesh, velocity: np.ndarray, case):
    model = config.model
    extra: dict[str, np.ndarray] = {}
    from_channel = case is not None and config.velocity.source == "channel"
    visc = model.viscosity or (config.channel.visc if from_channel else WHOLE_BLOOD_VISCOSITY)

    grad_u = None

    def gradient() -> np.ndarray:
        nonlocal grad_u
        if grad_u is None:
            grad_u = recover_gradient(mesh, velocity)
        return grad_u

    if model.kind is ReactionModelKind.DRUG:
        return drug_coefficients(model.drug_c0), None, extra

    if model.kind is ReactionModelKind.POWER_LAW:
        params = model.powerlaw_params(config.channel.powerlaw)
        if model.stress is StressMeasure.FIELD:
            sigma = read_nodal_field(model.stress_field, mesh.n_nodes, 1)
        elif model.stress is StressMeasure.MORPHOLOGY:
            S = _morphology_state(config, gradient())
            L, W = morphology.semi_axes(S)
            D = morphology.distortion(L, W)
            extra["distortion"] = np.asarray(D)
            sigma = np.asarray(morphology.effective_stress(D, visc, model.morphology.params))
        elif from_channel:
            sigma = case.sigma_s
        else:
            sigma = np.asarray(strain_rate_invariant_stress(gradient(), visc))
        extra["sigma"] = sigma
        return powerlaw_coefficients(sigma, params), params, extra

    if model.strain_field is not None:
        eps = read_nodal_field(model.strain_field, mesh.n_nodes, 1)
    else:
        S = _morphology_state(config, gradient())
        m = model.morphology
        reference = m.reference_area or morphology.ellipsoid_area(1.0, 1.0, 1.0, m.area_method)
        eps = np.asarray(morphology.area_strain(S, reference, m.area_method))
    if model.shear_rate_field is not None:
        g_f = read_nodal_field(model.shear_rate_field, mesh.n_nodes, 1)
    else:
        g_f = np.asarray(shear_rate(gradient()))
    extra["area_strain"] = eps
    extra["shear_rate"] = g_f
    return pore_coefficients(eps, g_f, model.pore), None, extra


def _transform(config: RunConfig, reaction: ReactionCoefficients) -> Transform:
    t = config.transform
    nu_r = float(np.max(reaction.nu_r))
    if t.nu is not None and t.kind is not TransformKind.IDENTITY:
        reacting = np.any(np.asarray(reaction.mu_r) != 0.0)
        if reacting and not np.isclose(t.nu, nu_r, rtol=1e-12, atol=0.0):
            raise ConfigError(
                f"transform.nu = {t.nu} differs from the model saturation value {nu_r}",
                key="transform.nu",
            )
    return Transform(kind=t.kind, nu=t.nu or nu_r, k=t.k)


def prepare(config: RunConfig) -> PreparedRun:
    mesh, velocity, case = _flow(config)
    reaction, powerlaw, extra = _reaction(config, mesh, velocity, case)
    problem = TransportProblem(
        mesh=mesh,
        velocity=velocity,
        reaction=reaction,
        transform=_transform(config, reaction),
        dc=config.dc,
        c_inflow=config.c_inflow,
    )
    return PreparedRun(problem=problem, powerlaw=powerlaw, extra_fields=extra)


def _hemolysis_index(config: RunConfig, prepared: PreparedRun, c: np.ndarray):
    if prepared.powerlaw is not None:
        return np.asarray(
            ih_from_linearized(c, prepared.powerlaw.beta, config.model.clamp_negative)
        )
    if config.model.kind is ReactionModelKind.PORE:
        return c
    return None


def output_dir(config: RunConfig) -> Path:
    return Path(config.output.dir or get_configs().BT_OUTPUT_DIR)


def run(config: RunConfig) -> RunSummary:
    started = time.perf_counter()
    out = output_dir(config)
    prepared = prepare(config)
    problem = prepared.problem
    mesh = problem.mesh
    logger.info(
        f"solving {config.model.kind.value} on {mesh.n_elements} elements, "
        f"transform={problem.transform.kind.value} dc={config.dc.operator.value}"
    )

    frames: list[np.ndarray] = []
    if config.solver.mode is SolveMode.TRANSIENT:
        frames, report = solve_transient(problem, config.solver)
        cbar = frames[-1]
    else:
        cbar, report = solve_steady(problem, config.solver)
    c = np.asarray(to_physical(problem.transform, cbar))
    ih = _hemolysis_index(config, prepared, c)

    fields = {"cbar": cbar, "c": c, "velocity": problem.velocity}
    fields["mu_r"] = np.asarray(problem.reaction.on_nodes(mesh.n_nodes).mu_r)
    if ih is not None:
        fields["IH"] = ih
    fields.update(prepared.extra_fields)

    artifacts = [dump_config(config, out / "config.json")]
    artifacts.append(write_vtk(mesh, fields, out / config.output.vtk_name))
    if len(frames) > 1:
        for k, frame in enumerate(frames):
            physical = np.asarray(to_physical(problem.transform, frame))
            path = out / f"frame_{k:04d}.vtk"
            artifacts.append(write_vtk(mesh, {"cbar": frame, "c": physical}, path))
    if config.output.write_fields:
        artifacts.append(write_nodal_field(out / "cbar.csv", cbar))
        artifacts.append(write_nodal_field(out / "c.csv", c))

    stats = field_stats(mesh, c)
    logger.info(f"min={stats.min:.6e} max={stats.max:.6e} neg_nodes={stats.negative_node_count}")
    artifacts.append(write_stats_csv(out / "stats.csv", stats))
    for probe in config.probes:
        samples = sample_line(mesh, c, probe.p0, probe.p1, probe.n)
        artifacts.append(write_line_csv(out / f"line_{probe.name}.csv", samples))

    outflow = None
    if config.outflow is not None:
        o = config.outflow
        target = ih if ih is not None else c
        ih_out = outflow_average(mesh, target, problem.velocity, o.marker)
        outflow = OutflowSummary(
            marker=o.marker,
            ih_out=ih_out,
            delta_phb=delta_phb(ih_out, o.hb, o.hct, o.q_lpm, o.t_min, o.v_loop_ml)
            if ih is not None
            else None,
        )
        logger.info(f"outflow {o.marker}: IH={ih_out:.6e} ΔPHb={outflow.delta_phb}")

    summary = RunSummary(
        success=True, stats=stats, report=report, artifacts=artifacts, outflow=outflow
    )
    summary_path = out / "summary.json"
    summary = summary.model_copy(update={"artifacts": artifacts + [summary_path]})
    try:
        summary_path.write_text(
            summary.model_dump_json(indent=2, exclude={"report": {"elapsed_s"}}),
            encoding="utf-8",
        )
    except OSError as e:
        raise InputOutputError(f"cannot write {summary_path}: {e}", module="io_cli") from e
    logger.info(f"run finished in {time.perf_counter() - started:.2f}s, results in {out}")
    return summary
