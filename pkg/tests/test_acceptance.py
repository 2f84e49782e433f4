"""End-to-end checks on the channel and vortex cases and high-precision
oracles for the model formulas. Marked slow; run with ``pytest -m slow``."""

import math
from decimal import Decimal, getcontext
from functools import lru_cache

import numpy as np
import pytest
from scipy.integrate import dblquad

from boundtransport.analysis.postproc import delta_phb
from boundtransport.cases.channel import build_channel, channel_analytic
from boundtransport.cases.vortex import write_vortex_case
from boundtransport.common.constants import DC_VARIANTS, SurfaceAreaMethod, TransformKind
from boundtransport.fem.femcore import assemble
from boundtransport.fem.solver import TransportProblem, solve_steady
from boundtransport.fileio.run_config import parse_config
from boundtransport.physics.models import mass_transfer, pore_coefficients, powerlaw_coefficients
from boundtransport.physics.morphology import area_strain, effective_stress
from boundtransport.physics.xform import to_physical
from boundtransport.pipeline import run
from boundtransport.schemas.fem.settings import DCConfig
from boundtransport.schemas.physics.cases import ChannelSpec, VortexSpec
from boundtransport.schemas.physics.params import (
    POWER_LAW_PRESETS,
    MorphologyParams,
    PoreModelParams,
    Transform,
)

pytestmark = pytest.mark.slow

getcontext().prec = 50


def dc(variant: str) -> DCConfig:
    operator, diffusivity = DC_VARIANTS[variant]
    return DCConfig(operator=operator, diffusivity=diffusivity)


@lru_cache
def channel_solution(nx: int, ny: int, kind: TransformKind, variant: str):
    case = build_channel(ChannelSpec(nx=nx, ny=ny))
    problem = TransportProblem(case.mesh, case.velocity, case.reaction, Transform(kind=kind), dc(variant))
    cbar, report = solve_steady(problem)
    return case, np.asarray(to_physical(problem.transform, cbar)), report


def upper_outflow(case, c: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    x, y = case.mesh.nodes.T
    on_line = np.flatnonzero((x == case.spec.length) & (y > case.spec.layer_top))
    order = np.argsort(y[on_line])
    return y[on_line][order], c[on_line][order]


def l2_error(case, c: np.ndarray) -> float:
    x, y = case.mesh.nodes.T
    err2 = (c - channel_analytic(x, y, case.spec)) ** 2
    return math.sqrt(float(np.sum(case.mesh.geometry.volume * err2[case.mesh.elements].mean(axis=1))))


def assert_undershoot_never_grows(report, noise: float = 1e-12) -> None:
    undershoot = [abs(min(p.min, 0.0)) for p in report.passes]
    for before, after in zip(undershoot, undershoot[1:]):
        assert after <= before or after <= noise, undershoot


class TestChannelBounds:
    def test_untransformed_solution_over_and_undershoots(self):
        _, c, _ = channel_solution(100, 50, TransformKind.IDENTITY, "none")
        assert c.min() < 0.0
        assert c.max() > 1.0
        assert 1e-4 <= abs(c.min()) <= 1e-1

    def test_upper_bound_transform_stays_below_one(self):
        _, c, report = channel_solution(100, 50, TransformKind.UPPER_BOUND, "none")
        assert np.all(c < 1.0)
        assert report.passes[0].max < 1.0

    def test_crosswind_quadratic_dc_reduces_undershoot(self):
        _, reference, _ = channel_solution(100, 50, TransformKind.IDENTITY, "none")
        _, c, report = channel_solution(100, 50, TransformKind.IDENTITY, "cwd-quad")
        assert abs(min(c.min(), 0.0)) <= abs(reference.min()) / 100.0
        assert_undershoot_never_grows(report)

    def test_crosswind_linear_dc_removes_undershoot(self):
        _, c, report = channel_solution(100, 50, TransformKind.IDENTITY, "cwd-lin")
        assert c.min() >= -1e-12
        assert_undershoot_never_grows(report)

    def test_upper_bound_with_quadratic_dc_is_bounded_on_both_sides(self):
        _, reference, _ = channel_solution(100, 50, TransformKind.UPPER_BOUND, "none")
        _, c, report = channel_solution(100, 50, TransformKind.UPPER_BOUND, "cwd-quad")
        assert np.all(c < 1.0)
        assert reference.min() < 0.0
        assert abs(min(c.min(), 0.0)) <= abs(reference.min()) / 100.0
        assert_undershoot_never_grows(report)


class TestChannelAnalytic:
    def test_error_decreases_under_refinement(self):
        errors = [
            l2_error(*channel_solution(nx, ny, TransformKind.UPPER_BOUND, "none")[:2])
            for nx, ny in ((20, 10), (40, 20), (80, 40))
        ]
        assert errors[0] > errors[1] > errors[2]

    def test_upper_outflow_stays_near_zero_with_quadratic_dc(self):
        case, c, _ = channel_solution(80, 40, TransformKind.UPPER_BOUND, "cwd-quad")
        _, values = upper_outflow(case, c)
        assert len(values) > 0
        assert np.abs(values).max() <= 1e-3

    def test_linear_dc_is_more_diffusive_than_quadratic(self):
        deviation = {}
        for variant in ("cwd-lin", "cwd-quad"):
            case, c, _ = channel_solution(100, 50, TransformKind.IDENTITY, variant)
            y, values = upper_outflow(case, c)
            deviation[variant] = float(np.trapezoid(np.abs(values), y))
        assert deviation["cwd-lin"] > deviation["cwd-quad"]


class TestDCOperators:
    def test_dc_matrix_is_positive_semidefinite(self, rng):
        case = build_channel(ChannelSpec(nx=10, ny=5))
        cbar = rng.normal(size=case.mesh.n_nodes)
        for variant in ("iso-lin", "iso-quad", "cwd-lin", "cwd-quad", "codina"):
            sys = assemble(
                case.mesh, case.velocity, case.reaction, Transform(), cbar_prev=cbar, cfg=dc(variant)
            )
            base = assemble(case.mesh, case.velocity, case.reaction, Transform())
            D = (sys.matrix - base.matrix).toarray()
            D = 0.5 * (D + D.T)
            assert np.linalg.eigvalsh(D).min() >= -1e-12 * max(1.0, np.abs(D).max())


class TestFormulaOracles:
    def test_powerlaw_rate(self, rng):
        names = sorted(POWER_LAW_PRESETS)
        for _ in range(100):
            p = POWER_LAW_PRESETS[names[rng.integers(len(names))]]
            sigma = float(rng.uniform(1.0, 1000.0))
            expected = (Decimal(p.A) * Decimal(sigma) ** Decimal(p.alpha)) ** (1 / Decimal(p.beta))
            assert powerlaw_coefficients(sigma, p).mu_r == pytest.approx(float(expected), rel=1e-10)

    def test_mass_transfer(self, rng):
        p = PoreModelParams()
        for _ in range(100):
            g = float(rng.uniform(1.0, 1e5))
            expected = Decimal(p.h) * Decimal(g) ** Decimal(p.k_exp)
            assert mass_transfer(g, p) == pytest.approx(float(expected), rel=1e-10)

    def test_effective_stress(self, rng):
        p = MorphologyParams()
        for _ in range(100):
            D = float(rng.uniform(0.0, 0.99))
            visc = float(rng.uniform(0.01, 0.1))
            expected = (
                2 * Decimal(visc) * Decimal(p.alpha1) * Decimal(D)
                / ((1 - Decimal(D) ** 2) * Decimal(p.alpha2))
            )
            assert effective_stress(D, visc, p) == pytest.approx(float(expected), rel=1e-10, abs=0.0)

    def test_area_strain_against_surface_quadrature(self, rng):
        for _ in range(100):
            a, b, c = rng.uniform(1.2, 3.0, size=3)

            def integrand(theta, phi):
                s, co = math.sin(theta), math.cos(theta)
                return s * math.sqrt(
                    (b * c * s * math.cos(phi)) ** 2 + (a * c * s * math.sin(phi)) ** 2 + (a * b * co) ** 2
                )

            area, _ = dblquad(integrand, 0.0, math.pi / 2, 0.0, math.pi / 2, epsabs=0.0, epsrel=1e-13)
            Q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
            S = Q @ np.diag([a * a, b * b, c * c]) @ Q.T
            expected = (8.0 * area - 4.0 * math.pi) / (4.0 * math.pi)
            assert area_strain(S, 4.0 * math.pi, SurfaceAreaMethod.EXACT) == pytest.approx(expected, rel=1e-10)

    def test_delta_phb(self, rng):
        for _ in range(100):
            ih = float(rng.uniform(0.0, 1e-4))
            hct = float(rng.uniform(0.2, 0.5))
            q, t, v = (float(x) for x in rng.uniform(1.0, 500.0, size=3))
            expected = (
                Decimal(ih) * Decimal(15000) / (1 - Decimal(hct)) * Decimal(q) * 1000 * Decimal(t) / Decimal(v)
            )
            assert delta_phb(ih, 15000.0, hct, q, t, v) == pytest.approx(float(expected), rel=1e-10)

    def test_pore_model_below_threshold_releases_nothing(self, rng):
        p = PoreModelParams()
        eps = rng.uniform(-0.5, p.eps0, size=100)
        g = rng.uniform(0.0, 1e4, size=100)
        np.testing.assert_array_equal(pore_coefficients(eps, g, p).mu_r, 0.0)


class TestVortexPipeline:
    def run_variant(self, tmp_path, variant: str):
        operator, diffusivity = DC_VARIANTS[variant]
        overrides = {"dc": {"operator": operator.value, "diffusivity": diffusivity.value}}
        path = write_vortex_case(tmp_path / variant, VortexSpec(nr=16, ntheta=48), overrides)
        return run(parse_config(path))

    def test_quadratic_dc_run(self, tmp_path):
        summary = self.run_variant(tmp_path, "cwd-quad")
        assert summary.stats.max < 1.0
        assert_undershoot_never_grows(summary.report)
        assert summary.outflow is not None
        assert summary.outflow.ih_out >= 0.0
        assert math.isfinite(summary.outflow.delta_phb)
        assert summary.outflow.delta_phb == pytest.approx(
            delta_phb(summary.outflow.ih_out, 15000.0, 0.36, 6.0, 120.0, 250.0)
        )
        out = tmp_path / "cwd-quad" / "results"
        assert (out / "solution.vtk").exists()
        assert (out / "line_radial.csv").exists()

    def test_linear_dc_run_has_no_negative_values(self, tmp_path):
        summary = self.run_variant(tmp_path, "cwd-lin")
        assert summary.stats.min >= -1e-12
        assert_undershoot_never_grows(summary.report)
        assert summary.stats.max < 1.0
