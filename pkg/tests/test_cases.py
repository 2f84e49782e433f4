import numpy as np
import pytest
from pydantic import ValidationError
from scipy.integrate import solve_ivp

from boundtransport.cases.channel import (
    build_channel,
    channel_analytic,
    channel_mesh,
    channel_rows,
    channel_shear_stress,
    channel_velocity,
)
from boundtransport.cases.vortex import (
    build_vortex,
    vortex_gradient,
    vortex_velocity,
    write_vortex_case,
)
from boundtransport.fem.mesh import inflow_nodes
from boundtransport.fileio.mesh_io import load_mesh
from boundtransport.fileio.run_config import parse_config
from boundtransport.common.constants import MeshFormat
from boundtransport.schemas.physics.cases import ChannelSpec, VortexSpec


class TestChannel:
    def test_velocity_profile(self):
        assert channel_velocity(0.5) == 300.0
        assert channel_velocity(0.6) == 300.0
        assert channel_velocity(0.0) == pytest.approx(50.0)

    def test_shear_stress_at_wall(self):
        assert channel_shear_stress(0.0) == pytest.approx(350.0)
        assert channel_shear_stress(0.55) == 0.0

    def test_analytic_solution_limits(self):
        assert channel_analytic(0.0, 0.2) == 0.0
        assert channel_analytic(1.3, 0.55) == 0.0
        wall = channel_analytic(2.0, 0.0)
        assert wall < 1.0
        assert wall == pytest.approx(1.0)

    def test_analytic_solution_solves_streamline_ode(self):
        spec = ChannelSpec()
        y = 0.49
        rate = (spec.visc * 2.0 * spec.profile_coeff * (0.5 - y)) ** 2
        u = channel_velocity(y)
        sol = solve_ivp(lambda _, l: rate * (1.0 - l) / u, (0.0, 2.0), [0.0], rtol=1e-12, atol=1e-14)
        assert channel_analytic(2.0, y) == pytest.approx(sol.y[0, -1], rel=1e-8)

    def test_coarse_mesh_counts(self):
        case = build_channel(ChannelSpec(nx=2, ny=2))
        assert case.mesh.n_nodes == 9
        assert case.mesh.n_elements == 8
        assert case.mesh.markers == ["bottom", "inlet", "outlet", "top"]
        assert case.mesh.geometry.volume.sum() == pytest.approx(2.0 * 0.62)

    def test_case_fields(self, small_channel):
        y = small_channel.mesh.nodes[:, 1]
        np.testing.assert_allclose(small_channel.velocity[:, 0], channel_velocity(y))
        np.testing.assert_array_equal(small_channel.velocity[:, 1], 0.0)
        np.testing.assert_allclose(small_channel.reaction.mu_r, small_channel.sigma_s**2)
        inlet = set(small_channel.mesh.nodes_with_marker("inlet").tolist())
        assert inflow_nodes(small_channel.mesh, small_channel.velocity) == inlet

    def test_rows_are_graded_toward_the_layer_edge(self):
        spec = ChannelSpec()
        ys = channel_rows(spec)
        assert ys[0] == 0.0
        assert ys[-1] == pytest.approx(spec.height)
        assert spec.layer_top in ys
        gaps = np.diff(ys)
        assert np.all(gaps > 0.0)
        k = int(np.flatnonzero(ys == spec.layer_top)[0])
        assert gaps[k - 1] < gaps[0]
        assert gaps[k] < gaps[-1]

    def test_mesh_keeps_a_row_on_the_layer_edge(self):
        spec = ChannelSpec()
        mesh = channel_mesh(spec)
        y = mesh.nodes[:, 1]
        assert np.count_nonzero(y == spec.layer_top) == spec.nx + 1
        rows = np.tile(channel_rows(spec), spec.nx + 1)
        assert np.all(np.sign(y - spec.layer_top) == np.sign(rows - spec.layer_top))

    def test_jitter_leaves_the_boundary_alone(self):
        spec = ChannelSpec(nx=30, ny=15)
        jittered = channel_mesh(spec).nodes
        grid = channel_mesh(spec.model_copy(update={"jitter": 0.0})).nodes
        x, y = grid.T
        boundary = (x == 0.0) | (x == spec.length) | (y == 0.0) | (y == grid[:, 1].max())
        np.testing.assert_array_equal(jittered[boundary], grid[boundary])
        moved = np.abs(jittered - grid).max(axis=1) > 0.0
        assert np.all(moved[~boundary])
        far = np.abs(y - spec.layer_top) >= spec.jitter_band
        np.testing.assert_array_equal(jittered[far, 1], grid[far, 1])
        assert np.all(channel_mesh(spec).geometry.volume > 0.0)

    def test_mesh_is_reproducible(self):
        spec = ChannelSpec(nx=12, ny=8)
        np.testing.assert_array_equal(channel_mesh(spec).nodes, channel_mesh(spec).nodes)

    def test_layer_edge_must_lie_inside(self):
        with pytest.raises(ValidationError):
            ChannelSpec(height=0.5, layer_top=0.5)

    def test_analytic_field_is_bounded(self, small_channel):
        x, y = small_channel.mesh.nodes.T
        l_ih = channel_analytic(x, y)
        assert np.all(l_ih >= 0.0)
        assert np.all(l_ih < 1.0)


class TestVortex:
    def test_gradient_matches_finite_differences(self):
        points = np.array([[0.7, 0.2], [-1.1, 0.9], [0.0, -1.5]])
        h = 1e-6
        fd = np.stack(
            [
                (vortex_velocity(points + h * e) - vortex_velocity(points - h * e)) / (2.0 * h)
                for e in np.eye(2)
            ],
            axis=-1,
        )
        np.testing.assert_allclose(vortex_gradient(points), fd, rtol=1e-6, atol=1e-6)

    def test_velocity_is_divergence_free(self):
        points = np.column_stack([np.linspace(0.5, 2.0, 7), np.linspace(-1.0, 1.0, 7)])
        grad = vortex_gradient(points)
        np.testing.assert_allclose(np.trace(grad, axis1=1, axis2=2), 0.0, atol=1e-12)

    def test_inner_ring_is_the_inflow(self):
        case = build_vortex(VortexSpec(nr=4, ntheta=12))
        inlet = set(case.mesh.nodes_with_marker("inlet").tolist())
        assert inflow_nodes(case.mesh, case.velocity) == inlet
        radii = np.linalg.norm(case.mesh.nodes[sorted(inlet)], axis=1)
        np.testing.assert_allclose(radii, 0.5)

    def test_written_case_loads(self, tmp_path):
        spec = VortexSpec(nr=4, ntheta=12)
        config_path = write_vortex_case(tmp_path, spec)
        config = parse_config(config_path)
        assert config.mesh.path == (tmp_path / "mesh").resolve()
        assert config.outflow.marker == "outlet"
        mesh = load_mesh(config.mesh.path, MeshFormat.NATIVE_CSV)
        assert mesh.n_nodes == 5 * 12
        assert mesh.markers == ["inlet", "outlet"]
