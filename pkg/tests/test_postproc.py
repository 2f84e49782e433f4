import numpy as np
import pytest

from boundtransport.analysis.postproc import (
    delta_phb,
    field_stats,
    locate,
    outflow_average,
    sample_line,
)
from boundtransport.common.errors import (
    DimensionMismatchError,
    NoIntersectionError,
    ZeroFluxError,
)


class TestFieldStats:
    def test_nonnegative_field(self, unit_square):
        stats = field_stats(unit_square, np.array([0.0, 0.2, 0.4, 0.1]))
        assert (stats.min, stats.max) == (0.0, 0.4)
        assert stats.negative_node_count == 0
        assert stats.negative_volume_fraction == 0.0

    def test_negative_node_touches_one_element(self, unit_square):
        # node 1 only belongs to the first triangle
        stats = field_stats(unit_square, np.array([0.0, -1e-3, 0.4, 0.1]))
        assert stats.negative_node_count == 1
        assert stats.negative_volume_fraction == pytest.approx(0.5)

    def test_rejects_wrong_length(self, unit_square):
        with pytest.raises(DimensionMismatchError):
            field_stats(unit_square, np.zeros(3))


class TestSampling:
    def test_linear_field_is_reproduced(self, small_channel):
        x = small_channel.mesh.nodes[:, 0]
        samples = sample_line(small_channel.mesh, x, [0.0, 0.1], [2.0, 0.1], 41)
        s = np.array([p[0] for p in samples])
        v = np.array([p[1] for p in samples])
        np.testing.assert_allclose(v, s, atol=1e-12)

    def test_points_outside_are_missing(self, small_channel):
        x = small_channel.mesh.nodes[:, 0]
        samples = sample_line(small_channel.mesh, x, [1.0, 0.3], [3.0, 0.3], 5)
        assert [v is None for _, v in samples] == [False, False, False, True, True]

    def test_wall_line_matches_nodal_values(self, small_channel):
        mesh = small_channel.mesh
        field = np.sin(mesh.nodes[:, 0]) + mesh.nodes[:, 1]
        samples = sample_line(mesh, field, [0.0, 0.0], [2.0, 0.0], 21)
        wall = np.flatnonzero(mesh.nodes[:, 1] == 0.0)
        wall = wall[np.argsort(mesh.nodes[wall, 0])]
        np.testing.assert_allclose([v for _, v in samples], field[wall], atol=1e-12)

    def test_line_missing_the_mesh(self, small_channel):
        with pytest.raises(NoIntersectionError):
            sample_line(small_channel.mesh, np.zeros(small_channel.mesh.n_nodes), [3.0, 0.0], [4.0, 1.0], 10)

    def test_locate_returns_barycentric_weights(self, unit_square):
        owner, weights = locate(unit_square, np.array([[0.75, 0.25], [2.0, 2.0]]))
        assert owner[0] == 0
        assert owner[1] == -1
        np.testing.assert_allclose(weights[0].sum(), 1.0)
        np.testing.assert_allclose(weights[0] @ unit_square.nodes[unit_square.elements[0]], [0.75, 0.25])


class TestOutflow:
    def test_constant_index(self, unit_square):
        u = np.tile([2.0, 0.3], (4, 1))
        assert outflow_average(unit_square, np.full(4, 0.125), u, "outlet") == pytest.approx(0.125)

    def test_linear_index_is_averaged_exactly(self, unit_square):
        ih = unit_square.nodes[:, 1].copy()
        u = np.tile([1.0, 0.0], (4, 1))
        assert outflow_average(unit_square, ih, u, "outlet") == pytest.approx(0.5)
        assert outflow_average(unit_square, ih, 7.0 * u, "outlet") == pytest.approx(0.5)

    def test_flux_weighting(self, unit_square):
        # u_x = 1 + y on the outlet: ∫(1 + y) y dy / ∫(1 + y) dy = (5/6)/(3/2)
        u = np.column_stack([1.0 + unit_square.nodes[:, 1], np.zeros(4)])
        ih = unit_square.nodes[:, 1].copy()
        assert outflow_average(unit_square, ih, u, "outlet") == pytest.approx(5.0 / 9.0)

    def test_tangential_flow_has_no_outflow(self, unit_square):
        u = np.tile([0.0, 1.0], (4, 1))
        with pytest.raises(ZeroFluxError):
            outflow_average(unit_square, np.ones(4), u, "outlet")

    def test_unknown_marker(self, unit_square):
        with pytest.raises(ZeroFluxError):
            outflow_average(unit_square, np.ones(4), np.ones((4, 2)), "exhaust")


class TestDeltaPHb:
    def test_zero_index(self):
        assert delta_phb(0.0) == 0.0

    def test_inverse_of_reported_release(self):
        factor = 15000.0 / (1.0 - 0.36) * 6.0 * 1000.0 * 120.0 / 250.0
        assert delta_phb(36.11 / factor) == pytest.approx(36.11, rel=1e-12)

    def test_linear_in_flow_rate_and_time(self):
        base = delta_phb(1e-6)
        assert delta_phb(1e-6, q_lpm=12.0) == pytest.approx(2.0 * base)
        assert delta_phb(1e-6, t_min=60.0) == pytest.approx(0.5 * base)

    def test_rejects_bad_hematocrit(self):
        with pytest.raises(ValueError):
            delta_phb(1e-6, hct=1.0)
