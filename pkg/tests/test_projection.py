from __future__ import annotations

import numpy as np
import pytest

from agora.errors import TooFewPoints
from agora.insight import PcaProjector, project_2d

from .oracles import eigen_projection


def _ids(n):
    return tuple(f"p{i}" for i in range(n))


class TestPcaProjection:
    def test_line_fixture(self):
        points = np.array([[t, t] for t in np.linspace(-3, 3, 9)])
        theme_map = project_2d(_ids(9), points)
        # first principal direction is the diagonal, second variance vanishes
        assert theme_map.explained_variance[0] == pytest.approx(1.0, abs=1e-9)
        assert theme_map.explained_variance[1] == pytest.approx(0.0, abs=1e-9)
        spread = theme_map.coords[:, 0]
        assert np.allclose(np.abs(spread), np.abs(points[:, 0]) * np.sqrt(2), atol=1e-9)
        assert np.allclose(theme_map.coords[:, 1], 0.0, atol=1e-9)

    def test_matches_eigendecomposition_oracle(self):
        for seed in range(10):
            rng = np.random.default_rng(seed)
            vectors = rng.normal(size=(30, 8))
            theme_map = project_2d(_ids(30), vectors)
            oracle_coords, oracle_ratios = eigen_projection(vectors)
            for col in range(2):
                produced = theme_map.coords[:, col]
                expected = oracle_coords[:, col]
                direct = np.max(np.abs(produced - expected))
                flipped = np.max(np.abs(produced + expected))
                assert min(direct, flipped) < 1e-6
            assert np.allclose(theme_map.explained_variance, oracle_ratios, atol=1e-9)

    def test_zero_variance_flagged(self):
        vectors = np.ones((5, 4))
        theme_map = project_2d(_ids(5), vectors)
        assert "zero-variance" in theme_map.method_tag
        assert np.allclose(theme_map.coords, 0.0)
        assert theme_map.explained_variance == (0.0, 0.0)

    def test_too_few_points(self):
        with pytest.raises(TooFewPoints):
            project_2d(_ids(2), np.zeros((2, 3)))

    def test_rotation_preserves_pairwise_distances(self):
        rng = np.random.default_rng(99)
        vectors = rng.normal(size=(25, 6))
        rotation, _ = np.linalg.qr(rng.normal(size=(6, 6)))
        base = project_2d(_ids(25), vectors).coords
        rotated = project_2d(_ids(25), vectors @ rotation.T).coords

        def pairwise(coords):
            diff = coords[:, None, :] - coords[None, :, :]
            return np.sqrt((diff ** 2).sum(axis=2))

        assert np.allclose(pairwise(base), pairwise(rotated), atol=1e-6)

    def test_sign_convention_largest_loading_positive(self):
        rng = np.random.default_rng(5)
        vectors = rng.normal(size=(20, 4))
        centered = vectors - vectors.mean(axis=0)
        _, _, vt = np.linalg.svd(centered, full_matrices=False)
        projector = PcaProjector()
        theme_map = projector.project(_ids(20), vectors)
        for row in range(2):
            component = np.linalg.lstsq(centered, theme_map.coords[:, row], rcond=None)[0]
            pivot = int(np.argmax(np.abs(component)))
            assert component[pivot] > 0

    def test_deterministic(self):
        rng = np.random.default_rng(3)
        vectors = rng.normal(size=(12, 5))
        first = project_2d(_ids(12), vectors)
        second = project_2d(_ids(12), vectors)
        assert np.array_equal(first.coords, second.coords)
        assert first.to_json() == second.to_json()
