import numpy as np
import pytest

from app.services.datasets.service import DatasetService
from app.utils.exceptions import ConstructionError, InvalidInputError


class TestTableFiles:
    """Test the feature/outcome file format."""

    def test_save_and_load(self, tmp_path):
        """Test that a written table loads back unchanged."""
        table = DatasetService.build_table([[0.1, 0.2], [0.3, -0.4]], [1, -1])
        path = DatasetService.save_table(table, str(tmp_path / "t.csv"))

        loaded = DatasetService.load_table(path)
        np.testing.assert_allclose(loaded.features, table.features)
        np.testing.assert_array_equal(loaded.outcomes, [1.0, -1.0])
        assert open(path).readline().strip() == "f1,f2,outcome"

    def test_tab_separated(self, tmp_path):
        path = tmp_path / "t.tsv"
        path.write_text("f1\tf2\toutcome\n0.5\t0.5\t1\n0.1\t0.2\t-1\n")
        table = DatasetService.load_table(str(path))
        assert table.n_rows == 2
        assert table.dim == 2

    def test_missing_outcome_column(self, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text("f1,f2\n0.5,0.5\n")
        with pytest.raises(ConstructionError) as exc_info:
            DatasetService.load_table(str(path))
        assert "outcome" in exc_info.value.detail

    def test_bad_outcome_names_row(self, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text("f1,outcome\n0.5,1\n0.2,0\n")
        with pytest.raises(ConstructionError) as exc_info:
            DatasetService.load_table(str(path))
        assert "Row 1" in exc_info.value.detail

    def test_bad_feature_columns(self, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text("a,b,outcome\n0.5,0.5,1\n")
        with pytest.raises(ConstructionError):
            DatasetService.load_table(str(path))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConstructionError):
            DatasetService.load_table(str(tmp_path / "absent.csv"))

    def test_build_table_validation(self):
        with pytest.raises(InvalidInputError):
            DatasetService.build_table([[0.1], [0.2]], [1])
        with pytest.raises(InvalidInputError):
            DatasetService.build_table([[0.1]], [2])


class TestSurrogate:
    """Test the synthetic click-table generator."""

    def test_shape_and_outcomes(self, surrogate_table):
        table, theta0 = surrogate_table
        assert table.features.shape == (4000, 36)
        assert set(np.unique(table.outcomes)) == {-1.0, 1.0}
        assert np.linalg.norm(theta0) == pytest.approx(0.8)

    def test_kronecker_features(self, surrogate_table):
        """Test unit-norm rank-one 6 x 6 feature blocks."""
        table, _ = surrogate_table
        np.testing.assert_allclose(np.linalg.norm(table.features, axis=1), 1.0)
        for row in table.features[:20]:
            singular = np.linalg.svd(row.reshape(6, 6), compute_uv=False)
            assert singular[1] < 1e-12

    def test_other_dimensions(self):
        table, theta0 = DatasetService.generate_surrogate(100, 4, seed=1)
        assert table.features.shape == (100, 4)
        assert theta0.shape == (4,)

    def test_seeded(self):
        first, _ = DatasetService.generate_surrogate(50, 36, seed=3)
        second, _ = DatasetService.generate_surrogate(50, 36, seed=3)
        np.testing.assert_array_equal(first.features, second.features)
        np.testing.assert_array_equal(first.outcomes, second.outcomes)

    def test_rejects_empty(self):
        with pytest.raises(InvalidInputError):
            DatasetService.generate_surrogate(0)
