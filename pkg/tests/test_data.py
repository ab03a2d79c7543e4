import numpy as np
import pytest

from igkit.data import (
    CCPP_ENVELOPE,
    CcppSchema,
    DataTable,
    MahalanobisOutlierDetector,
    load_csv,
    mahalanobis_outliers,
    validate_ranges,
)
from igkit.exceptions import HeaderMismatch, InputError, MissingValue, ParseError, SingularCovariance

GOOD = "T,V,AP,RH,PE\n14.96,41.76,1024.07,73.17,463.26\n25.18,62.96,1020.04,59.08,444.37\n5.11,39.4,1012.16,92.14,488.56\n"


def write(tmp_path, text, name="t.csv"):
    path = tmp_path / name
    path.write_text(text)
    return path


def midpoints(n=4):
    return DataTable({k: np.full(n, 0.5 * (lo + hi)) for k, (lo, hi) in CCPP_ENVELOPE.items()})


class TestLoad:
    def test_three_rows(self, tmp_path):
        t = load_csv(write(tmp_path, GOOD))
        assert t.n == 3 and t.names == ["T", "V", "AP", "RH", "PE"]
        assert t["PE"][2] == 488.56

    def test_alias_and_case(self, tmp_path):
        t = load_csv(write(tmp_path, GOOD.replace("T,V,AP,RH,PE", "at,v,Ap,RH,pe")))
        assert "T" in t and t["T"][0] == 14.96

    def test_fixture(self, fixture_csv):
        t = load_csv(fixture_csv)
        assert t.n == 50
        assert load_csv(fixture_csv) == t
        assert validate_ranges(t) == []

    def test_column_order_follows_schema(self, tmp_path):
        t = load_csv(write(tmp_path, "PE,RH,AP,V,T,extra\n450,80,1010,40,20,x\n"))
        assert t.names == ["T", "V", "AP", "RH", "PE"]
        assert t["T"][0] == 20.0

    def test_blank_cell(self, tmp_path):
        with pytest.raises(MissingValue) as err:
            load_csv(write(tmp_path, GOOD.replace("59.08", "")))
        assert (err.value.row, err.value.column) == (1, "RH")

    def test_nan_cell_is_missing(self, tmp_path):
        with pytest.raises(MissingValue):
            load_csv(write(tmp_path, GOOD.replace("59.08", "nan")))

    def test_parse_error(self, tmp_path):
        with pytest.raises(ParseError) as err:
            load_csv(write(tmp_path, GOOD.replace("1012.16", "1012.1.6")))
        assert (err.value.row, err.value.column, err.value.text) == (2, "AP", "1012.1.6")

    def test_extra_field_is_parse_error(self, tmp_path):
        # A decimal comma splits one value into two fields.
        with pytest.raises(ParseError) as err:
            load_csv(write(tmp_path, GOOD.replace("1012.16", "1012,16")))
        assert err.value.row == 2 and err.value.column is None

    def test_header_mismatch(self, tmp_path):
        with pytest.raises(HeaderMismatch) as err:
            load_csv(write(tmp_path, GOOD.replace("RH", "HUM")))
        assert "RH" in err.value.missing
        with pytest.raises(HeaderMismatch):
            load_csv(write(tmp_path, ""))

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_csv(tmp_path / "absent.csv")

    def test_blank_lines_skipped(self, tmp_path):
        assert load_csv(write(tmp_path, GOOD + "\n\n")).n == 3

    def test_custom_schema(self, tmp_path):
        t = load_csv(write(tmp_path, "x,y\n1,2\n3,4\n"), CcppSchema(columns=("x", "y"), aliases={}))
        assert t.matrix(["x", "y"]).tolist() == [[1.0, 2.0], [3.0, 4.0]]


class TestDataTable:
    def test_immutable(self):
        t = midpoints()
        with pytest.raises(ValueError):
            t["T"][0] = 1.0

    def test_copy_on_construction(self):
        col = np.ones(3)
        t = DataTable({"a": col})
        col[0] = 9.0
        assert t["a"][0] == 1.0

    def test_ragged(self):
        with pytest.raises(InputError):
            DataTable({"a": [1.0], "b": [1.0, 2.0]})

    def test_unknown_column(self):
        with pytest.raises(KeyError):
            midpoints()["Q"]


class TestRanges:
    def test_midpoints_clean(self):
        assert validate_ranges(midpoints()) == []

    def test_hot_row(self):
        cols = {k: np.array(midpoints()[k]) for k in CCPP_ENVELOPE}
        cols["T"][2] = 40.0
        (v,) = validate_ranges(DataTable(cols))
        assert (v.column, v.row, v.bound, v.side) == ("T", 2, 37.11, "above")

    def test_low_output(self):
        cols = {k: np.array(midpoints()[k]) for k in CCPP_ENVELOPE}
        cols["PE"][0] = 400.0
        (v,) = validate_ranges(DataTable(cols))
        assert (v.column, v.bound, v.side) == ("PE", 420.26, "below")


class TestMahalanobis:
    def test_identical_columns(self):
        x = np.random.default_rng(0).standard_normal(100)
        with pytest.raises(SingularCovariance):
            mahalanobis_outliers(DataTable({"a": x, "b": x}), ["a", "b"])

    def test_flagged_fraction(self):
        X = np.random.default_rng(1).standard_normal((10_000, 2))
        rep = mahalanobis_outliers(X, None, threshold_p=0.01)
        assert 0.005 < rep.indices.size / 10_000 < 0.02

    def test_planted_point(self):
        X = np.random.default_rng(2).standard_normal((500, 2))
        X[123] = [10.0, -10.0]
        rep = mahalanobis_outliers(X, None)
        assert int(np.argmax(rep.distances)) == 123
        assert 123 in rep.indices

    def test_affine_invariance(self):
        r = np.random.default_rng(3)
        X = r.standard_normal((300, 2)) @ np.array([[2.0, 0.3], [0.0, 0.5]])
        A = r.standard_normal((2, 2)) + 2 * np.eye(2)
        a = mahalanobis_outliers(X, None).distances
        b = mahalanobis_outliers(X @ A.T + np.array([5.0, -7.0]), None).distances
        np.testing.assert_allclose(a, b, rtol=1e-8, atol=1e-8)

    def test_table_columns(self, fixture_csv):
        rep = mahalanobis_outliers(load_csv(fixture_csv), ["T", "V", "AP", "RH", "PE"])
        assert rep.distances.shape == (50,)
        assert rep.distances.mean() == pytest.approx(5 * 49 / 50, rel=1e-10)

    def test_invalid_p(self):
        with pytest.raises(ValueError):
            mahalanobis_outliers(np.ones((3, 1)), None, threshold_p=1.0)

    def test_detector(self):
        X = np.random.default_rng(4).standard_normal((400, 3))
        X[7] = 12.0
        det = MahalanobisOutlierDetector(threshold_p=0.001).fit(X)
        pred = det.predict(X)
        assert pred[7] == -1
        assert set(np.unique(pred)) <= {-1, 1}
        np.testing.assert_allclose(det.mahalanobis(X), mahalanobis_outliers(X, None).distances)
        assert det.predict(X[:2]).shape == (2,)
