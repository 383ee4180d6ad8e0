import numpy as np
import pandas as pd
import pytest
from sklearn.base import clone
from sklearn.pipeline import Pipeline

from summstat import estimators
from summstat.transformer import MeanSdEstimator, check_summary_array

NAN = np.nan

# columns: n, min, q1, median, q3, max
C1_ROW = [5, 0.0, NAN, 1.0, NAN, 2.0]
C2_ROW = [9, 0.0, 1.0, 2.0, 3.0, 4.0]
C3_ROW = [41, NAN, 1.0, 2.0, 3.0, NAN]


class TestCheckSummaryArray:
    def test_accepts_array(self):
        arr = check_summary_array(np.array([C1_ROW]))
        assert arr.shape == (1, 6)

    def test_rejects_wrong_width(self):
        with pytest.raises(ValueError, match="6 columns"):
            check_summary_array(np.zeros((3, 4)))

    def test_accepts_dataframe_with_missing_columns(self):
        df = pd.DataFrame({"n": [41], "q1": [1.0], "median": [2.0], "q3": [3.0]})
        arr = check_summary_array(df)
        assert arr.shape == (1, 6)
        assert np.isnan(arr[0, 1]) and np.isnan(arr[0, 5])

    def test_dataframe_needs_core_columns(self):
        with pytest.raises(ValueError, match="median"):
            check_summary_array(pd.DataFrame({"n": [5]}))


class TestTransform:
    def test_matches_direct_estimates(self):
        X = np.array([C1_ROW, C2_ROW, C3_ROW])
        result = MeanSdEstimator().fit_transform(X)
        expected = [
            estimators.estimate(estimators.C1(a=0, m=1, b=2, n=5)),
            estimators.estimate(estimators.C2(a=0, q1=1, m=2, q3=3, b=4, n=9)),
            estimators.estimate(estimators.C3(q1=1, m=2, q3=3, n=41)),
        ]
        np.testing.assert_allclose(result[:, 0], [e.mean for e in expected])
        np.testing.assert_allclose(result[:, 1], [e.sd for e in expected])

    def test_dataframe_input(self):
        df = pd.DataFrame(
            {"n": [41, 41], "q1": [1.0, 2.0], "median": [2.0, 3.0], "q3": [3.0, 4.0]}
        )
        result = MeanSdEstimator().fit(df).transform(df)
        assert result.shape == (2, 2)
        np.testing.assert_allclose(result[:, 0], [2.0, 3.0])

    def test_method_parameters(self):
        X = np.array([C3_ROW])
        out = MeanSdEstimator(sd_method="sd_cochrane").fit_transform(X)
        assert out[0, 1] == pytest.approx(2 / 1.35)

    def test_invalid_row_raises_by_default(self):
        X = np.array([[5, 3.0, NAN, 1.0, NAN, 2.0]])  # min > median
        with pytest.raises(ValueError):
            MeanSdEstimator().fit_transform(X)

    def test_invalid_row_nan_mode(self):
        X = np.array([[5, 3.0, NAN, 1.0, NAN, 2.0], C1_ROW])
        out = MeanSdEstimator(on_invalid="nan").fit_transform(X)
        assert np.isnan(out[0]).all()
        assert np.isfinite(out[1]).all()

    def test_method_invalid_for_scenario_raises(self):
        X = np.array([C3_ROW])
        with pytest.raises(ValueError, match="sd_bland"):
            MeanSdEstimator(sd_method="sd_bland").fit_transform(X)

    def test_unknown_pattern(self):
        X = np.array([[9, 1.0, NAN, 2.0, NAN, NAN]])  # min without max
        with pytest.raises(ValueError):
            MeanSdEstimator().fit_transform(X)

    def test_fractional_n_rejected(self):
        X = np.array([[5.5, 0.0, NAN, 1.0, NAN, 2.0]])
        with pytest.raises(ValueError, match="'n'"):
            MeanSdEstimator().fit_transform(X)


class TestSklearnContract:
    def test_get_set_params_roundtrip(self):
        est = MeanSdEstimator(sd_method="sd_cochrane", on_invalid="nan")
        params = est.get_params()
        assert params["sd_method"] == "sd_cochrane"
        est2 = MeanSdEstimator().set_params(**params)
        assert est2.sd_method == "sd_cochrane"
        assert est2.on_invalid == "nan"

    def test_clone(self):
        est = clone(MeanSdEstimator(mean_method="mean_full"))
        assert est.mean_method == "mean_full"

    def test_fit_validates_parameters(self):
        with pytest.raises(ValueError):
            MeanSdEstimator(on_invalid="explode").fit(np.array([C1_ROW]))
        with pytest.raises(ValueError):
            MeanSdEstimator(sd_method="sd_bogus").fit(np.array([C1_ROW]))

    def test_feature_names_out(self):
        assert list(MeanSdEstimator().get_feature_names_out()) == ["est_mean", "est_sd"]

    def test_in_pipeline(self):
        pipe = Pipeline([("impute", MeanSdEstimator())])
        out = pipe.fit_transform(np.array([C1_ROW]))
        assert out.shape == (1, 2)

    def test_records_n_features_in(self):
        est = MeanSdEstimator().fit(np.array([C1_ROW]))
        assert est.n_features_in_ == 6
