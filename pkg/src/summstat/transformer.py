"""Scikit-learn adapter: summary-statistic columns in, (mean, sd) out.

The estimators are closed-form, so there is nothing to fit; the
transformer exists so the imputation step drops into sklearn
pipelines/ColumnTransformers next to whatever happens downstream of a
meta-analysis table.
"""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from . import batch_io, estimators
from .estimators import MethodId

__all__ = ["MeanSdEstimator", "SUMMARY_COLUMNS", "check_summary_array"]

SUMMARY_COLUMNS = ("n", "min", "q1", "median", "q3", "max")


def check_summary_array(X) -> np.ndarray:
    """Validate/coerce input to a float (n_samples, 6) array.

    Accepts a DataFrame with (a subset of) the ``SUMMARY_COLUMNS``
    column names, or any 2-D array-like with the six columns in that
    order.  NaN marks a field the study did not report.
    """
    if hasattr(X, "columns") and hasattr(X, "loc"):  # pandas without importing it
        present = [c for c in SUMMARY_COLUMNS if c in X.columns]
        if "n" not in present or "median" not in present:
            raise ValueError("DataFrame input needs at least the 'n' and 'median' columns")
        arr = np.full((len(X), len(SUMMARY_COLUMNS)), np.nan)
        for j, col in enumerate(SUMMARY_COLUMNS):
            if col in present:
                arr[:, j] = np.asarray(X[col], dtype=np.float64)
        return arr
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != len(SUMMARY_COLUMNS):
        raise ValueError(
            f"array input must be 2-D with {len(SUMMARY_COLUMNS)} columns "
            f"{SUMMARY_COLUMNS}, got shape {getattr(arr, 'shape', None)}"
        )
    return arr


def _row_record(row: np.ndarray) -> batch_io.StudyRecord:
    def opt(v):
        return None if math.isnan(v) else float(v)

    n = row[0]
    if math.isnan(n) or n != int(n):
        raise ValueError(f"column 'n' must hold integers, got {n!r}")
    return batch_io.StudyRecord(
        study_id="",
        n=int(n),
        min=opt(row[1]),
        q1=opt(row[2]),
        median=opt(row[3]),
        q3=opt(row[4]),
        max=opt(row[5]),
    )


class MeanSdEstimator(BaseEstimator, TransformerMixin):
    """Transformer mapping five-number-summary rows to (est_mean, est_sd).

    Parameters
    ----------
    mean_method, sd_method : str or MethodId, optional
        Estimation formulas; default is each scenario's recommended
        method.  Tokens as in :class:`summstat.estimators.MethodId`.
    on_invalid : {"raise", "nan"}
        What to do with rows whose fields match no scenario or fail
        validation: raise (default), or emit NaN for that row.

    Examples
    --------
    >>> import numpy as np
    >>> from summstat.transformer import MeanSdEstimator
    >>> X = np.array([[5, 0.0, np.nan, 1.0, np.nan, 2.0]])   # {min, median, max}
    >>> MeanSdEstimator().fit_transform(X).round(3)
    array([[1.   , 0.848]])
    """

    def __init__(self, mean_method=None, sd_method=None, on_invalid="raise"):
        self.mean_method = mean_method
        self.sd_method = sd_method
        self.on_invalid = on_invalid

    def _validated_params(self):
        if self.on_invalid not in ("raise", "nan"):
            raise ValueError(f"on_invalid must be 'raise' or 'nan', got {self.on_invalid!r}")
        mean = MethodId(self.mean_method) if self.mean_method is not None else None
        sd = MethodId(self.sd_method) if self.sd_method is not None else None
        return mean, sd

    def fit(self, X, y=None):
        """Validate parameters and input shape; no state is learned."""
        self._validated_params()
        X = check_summary_array(X)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X) -> np.ndarray:
        """(n_samples, 2) array of estimated means and SDs."""
        mean_method, sd_method = self._validated_params()
        X = check_summary_array(X)
        out = np.empty((X.shape[0], 2))
        for i, row in enumerate(X):
            try:
                enriched = batch_io.enrich(_row_record(row), mean_method, sd_method)
            except ValueError:
                if self.on_invalid == "raise":
                    raise
                out[i] = np.nan
                continue
            out[i, 0] = enriched.est_mean
            out[i, 1] = enriched.est_sd
        return out

    def get_feature_names_out(self, input_features=None):
        return np.asarray(["est_mean", "est_sd"], dtype=object)
