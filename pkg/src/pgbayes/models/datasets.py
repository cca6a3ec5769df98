"""Bundled and synthetic datasets."""
from __future__ import annotations

import csv
import io
from importlib import resources

import numpy as np

from .data import RegressionData, TablesData


def load_skene_wakefield_rows() -> list[dict]:
    """The eight-center topical-cream trial: arm 1 treatment, arm 2 control."""
    text = resources.files("pgbayes.data").joinpath("skene_wakefield.csv").read_text("utf-8")
    return [{k: int(v) for k, v in row.items()} for row in csv.DictReader(io.StringIO(text))]


def skene_wakefield(**prior) -> TablesData:
    rows = load_skene_wakefield_rows()
    cols = {k: np.array([r[k] for r in rows]) for k in ("y1", "n1", "y2", "n2")}
    return TablesData(**cols, **prior)


def synthetic_logit(n_obs: int = 53, n_pred: int = 5, seed: int = 20120101) -> tuple[RegressionData, np.ndarray]:
    """Binary logit problem sized like a small clinical dataset.

    Design is an intercept plus ``n_pred`` predictors: half binary
    indicators, the rest standard normal.  Returns the data and the true
    coefficient vector.
    """
    rng = np.random.default_rng(seed)
    n_bin = n_pred // 2
    Z = np.column_stack([rng.binomial(1, 0.4, size=(n_obs, n_bin)),
                         rng.standard_normal((n_obs, n_pred - n_bin))])
    X = np.column_stack([np.ones(n_obs), Z])
    beta = np.concatenate([[-0.5], rng.normal(0.0, 0.8, size=n_pred)])
    y = rng.binomial(1, 1.0 / (1.0 + np.exp(-(X @ beta))))
    return RegressionData(X, y), beta
