"""CATE estimation in semi-parametric outcome models with possibly invalid instruments."""

import json as _json

from ._spotiv import (
    BootstrapResult,
    CateResult,
    Dataset,
    Estimate,
    FirstStageFit,
    MajorityTestResult,
    SirFit,
    SpotivError,
    StructuralFit,
    bootstrap,
    estimate,
    estimate_with_bootstrap,
    fit_first_stage,
    fit_sir,
    fit_structural,
    fit_structural_from,
    generate,
    majority_vote_test,
    read_csv,
    select_rank,
    true_cate_oracle,
    validate,
)
from ._spotiv import simulate_cell as _simulate_cell


def simulate_cell(*args, **kwargs):
    """Run one Monte Carlo cell and return its summary row as a dict."""
    return _json.loads(_simulate_cell(*args, **kwargs))


__all__ = [name for name in dir() if not name.startswith("_")]
