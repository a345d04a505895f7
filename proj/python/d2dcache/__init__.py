"""Single-cell D2D caching network simulator."""

import json as _json

from ._core import (
    CSV_HEADER,
    SCHEMA_VERSION,
    ConfigError,
    analytic_reuse_factor,
    analytic_rows,
    coded_multicast_ntx,
    default_config,
    free_space_pathloss_db,
    los_probability,
    noise_power_dbm,
    optimal_cache_distribution,
    run_experiment_csv,
    scaling_alpha,
    throughput_at_outage,
    validate_config,
    zipf_pmf,
)
from ._core import run_experiment as _run_experiment


def run_experiment(config=None, profile="", jobs=1):
    """Run a sweep. `config` may be a dict of overrides or a JSON string."""
    if isinstance(config, dict):
        config = _json.dumps(config)
    return _run_experiment(config or "", profile, jobs)


__all__ = [
    "CSV_HEADER",
    "SCHEMA_VERSION",
    "ConfigError",
    "analytic_reuse_factor",
    "analytic_rows",
    "coded_multicast_ntx",
    "default_config",
    "free_space_pathloss_db",
    "los_probability",
    "noise_power_dbm",
    "optimal_cache_distribution",
    "run_experiment",
    "run_experiment_csv",
    "scaling_alpha",
    "throughput_at_outage",
    "validate_config",
    "zipf_pmf",
]
