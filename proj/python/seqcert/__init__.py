from ._seqcert import (
    ConfigurationError,
    DomainError,
    HypothesisViolated,
    RateEstimate,
    closed_form_check,
    coverage,
    endpoint,
    martingale,
    neg_log_p,
    run_cli,
    two_sided,
    validity,
    verify_bounds,
)

__all__ = [
    "ConfigurationError",
    "DomainError",
    "HypothesisViolated",
    "RateEstimate",
    "closed_form_check",
    "coverage",
    "endpoint",
    "martingale",
    "neg_log_p",
    "run_cli",
    "two_sided",
    "validity",
    "verify_bounds",
]
