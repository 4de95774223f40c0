"""Temporal-difference learning over a constraint solver for two-stage stochastic problems."""

from ._tdcp import (
    FingerprintMismatch,
    LimitExceeded,
    Model,
    Network,
    TdcpError,
    build_artificial,
    build_disaster,
    check_plan,
    closed_form_artificial,
    exact_eval,
    exhaustive_opt,
    gen_network,
    mc_eval,
    run_cli,
    train,
)

__all__ = [
    "FingerprintMismatch",
    "LimitExceeded",
    "Model",
    "Network",
    "TdcpError",
    "build_artificial",
    "build_disaster",
    "check_plan",
    "closed_form_artificial",
    "exact_eval",
    "exhaustive_opt",
    "gen_network",
    "mc_eval",
    "run_cli",
    "train",
]
