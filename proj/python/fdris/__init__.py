"""Two-RIS full-duplex cell simulator with DDPG agents."""

from ._fdris import (
    Action,
    ActionError,
    CheckpointError,
    Config,
    ConfigError,
    DimensionError,
    Environment,
    FdrisError,
    GeometryError,
    LifecycleError,
    PowerError,
    evaluate_cdf,
    metrics_header,
    path_loss_db,
    selfcheck,
    signaling_bits,
    train,
)

__all__ = [
    "Action",
    "ActionError",
    "CheckpointError",
    "Config",
    "ConfigError",
    "DimensionError",
    "Environment",
    "FdrisError",
    "GeometryError",
    "LifecycleError",
    "PowerError",
    "evaluate_cdf",
    "metrics_header",
    "path_loss_db",
    "selfcheck",
    "signaling_bits",
    "train",
]
