"""Robust scheduling and power allocation for user-centric cell-free massive MIMO."""

from . import errors  # noqa: F401
from .model import (ConfigBundle, LinkBudget, NetworkConfig, RobustnessBounds,
                    SolverParams, load_config, validate)
from .channel import (ChannelRealization, ClusterMask, LargeScaleFading, cluster_aps,
                      compose_channel, generate_lsf, generate_small_scale, mask_channel)
from .precoding import Precoder, mmse_precoder, power_scale, split_precoder, zf_precoder
from .metrics import ErrorStats, error_stats, mse_conditioned, mse_unconditioned, sum_rate
from .scheduling import ScheduleOutcome, c_esg, rc_esg
from .power import PowerResult, gdpa, rgdpa, wrgdpa

__version__ = "0.1.0"

__all__ = [
    "errors",
    "ConfigBundle", "LinkBudget", "NetworkConfig", "RobustnessBounds", "SolverParams",
    "load_config", "validate",
    "ChannelRealization", "ClusterMask", "LargeScaleFading", "cluster_aps", "compose_channel",
    "generate_lsf", "generate_small_scale", "mask_channel",
    "Precoder", "mmse_precoder", "power_scale", "split_precoder", "zf_precoder",
    "ErrorStats", "error_stats", "mse_conditioned", "mse_unconditioned", "sum_rate",
    "ScheduleOutcome", "c_esg", "rc_esg",
    "PowerResult", "gdpa", "rgdpa", "wrgdpa",
]
