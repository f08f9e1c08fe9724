"""Energy-efficiency evaluation of Poisson-Voronoi cellular networks.

Analytic pipeline: heavy-tailed per-user traffic -> aggregate cell load CF,
alpha-stable co-channel interference -> per-cell transmit power CF, numerical
CF inversion, truncation at the power ceiling, and the energy-efficiency
utility.  A Monte Carlo snapshot simulator of the same generative model
cross-validates every analytic distribution.

Library surface re-exported here; `pvtnet.service` holds the FastAPI app and
`pvtnet.cli` the thin command-line client.
"""

from .channel import (
    ChannelParams,
    channel_gain,
    q_moment,
    q_ratio_pdf,
    rate_to_sir,
    sample_q,
    sample_v,
    sir_pdf,
    v_factor_pdf,
)
from .config import NetworkConfig, load_config, load_profile, parse_config_text
from .energy import EnergySweepResult, ee_sweep, energy_efficiency, outage_probability
from .errors import (
    BranchCutError,
    ConfigError,
    DegenerateConfigError,
    InvalidInputError,
    NumericsError,
    PvtError,
)
from .geometry import (
    CellPartition,
    PointPattern,
    Window,
    assign_nearest_bs,
    cell_area_pdf,
    nearest_distance_pdf,
    sample_nearest_distance,
    sample_poisson_pattern,
)
from .montecarlo import (
    McEstimate,
    NetworkSnapshot,
    mc_empirical_cf,
    mc_energy_efficiency,
    sample_interference,
    sample_receiving_power,
    sample_typical_cell_power,
    simulate_snapshot,
)
from .numerics import (
    CharFunc,
    DistributionTable,
    integrate_adaptive,
    invert_cf_to_cdf,
    invert_cf_to_pdf,
    upper_gamma,
)
from .power import (
    PowerNodeCache,
    PowerParams,
    StableLaw,
    g_kernel,
    interference_cf,
    mean_bs_power,
    per_link_power,
    receiving_power_cf,
    required_power_distribution,
    stable_law,
    total_power_cf,
    truncated_power_pdf,
)
from .traffic import (
    TrafficModel,
    mean_aggregate_traffic,
    pareto_pdf,
    sample_pareto,
    traffic_cf,
    traffic_load_distribution,
)

__version__ = "0.1.0"

__all__ = [
    "BranchCutError", "CellPartition", "ChannelParams", "CharFunc", "ConfigError",
    "DegenerateConfigError", "DistributionTable", "EnergySweepResult",
    "InvalidInputError", "McEstimate", "NetworkConfig", "NetworkSnapshot",
    "NumericsError", "PointPattern", "PowerNodeCache", "PowerParams", "PvtError",
    "StableLaw", "TrafficModel", "Window", "assign_nearest_bs", "cell_area_pdf",
    "channel_gain", "ee_sweep", "energy_efficiency", "g_kernel",
    "integrate_adaptive", "interference_cf", "invert_cf_to_cdf",
    "invert_cf_to_pdf", "load_config", "load_profile", "mc_empirical_cf",
    "mc_energy_efficiency", "mean_aggregate_traffic", "mean_bs_power",
    "nearest_distance_pdf", "outage_probability", "pareto_pdf",
    "parse_config_text", "per_link_power", "q_moment", "q_ratio_pdf",
    "rate_to_sir", "receiving_power_cf", "required_power_distribution",
    "sample_interference", "sample_nearest_distance", "sample_pareto",
    "sample_poisson_pattern", "sample_q", "sample_receiving_power",
    "sample_typical_cell_power", "sample_v", "simulate_snapshot", "sir_pdf",
    "stable_law", "total_power_cf", "traffic_cf", "traffic_load_distribution",
    "truncated_power_pdf", "upper_gamma", "v_factor_pdf",
]
