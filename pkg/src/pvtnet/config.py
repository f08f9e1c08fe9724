"""Flat key=value configuration: parsing, validation, profiles, digests.

Keys carry their units ("_w", "_db", "_per_m2").  dB quantities are
converted to linear exactly once, here.  Unknown keys are rejected.  The
traffic units mode follows from which minimum-rate key is present:
rho_min_kbps (kilobit-per-second mode, traffic studies only) or
rho_min_bps_hz (bandwidth-normalized mode, required for power and energy
experiments).
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field, fields, replace
from importlib import resources

from .channel import ChannelParams, db_to_linear
from .errors import ConfigError
from .power import PowerParams
from .traffic import TrafficModel

_PROFILE_PACKAGE = "pvtnet.profiles"

PROFILE_NAMES = (
    "sec33_traffic",
    "sec44_power",
    "sec52_default",
    "ee_lowinf",
    "ee_highinf",
    "ee_beta36",
    "ee_beta40",
    "ee_theta12_rho2",
    "ee_theta12_rho3",
    "ee_theta18_rho3",
)


@dataclass(frozen=True)
class NetworkConfig:
    # geometry / intensities
    lambda_b_per_m2: float = 1.0 / (math.pi * 800.0 ** 2)
    ms_to_bs_ratio: float = 130.0
    inf_to_bs_ratio: float | None = 0.8      # exactly one of this ...
    lambda_inf_per_m2: float | None = None   # ... or this may be given
    # channel
    beta: float = 3.8
    sigma_db: float = 6.0
    k_db: float = -31.54
    delta_db: float = 8.6
    bandwidth_hz: float = 1.0
    # traffic (exactly one rho key in files; both stored here)
    theta: float = 1.8
    rho_min_bps_hz: float | None = 2.0
    rho_min_kbps: float | None = None
    # power
    e_s_w_2_over_beta: float = 1e-10
    p_max_w: float = 40.0
    eta_rf: float = 0.047
    p_circuit_w: float = 354.4
    rate_cap_bps_hz: float = math.inf
    interference_void_model: str = "generative"
    interferer_power_model: str = "deterministic"
    interferer_power_sigma: float = 1.0
    # cell-area Gamma constants
    area_gamma_a: float = 3.61
    area_gamma_b: float = 3.57
    # windows / MC
    window_radius_m: float = 10_000.0
    guard_factor: float = 3.0
    seed: int = 20120101
    mc_trials: int = 50
    # tolerances
    tol_cf: float = 1e-8
    tol_inversion: float = 1e-4
    tol_integral: float = 1e-8
    # provenance: key -> profile name or "user"
    sources: dict = field(default_factory=dict, compare=False)

    # -- derived -----------------------------------------------------------

    @property
    def traffic_mode(self) -> str:
        return "kbps" if self.rho_min_kbps is not None else "bps_hz"

    @property
    def rho_min(self) -> float:
        return self.rho_min_kbps if self.rho_min_kbps is not None else self.rho_min_bps_hz

    @property
    def lambda_inf(self) -> float:
        if self.lambda_inf_per_m2 is not None:
            return self.lambda_inf_per_m2
        return self.inf_to_bs_ratio * self.lambda_b_per_m2

    def traffic_model(self, ratio: float | None = None) -> TrafficModel:
        r = self.ms_to_bs_ratio if ratio is None else ratio
        return TrafficModel(
            theta=self.theta, rho_min=self.rho_min,
            lambda_m=r * self.lambda_b_per_m2, lambda_b=self.lambda_b_per_m2,
            area_shape=self.area_gamma_a, area_rate_coeff=self.area_gamma_b,
        )

    def channel_params(self) -> ChannelParams:
        return ChannelParams(
            path_loss_exp=self.beta, shadowing_db=self.sigma_db,
            gain_const=db_to_linear(self.k_db), sir_gap=db_to_linear(self.delta_db),
            bandwidth=self.bandwidth_hz,
        )

    def power_params(self, ratio: float | None = None) -> PowerParams:
        if self.traffic_mode != "bps_hz":
            raise ConfigError("power and energy experiments need bandwidth-normalized "
                              "traffic (rho_min_bps_hz); this config is in kbps mode")
        return PowerParams(
            channel=self.channel_params(), traffic=self.traffic_model(ratio),
            lambda_inf=self.lambda_inf, recv_moment=self.e_s_w_2_over_beta,
            p_max=self.p_max_w, eta_rf=self.eta_rf, p_circuit=self.p_circuit_w,
            rate_cap=self.rate_cap_bps_hz, void_model=self.interference_void_model,
            interferer_power=self.interferer_power_model,
            interferer_sigma=self.interferer_power_sigma,
        )

    def digest(self) -> str:
        items = []
        for f in fields(self):
            if f.name == "sources":
                continue
            items.append(f"{f.name}={getattr(self, f.name)!r}")
        return hashlib.sha256(";".join(items).encode()).hexdigest()[:16]

    def report_lines(self) -> list[str]:
        out = []
        for f in fields(self):
            if f.name == "sources":
                continue
            src = self.sources.get(f.name, "default")
            out.append(f"{f.name} = {getattr(self, f.name)} [{src}]")
        return out

    def validate(self) -> None:
        c = self
        checks = [
            (c.lambda_b_per_m2 > 0, "lambda_b_per_m2 must be positive"),
            (c.ms_to_bs_ratio >= 0, "ms_to_bs_ratio must be nonnegative"),
            (c.beta > 2, "beta must exceed 2"),
            (c.sigma_db >= 0, "sigma_db must be nonnegative"),
            (1 < c.theta <= 2, "theta must lie in (1, 2]"),
            (c.rho_min is not None and c.rho_min > 0, "a positive minimum rate is required"),
            (c.e_s_w_2_over_beta > 0, "e_s_w_2_over_beta must be positive"),
            (c.p_max_w > 0, "p_max_w must be positive"),
            (0 < c.eta_rf <= 1, "eta_rf must lie in (0, 1]"),
            (c.p_circuit_w >= 0, "p_circuit_w must be nonnegative"),
            (c.area_gamma_a > 0 and c.area_gamma_b > 0, "cell-area constants must be positive"),
            (c.window_radius_m > 0, "window_radius_m must be positive"),
            (c.guard_factor > 0, "guard_factor must be positive"),
            (c.mc_trials >= 1, "mc_trials must be at least 1"),
            (c.bandwidth_hz > 0, "bandwidth_hz must be positive"),
            (c.interference_void_model in ("generative", "printed"),
             "interference_void_model must be generative|printed"),
            (c.interferer_power_model in ("deterministic", "lognormal"),
             "interferer_power_model must be deterministic|lognormal"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ConfigError(msg)
        if (c.rho_min_kbps is None) == (c.rho_min_bps_hz is None):
            raise ConfigError("exactly one of rho_min_kbps / rho_min_bps_hz must be set")
        if c.lambda_inf_per_m2 is not None and c.inf_to_bs_ratio is not None:
            raise ConfigError("give inf_to_bs_ratio or lambda_inf_per_m2, not both")
        if c.lambda_inf < 0 or c.lambda_inf > 1.02 * c.lambda_b_per_m2:
            raise ConfigError("interfering-link intensity must lie in [0, lambda_b] "
                              "(a 2% slack covers edge-case intensity configs)")


_FLOAT_KEYS = {
    "lambda_b_per_m2", "ms_to_bs_ratio", "inf_to_bs_ratio", "lambda_inf_per_m2",
    "beta", "sigma_db", "k_db", "delta_db", "bandwidth_hz", "theta",
    "rho_min_bps_hz", "rho_min_kbps", "e_s_w_2_over_beta", "p_max_w", "eta_rf",
    "p_circuit_w", "rate_cap_bps_hz", "area_gamma_a", "area_gamma_b",
    "window_radius_m", "guard_factor", "tol_cf", "tol_inversion", "tol_integral",
    "interferer_power_sigma",
}
_INT_KEYS = {"seed", "mc_trials"}
_STR_KEYS = {"interference_void_model", "interferer_power_model"}
_ALL_KEYS = _FLOAT_KEYS | _INT_KEYS | _STR_KEYS


def parse_config_text(text: str, source: str = "user") -> NetworkConfig:
    """Parse flat key = value lines ('#' comments); unknown keys are errors."""
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, val = (s.strip() for s in stripped.split("=", 1))
        if key not in _ALL_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = val
    return _config_from_raw(raw, source)


def _config_from_raw(raw: dict[str, str], source: str) -> NetworkConfig:
    kwargs: dict = {}
    sources: dict = {}
    for key, val in raw.items():
        try:
            if key in _INT_KEYS:
                kwargs[key] = int(val)
            elif key in _STR_KEYS:
                kwargs[key] = val
            else:
                kwargs[key] = float(val)
        except ValueError as exc:
            raise ConfigError(f"key {key}: cannot parse {val!r}") from exc
        sources[key] = source
    # A rate key in the file replaces the default-mode counterpart.
    if "rho_min_kbps" in kwargs and "rho_min_bps_hz" not in kwargs:
        kwargs["rho_min_bps_hz"] = None
    if "lambda_inf_per_m2" in kwargs and "inf_to_bs_ratio" not in kwargs:
        kwargs["inf_to_bs_ratio"] = None
    cfg = NetworkConfig(**kwargs, sources=sources)
    cfg.validate()
    return cfg


def load_config(path) -> NetworkConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return parse_config_text(text, source=str(path))


def load_profile(name: str) -> NetworkConfig:
    if name not in PROFILE_NAMES:
        raise ConfigError(f"unknown profile {name!r}; available: {', '.join(PROFILE_NAMES)}")
    text = resources.files(_PROFILE_PACKAGE).joinpath(f"{name}.ini").read_text()
    return parse_config_text(text, source=f"profile:{name}")


def with_overrides(cfg: NetworkConfig, **overrides) -> NetworkConfig:
    clean = {k: v for k, v in overrides.items() if v is not None}
    if not clean:
        return cfg
    sources = dict(cfg.sources)
    sources.update({k: "override" for k in clean})
    out = replace(cfg, **clean, sources=sources)
    out.validate()
    return out
