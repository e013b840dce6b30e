"""Experiment configuration: flat key = value files with one section per
experiment, environment override HSLG_SEED, and printable defaults."""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field

__all__ = ["ExperimentConfig", "EXPERIMENT_DEFAULTS", "load_config",
           "print_defaults"]


# Values are stored as strings in the same grammar the files use; typed
# access goes through the getters on ExperimentConfig.
EXPERIMENT_DEFAULTS = {
    "fluctuation_exponent": {
        "n_grid": "128,256,512,1024,2048",
        "replicas": "2000",
        "theta": "1.0",
        "alpha": "1.0",
        "alpha_mode": "fixed",
        "seed": "1",
        "threads": "1",
        "bootstrap": "1000",
        "synthetic": "none",
    },
    "transversal_scaling": {
        "n_grid": "256,1024",
        "replicas": "2000",
        "theta": "1.0",
        "alpha": "1.0",
        "alpha_mode": "fixed",
        "r": "1.0",
        "s_grid": "0.0,0.25,0.5,0.75,1.0",
        "delta_grid": "0.5,0.25,0.125",
        "seed": "1",
        "threads": "1",
    },
    "parabola": {
        "n": "1024",
        "replicas": "2000",
        "theta": "1.0",
        "alpha": "1.0",
        "alpha_mode": "fixed",
        "m_grid": "0.5,1.0,2.0",
        "seed": "1",
        "threads": "1",
    },
    "point2line_clt": {
        "n": "1024",
        "replicas": "2000",
        "theta": "1.0",
        "alpha": "1.0",
        "alpha_mode": "fixed",
        "k_scale": "1.0",
        "seed": "1",
        "threads": "1",
    },
    "ordering": {
        "n": "200",
        "replicas": "1000",
        "theta": "1.0",
        "alpha": "1.0",
        "alpha_mode": "fixed",
        "depth": "3",
        "exponent": "1.1666666666666667",
        "seed": "1",
        "threads": "1",
    },
    "endpoint_tightness": {
        "n_grid": "128,512",
        "replicas": "500",
        "theta": "1.0",
        "alpha": "1.0",
        "alpha_mode": "fixed",
        "seed": "1",
        "threads": "1",
    },
    "region_pass": {
        "n": "128",
        "replicas": "2000",
        "theta": "1.0",
        "p_levels": "1,2",
        "m_value": "0.5",
        "r": "0.5",
        "mu": "1.0",
        "zeta": "1.0",
        "seed": "1",
        "threads": "1",
    },
    "gibbs_consistency": {
        "n_values": "3,4",
        "samples": "100000",
        "theta": "1.0",
        "alpha": "1.0",
        "sweeps": "16",
        "alpha_perturb": "0.0",
        "seed": "1",
        "threads": "1",
    },
    "ni_scaling": {
        "n_grid": "64,128,256,512,1024,2048,4096",
        "replicas": "100000",
        "theta": "1.0",
        "a1": "1.0",
        "a2": "0.0",
        "seed": "1",
        "threads": "1",
    },
    "wsc_denominator": {
        "n_grid": "64,128,256,512,1024,2048,4096",
        "replicas": "1600000",
        "theta": "1.0",
        "zeta": "1.0",
        "seed": "1",
        "threads": "1",
    },
}


@dataclass
class ExperimentConfig:
    """Typed view over one experiment section."""

    name: str
    values: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in EXPERIMENT_DEFAULTS:
            raise KeyError(
                f"unknown experiment {self.name!r}; known: "
                f"{sorted(EXPERIMENT_DEFAULTS)}"
            )
        merged = dict(EXPERIMENT_DEFAULTS[self.name])
        unknown = set(self.values) - set(merged)
        if unknown:
            raise KeyError(f"unknown keys for {self.name}: {sorted(unknown)}")
        merged.update({k: str(v) for k, v in self.values.items()})
        env_seed = os.environ.get("HSLG_SEED")
        if env_seed is not None:
            merged["seed"] = env_seed
        self.values = merged

    def get_int(self, key: str) -> int:
        return int(self.values[key])

    def get_float(self, key: str) -> float:
        return float(self.values[key])

    def get_str(self, key: str) -> str:
        return self.values[key]

    def get_float_list(self, key: str):
        return [float(x) for x in self.values[key].split(",") if x.strip()]

    def get_int_list(self, key: str):
        return [int(x) for x in self.values[key].split(",") if x.strip()]

    def provenance(self) -> dict:
        out = {"experiment": self.name}
        out.update(self.values)
        return out


def load_config(name: str, path: str | None = None, overrides: dict | None = None
                ) -> ExperimentConfig:
    values = {}
    if path is not None:
        cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        with open(path) as fh:
            cp.read_file(fh)
        if cp.has_section(name):
            values.update(dict(cp.items(name)))
    if overrides:
        values.update({k: str(v) for k, v in overrides.items() if v is not None})
    return ExperimentConfig(name=name, values=values)


def print_defaults(name: str) -> str:
    lines = [f"[{name}]"]
    for k, v in EXPERIMENT_DEFAULTS[name].items():
        lines.append(f"{k} = {v}")
    return "\n".join(lines)
