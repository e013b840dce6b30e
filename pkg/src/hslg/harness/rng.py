"""Counter-based stream keying for reproducible parallel campaigns.

Streams are Philox generators keyed by (global seed, experiment id,
replica id) through a SeedSequence, so any parallel schedule that assigns
whole replicas to workers reproduces the serial run bit for bit.
"""

from __future__ import annotations

import numpy as np

__all__ = ["EXPERIMENT_IDS", "replica_stream"]

EXPERIMENT_IDS = {
    "fluctuation_exponent": 1,
    "transversal_scaling": 2,
    "parabola": 3,
    "point2line_clt": 4,
    "ordering": 5,
    "endpoint_tightness": 6,
    "region_pass": 7,
    "gibbs_consistency": 8,
    "ni_scaling": 9,
    "wsc_denominator": 10,
    "simulate": 99,
}


def replica_stream(seed: int, experiment: str | int, replica: int,
                   sub: int = 0) -> np.random.Generator:
    exp_id = EXPERIMENT_IDS[experiment] if isinstance(experiment, str) else int(experiment)
    ss = np.random.SeedSequence((int(seed), exp_id, int(replica), int(sub)))
    return np.random.Generator(np.random.Philox(ss))
