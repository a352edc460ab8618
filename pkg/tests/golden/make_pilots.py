"""Regenerate pilots.json: the q=6 attack benchmark and the q=64 compose pilot.

Run from the repository root: python3 tests/golden/make_pilots.py
"""

import json
import math
from pathlib import Path

import numpy as np

from qlistcap.adversary import AttackConfig, attack, compose, greedy_baseline
from qlistcap.construct import random_code
from qlistcap.core import Ensemble, PhasedDistribution
from qlistcap.sampler import SamplerParams

BENCH = dict(m=4096, n=16, q=6, code_seed=1, seeds=50)
BENCH_CONFIG = dict(k=4, ensemble_size=200, gamma=0.2, gamma_prime=0.2, phase_sizes=[4, 2, 2, 2], target=10)
COMPOSE = dict(m=4096, n=32, q=64, code_seed=3, ensemble_size=2000, epsilons=[0.1, 0.2])


def bench_config(seed):
    cfg = dict(BENCH_CONFIG, phase_sizes=tuple(BENCH_CONFIG["phase_sizes"]))
    return AttackConfig(seed=seed, **cfg)


def summary(out):
    return dict(
        status=out.status,
        list=out.list,
        best_verified_size=out.best_verified_size,
        bad_total=out.transcript[-1]["bad_total"] if out.transcript else None,
        confusable_members=[t["confusable_members"] for t in out.transcript],
    )


def benchmark():
    C = random_code(BENCH["m"], BENCH["n"], BENCH["q"], BENCH["code_seed"])
    runs, base = [], []
    for seed in range(BENCH["seeds"]):
        runs.append(summary(attack(C, bench_config(seed))))
        base.append(summary(greedy_baseline(C, bench_config(seed))))
    return dict(code=BENCH, config=BENCH_CONFIG, attack=runs, baseline=base)


def compose_pilot():
    C = random_code(COMPOSE["m"], COMPOSE["n"], COMPOSE["q"], COMPOSE["code_seed"])
    q = C.q
    out = []
    for eps in COMPOSE["epsilons"]:
        p = AttackConfig(epsilon=eps).resolve(q)
        exponent = max((p["delta"] - p["delta_prime"]) * q, math.log(2))
        params = SamplerParams(p["gamma"] + p["gamma_prime"], exponent / q)
        res = compose(
            Ensemble.singleton_empty(), PhasedDistribution(), np.arange(C.m), q - 2,
            COMPOSE["ensemble_size"], params, [0, 1], C, range(C.n),
        )
        v = res.verdicts.values()
        bad = sum(x.bad for x in v)
        out.append(dict(
            epsilon=eps,
            bad_columns=bad,
            bad_fraction=bad / C.n,
            furthermore_failures=sum(not x.furthermore_ok for x in v),
            sampler_failures=sum(not x.sampler_ok for x in v),
            predicted_bad_fraction=12 * math.exp(-p["delta_prime"] * q),
            max_deviation=max(x.max_deviation for x in v),
        ))
    return dict(setup=COMPOSE, runs=out)


if __name__ == "__main__":
    data = dict(benchmark=benchmark(), compose=compose_pilot())
    path = Path(__file__).with_name("pilots.json")
    path.write_text(json.dumps(data, indent=1) + "\n")
    b = data["benchmark"]
    print("attack found:", sum(r["status"] == "found" for r in b["attack"]), "/", len(b["attack"]))
    print("baseline found:", sum(r["status"] == "found" for r in b["baseline"]))
    for r in data["compose"]["runs"]:
        print(r)
