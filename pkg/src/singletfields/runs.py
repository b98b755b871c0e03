"""Seeded trial harness.

Trial ``i`` of a run with master seed ``s`` draws from its own stream
``default_rng(SeedSequence([s, i]))``, so results do not depend on evaluation
order and any single trial can be replayed in isolation.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fields import ORTHOGONAL, PARALLEL, Promise, eve_choose
from .locc import run_locc
from .protocol import Strategy, TrialRecord, run_with_qcomm


def trial_rng(master_seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(master_seed), int(index)]))


def mixed_promise(rng) -> Promise:
    return PARALLEL if rng.random() < 0.5 else ORTHOGONAL


def draw_scenario(master_seed: int, index: int, promise: Promise | None = None):
    """Scenario for one trial plus the stream positioned right after Eve's draw."""
    rng = trial_rng(master_seed, index)
    if promise is None:
        promise = mixed_promise(rng)
    return eve_choose(promise, rng), rng


@dataclass
class RunSummary:
    strategy: Strategy
    trials: int = 0
    errors: int = 0
    classical_bits: set = field(default_factory=set)
    pairs_consumed: set = field(default_factory=set)
    locality_violations: int = 0
    verdicts: list = field(default_factory=list)

    def add(self, record: TrialRecord, transcript=None):
        self.trials += 1
        self.errors += not record.correct
        self.verdicts.append(record.verdict)
        if transcript is not None:
            self.classical_bits.add(transcript.classical_bits)
            self.pairs_consumed.add(transcript.pairs_consumed)
            self.locality_violations += len(transcript.audit())


def run_trials(strategy: Strategy, trials: int, master_seed: int,
               promise: Promise | None = None, **kwargs) -> RunSummary:
    summary = RunSummary(strategy)
    for i in range(trials):
        scenario, rng = draw_scenario(master_seed, i, promise)
        if strategy is Strategy.QCOMM:
            summary.add(run_with_qcomm(scenario, rng, seed=i))
        else:
            summary.add(*run_locc(scenario, rng, seed=i, **kwargs))
    return summary
