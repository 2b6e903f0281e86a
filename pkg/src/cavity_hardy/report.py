"""Report assembly and deterministic JSON serialization."""

from __future__ import annotations

import json
from dataclasses import asdict

from .config import SCHEMA_VERSION, RunConfig
from .nonlocality import LhvResult, constraints_from_stats, hardy_stats, hardy_verdict, lhv_enumerate
from .protocols import ExperimentRecord, run_experiment, transit_amplitudes
from .pulse_model import Amplitudes

REPORT_SCHEMA_ID = "cavity-hardy-report"


def _prob(p: float) -> float:
    # Born sums can overshoot [0, 1] by a few ulps.
    return min(1.0, max(0.0, float(p)))


def _maybe_prob(p):
    return None if p is None else _prob(p)


def record_to_dict(rec: ExperimentRecord) -> dict:
    return {
        "experiment_id": rec.experiment_id,
        "mode": rec.mode.value,
        "alice_setting": rec.alice_setting.value,
        "bob_setting": rec.bob_setting.value,
        "preparation_probability": _prob(rec.preparation_probability),
        "measured": list(rec.measured),
        "joint_table": [{"levels": list(k), "probability": _prob(p)} for k, p in sorted(rec.joint_table.items())],
        "outcomes": [
            {"alice": a, "bob": b, "probability": _prob(p)} for (a, b), p in sorted(rec.outcomes.items())
        ],
        "postselection": {k: _prob(v) for k, v in sorted(rec.postselection.items())},
        "events": {k: _maybe_prob(v) for k, v in sorted(rec.events.items())},
        "multi_photon": {k: _prob(v) for k, v in sorted(rec.multi_photon.items())},
        "leakage": [{"atom": r.atom, "cavity": r.cavity, "amplitude": r.amplitude} for r in rec.leakage],
    }


def lhv_to_dict(result: LhvResult) -> dict:
    return {
        "total_strategies": result.total_strategies,
        "constraints": sorted(result.constraints),
        "satisfiable": result.satisfiable,
        "satisfying": [asdict(s) for s in result.satisfying],
    }


def build_report(config: RunConfig, experiments) -> dict:
    """Run the requested experiments (ids 1-4); all four also yields the Hardy analysis."""
    experiments = sorted(set(experiments))
    records = {eid: run_experiment(config.experiment_config(eid)) for eid in experiments}

    transits = {}
    for key, transit in sorted(config.transits.items()):
        amps = transit_amplitudes(transit)
        transits[key] = {
            "theta": amps.theta,
            "alpha1": amps.alpha1,
            "alpha2": amps.alpha2,
            "forced": isinstance(transit, Amplitudes),
        }

    warnings = []
    for rec in records.values():
        for leak in rec.leakage:
            warnings.append(
                f"experiment {rec.experiment_id}: truncation leakage {leak.amplitude:.3e} on |e,cutoff> "
                f"({leak.atom} in {leak.cavity})"
            )
        for cav, p in sorted(rec.multi_photon.items()):
            if p > 0:
                warnings.append(f"experiment {rec.experiment_id}: multi-photon probability {p:.6g} in {cav}")

    hardy = verdict = lhv = None
    if set(experiments) == {1, 2, 3, 4}:
        stats = hardy_stats(records)
        verdict = hardy_verdict(stats, config.eps).value
        hardy = {**{k: _prob(v) for k, v in asdict(stats).items()}, "eps": config.eps}
        licensed = constraints_from_stats(stats, config.eps)
        if {"i", "ii", "iii"} <= licensed:
            lhv = lhv_to_dict(lhv_enumerate())
        else:
            warnings.append("Hardy support constraints i-iii do not hold; LHV enumeration skipped")

    return {
        "schema": REPORT_SCHEMA_ID,
        "schema_version": SCHEMA_VERSION,
        "config": config.raw,
        "transits": transits,
        "experiments": [record_to_dict(records[eid]) for eid in experiments],
        "hardy": hardy,
        "verdict": verdict,
        "lhv": lhv,
        "warnings": warnings,
    }


def dumps(report: dict) -> str:
    """Canonical text: sorted keys, shortest round-trip float repr."""
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"
