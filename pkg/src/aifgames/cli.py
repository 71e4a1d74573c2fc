"""Command-line entry points: run experiment configs and validate the oracles.

Config files use the JSON data model::

    {
      "conditions": ["SH2", {...inline trial config...}],
      "trials_per_condition": 20,
      "master_seed": 1234,
      "output_dir": "out",
      "emit": {"trace_csv": true, "ensemble_csv": true,
               "summary_json": true, "final_b_counts": false}
    }

Builtin condition names: SH2, SH_g, SH_r, SH_p, SHg-SHr. The literal config
name "paper-fig3" expands to all five builtin conditions.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .beliefs import FactorBelief, InferenceSettings, infer, vfe_exact, vfe_mc
from .games import PayoffTensor, preferences_from_payoffs
from .genmodel import GenerativeModel, TransitionModel, bayesian_model_reduction
from .harness import (
    AgentParams,
    TrialConfig,
    builtin_conditions,
    run_condition,
)
from .planning import efe_all_actions
from . import emit


class ConfigError(ValueError):
    pass


def _builtin_by_name() -> dict:
    return {c.name: c for c in builtin_conditions()}


def _parse_inference(doc: dict, path: str) -> InferenceSettings:
    casts = {
        "mc_samples": int,
        "sgd_steps": int,
        "sgd_learning_rate": float,
        "convergence_tol": float,
        "mode": str,
    }
    try:
        kwargs = {k: cast(doc[k]) for k, cast in casts.items() if k in doc}
        return InferenceSettings(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _parse_condition(entry, index: int) -> TrialConfig:
    path = f"conditions[{index}]"
    if isinstance(entry, str):
        builtin = _builtin_by_name()
        if entry not in builtin:
            raise ConfigError(f"{path}: unknown builtin condition {entry!r}")
        return builtin[entry]
    if not isinstance(entry, dict):
        raise ConfigError(f"{path}: must be a builtin name or an object")
    for key in ("name", "n_agents", "horizon", "base_game"):
        if key not in entry:
            raise ConfigError(f"{path}.{key}: required")
    params = AgentParams(
        beta0=float(entry.get("beta0", 5.0)),
        beta1=float(entry.get("beta1", 30.0)),
        alpha_l=float(entry.get("alpha_l", 1.0)),
        alpha_r=float(entry.get("alpha_r", 1.25)),
        prior_concentration=float(entry.get("prior_concentration", 2.0)),
        inference=_parse_inference(entry.get("inference", {}), f"{path}.inference"),
        learning_enabled=bool(entry.get("learning_enabled", True)),
    )
    try:
        cfg = TrialConfig(
            name=str(entry["name"]),
            n_agents=int(entry["n_agents"]),
            horizon=int(entry["horizon"]),
            base_game=str(entry["base_game"]),
            transitions=tuple(
                (int(t), int(d), str(g)) for (t, d, g) in entry.get("transitions", ())
            ),
            agent_params=params,
        )
        cfg.schedule()  # fail early on bad games or windows
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return cfg


def load_config(source: str) -> dict:
    if source == "paper-fig3":
        doc = {
            "conditions": ["SH2", "SH_g", "SH_r", "SH_p", "SHg-SHr"],
            "trials_per_condition": 50,
            "master_seed": 2024,
            "output_dir": "out",
        }
    else:
        path = Path(source)
        if not path.exists():
            raise ConfigError(f"config file not found: {source}")
        try:
            doc = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {source}: {exc}") from exc
    if "conditions" not in doc or not doc["conditions"]:
        raise ConfigError("conditions: at least one condition is required")
    conditions = [_parse_condition(e, i) for i, e in enumerate(doc["conditions"])]
    trials = int(doc.get("trials_per_condition", 1))
    if trials < 1:
        raise ConfigError("trials_per_condition: must be >= 1")
    emit_flags = doc.get("emit", {})
    return {
        "conditions": conditions,
        "trials_per_condition": trials,
        "master_seed": int(doc.get("master_seed", 0)),
        "output_dir": doc.get("output_dir", "out"),
        "emit": {
            "trace_csv": bool(emit_flags.get("trace_csv", True)),
            "ensemble_csv": bool(emit_flags.get("ensemble_csv", True)),
            "summary_json": bool(emit_flags.get("summary_json", True)),
            "final_b_counts": bool(emit_flags.get("final_b_counts", False)),
        },
    }


def cmd_run(args) -> int:
    try:
        config = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if args.trials is not None:
        config["trials_per_condition"] = args.trials
    if args.seed is not None:
        config["master_seed"] = args.seed
    if args.out is not None:
        config["output_dir"] = args.out

    out_dir = Path(config["output_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    flags = config["emit"]
    any_failures = False
    for template in config["conditions"]:
        summary, records = run_condition(
            template,
            config["trials_per_condition"],
            config["master_seed"],
            workers=args.threads,
        )
        if flags["trace_csv"]:
            for k, record in enumerate(records):
                if record is not None:
                    emit.write_trace_csv(out_dir / f"{template.name}_trial{k:03d}.csv", record, k)
        if flags["ensemble_csv"]:
            emit.write_ensemble_csv(out_dir / f"{template.name}_ensemble.csv", records, template.name)
        if flags["summary_json"]:
            emit.write_summary_json(
                out_dir / f"{template.name}_summary.json",
                summary,
                records,
                include_b_counts=flags["final_b_counts"],
            )
        mean_g = float(np.mean(summary.final_ensemble_g)) if summary.final_ensemble_g else float("nan")
        hist = " ".join(f"{k}={v}" for k, v in summary.histogram.items() if v)
        print(f"{template.name}: trials={summary.n_trials} {hist or 'none'} mean_final_G={mean_g:.4f}")
        if summary.failures:
            any_failures = True
            print(f"{template.name}: {len(summary.failures)} trial failure(s)", file=sys.stderr)
    return 1 if any_failures else 0


# ---------------------------------------------------------------------------
# validate: built-in oracle suite


def check_conjugate_recovery(n_cases: int = 25, seed: int = 7) -> bool:
    rng = np.random.default_rng(seed)
    mc = InferenceSettings(mode="monte-carlo")
    conj = InferenceSettings(mode="conjugate")
    for _ in range(n_cases):
        prior = FactorBelief(rng.uniform(0.5, 5.0, size=2))
        obs = int(rng.integers(0, 2))
        target = infer(prior, obs, conj, rng)
        found = infer(prior, obs, mc, rng)
        if np.max(np.abs(found.theta - target.theta)) > 0.1:
            return False
    return True


def check_vfe_estimator(n_cases: int = 20, L: int = 20000, seed: int = 11) -> bool:
    rng = np.random.default_rng(seed)
    for _ in range(n_cases):
        q = FactorBelief(rng.uniform(0.8, 5.0, size=2))
        prior = FactorBelief(rng.uniform(0.8, 5.0, size=2))
        obs = int(rng.integers(0, 2))
        estimate = vfe_mc(q, prior, obs, L, rng)
        if abs(estimate - vfe_exact(q, prior, obs)) > 0.1:
            return False
    return True


def check_efe_brute_force(n_cases: int = 20, seed: int = 13) -> bool:
    from itertools import product

    rng = np.random.default_rng(seed)
    for _ in range(n_cases):
        n_agents = int(rng.integers(2, 4))
        model = GenerativeModel.default(n_agents)
        model.transition = TransitionModel(rng.uniform(0.5, 3.0, size=(2, n_agents, 2, 2)))
        beliefs = [FactorBelief(rng.uniform(0.5, 4.0, size=2)) for _ in range(n_agents)]
        prefs = preferences_from_payoffs(PayoffTensor(rng.uniform(1, 4, size=(2,) * n_agents)))
        efe = efe_all_actions(beliefs, model, prefs, learning_enabled=False)
        from .planning import predictive_profile

        for u in range(2):
            profile = predictive_profile(beliefs, model, u)
            kl = 0.0
            for outcome in product(range(2), repeat=n_agents):
                q = 1.0
                for n, o in enumerate(outcome):
                    q *= profile.marginals[n, o]
                if q > 0:
                    kl += q * (np.log(q) - np.log(prefs.probs[outcome]))
            if abs(efe.total[u] - kl) > 1e-9:
                return False
    return True


def check_bmr_zero_case(n_cases: int = 25, seed: int = 17) -> bool:
    rng = np.random.default_rng(seed)
    for _ in range(n_cases):
        model = TransitionModel(rng.uniform(0.5, 5.0, size=(2, 2, 2, 2)))
        reduced = bayesian_model_reduction(model, model.copy())
        if not np.allclose(reduced.counts, model.counts, atol=1e-12, rtol=0):
            return False
    return True


ORACLE_CHECKS = (
    ("conjugate-inference-recovery", check_conjugate_recovery),
    ("mc-vs-exact-vfe", check_vfe_estimator),
    ("efe-brute-force-equivalence", check_efe_brute_force),
    ("bmr-zero-case", check_bmr_zero_case),
)


def cmd_validate(_args) -> int:
    all_ok = True
    for name, check in ORACLE_CHECKS:
        ok = check()
        all_ok &= ok
        print(f"{name}: {'PASS' if ok else 'FAIL'}")
    return 0 if all_ok else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="aifgames", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run an experiment config")
    run_p.add_argument("config", help="config file path or the builtin name 'paper-fig3'")
    run_p.add_argument("--trials", type=int, default=None, help="override trials per condition")
    run_p.add_argument("--seed", type=int, default=None, help="override master seed")
    run_p.add_argument("--out", default=None, help="override output directory")
    run_p.add_argument("--threads", type=int, default=1, help="parallel trial workers")
    run_p.set_defaults(func=cmd_run)

    val_p = sub.add_parser("validate", help="run the built-in oracle suite")
    val_p.set_defaults(func=cmd_validate)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
