"""Seeded, replayable drivers behind the CLI tasks.

Every trial builds a fresh generator from (seed, trial index) through
SeedSequence spawn keys, so records are identical whatever the parallelism,
and reports are canonicalized by trial index.  Promise checks run against the
exact dense oracle and raise PromiseViolationError when an instance falls
outside its advertised regime.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import calibration
from .certifier import CertConfig, IterationSchedule, certify, evolution_time_bound
from .constants import SHADOW_SAMPLE_HARD_CAP, constants_ledger
from .errors import BudgetExceededError, ConfigError, PromiseViolationError
from .gibbs import (
    GibbsCertConfig,
    GibbsLearnConfig,
    certify_gibbs,
    degenerate_regime,
    learn_gibbs,
    pinsker_gap,
)
from .hamiltonians import (
    LocalHamiltonian,
    build_net,
    gibbs_density,
    hamiltonian_diff,
    random_hamiltonian,
)
from .oracle import schatten_moment, trace_distance
from .paulis import PauliString, enumerate_local_paulis, pauli_trace_inner
from .shadows import collect_shadows, estimate_all, shadow_budget

TASKS = (
    "certify-dynamics",
    "learn-gibbs",
    "certify-gibbs",
    "verify-bonami",
    "verify-bounds",
    "shadow-estimate",
)

SLACK_TOL = -1e-9


def trial_rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def _run_trials(trial_fn, params: dict, trials: int, seed: int, parallelism: int) -> list:
    args = [(params, seed, t) for t in range(trials)]
    if parallelism > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as ex:
            return list(ex.map(trial_fn, args))
    return [trial_fn(a) for a in args]


# ---------------------------------------------------------------- bonami

def _bonami_trial(args) -> dict:
    params, seed, trial = args
    rng = trial_rng(seed, trial)
    n = int(rng.integers(params["n_min"], params["n_max"] + 1))
    h = random_hamiltonian(n, params["k"], rng)
    frob = h.frobenius_norm()
    rows = []
    min_slack = math.inf
    for l in range(params["l_min"], params["l_max"] + 1):
        moment = schatten_moment(h, l)
        bound = l ** (params["k"] / 2.0) * frob
        slack = bound - moment
        min_slack = min(min_slack, slack)
        rows.append({"l": l, "moment": moment, "bound": bound, "slack": slack})
    return {"trial": trial, "n": n, "frobenius": frob,
            "min_slack": min_slack, "rows": rows}


def task_verify_bonami(params, trials, seed, parallelism):
    records = _run_trials(_bonami_trial, params, trials, seed, parallelism)
    violations = sum(1 for r in records if r["min_slack"] < SLACK_TOL)
    table = [
        [r["trial"], r["n"], row["l"], row["moment"], row["bound"], row["slack"]]
        for r in records for row in r["rows"]
    ]
    payload = {
        "task": "verify-bonami",
        "violations": violations,
        "min_slack": min(r["min_slack"] for r in records),
        "trials": [{k: v for k, v in r.items() if k != "rows"} for r in records],
    }
    return payload, {"moments": (["trial", "n", "l", "moment", "bound", "slack"], table)}


DEFAULT_PARAMS = {}

DEFAULT_PARAMS["verify-bonami"] = {
    "n_min": 2, "n_max": 5, "k": 2, "l_min": 3, "l_max": 8,
}


# ---------------------------------------------------------------- bounds

def _bounds_trial(args) -> dict:
    params, seed, trial = args
    rng = trial_rng(seed, trial)
    n = int(rng.integers(params["n_min"], params["n_max"] + 1))
    k = params["k"]
    beta = float(rng.uniform(params["beta_min"], params["beta_max"]))
    h = random_hamiltonian(n, k, rng)
    h0 = random_hamiltonian(n, k, rng)
    diag = pinsker_gap(gibbs_density(h, beta), gibbs_density(h0, beta), h, h0, beta)
    return {
        "trial": trial, "n": n, "beta": beta,
        "lhs": diag.lhs, "rhs_pinsker": diag.rhs_pinsker,
        "rhs_coeff_sup": diag.rhs_coeff_sup, "rhs_state_sup": diag.rhs_state_sup,
        "min_slack": min(diag.slacks),
    }


def _footnote_trial(args) -> dict:
    params, seed, trial = args
    rng = trial_rng(seed, trial, 1)
    n, k, eps = params["footnote_n"], params["k"], params["footnote_eps"]
    # regime eps^2/(400 beta n^k) >= 2 eps, i.e. beta <= eps / (800 n^k)
    beta = float(rng.uniform(0.1, 1.0)) * eps / (800.0 * n**k)
    h = random_hamiltonian(n, k, rng)
    h0 = random_hamiltonian(n, k, rng)
    dist = trace_distance(gibbs_density(h, beta), gibbs_density(h0, beta))
    cfg = GibbsCertConfig(n=n, k=k, beta=beta, eps=eps, delta=0.1)
    return {
        "trial": trial, "beta": beta, "distance": dist, "bound": eps / 2.0,
        "regime": degenerate_regime(cfg), "ok": bool(dist <= eps / 2.0),
    }


def task_verify_bounds(params, trials, seed, parallelism):
    records = _run_trials(_bounds_trial, params, trials, seed, parallelism)
    foot = _run_trials(_footnote_trial, params, params["footnote_pairs"], seed, parallelism)
    violations = sum(1 for r in records if r["min_slack"] < SLACK_TOL)
    foot_violations = sum(1 for r in foot if not (r["regime"] and r["ok"]))
    payload = {
        "task": "verify-bounds",
        "violations": violations,
        "footnote_violations": foot_violations,
        "min_slack": min(r["min_slack"] for r in records),
        "trials": records,
        "footnote_trials": foot,
    }
    table = [
        [r["trial"], r["n"], r["beta"], r["lhs"], r["rhs_pinsker"],
         r["rhs_coeff_sup"], r["rhs_state_sup"], r["min_slack"]]
        for r in records
    ]
    header = ["trial", "n", "beta", "lhs", "rhs_pinsker",
              "rhs_coeff_sup", "rhs_state_sup", "min_slack"]
    return payload, {"bounds": (header, table)}


DEFAULT_PARAMS["verify-bounds"] = {
    "n_min": 2, "n_max": 3, "k": 2, "beta_min": 1e-3, "beta_max": 3.0,
    "footnote_pairs": 50, "footnote_eps": 0.3, "footnote_n": 2,
}


# ---------------------------------------------------------------- dynamics

def _dynamics_trial(args) -> dict:
    params, seed, trial = args
    rng = trial_rng(seed, trial)
    eps = params["eps"]
    far = params["arm"] == "far"
    h0, h = calibration.certifier_instance(
        trial_rng(seed, trial, 1), params["n"], eps, far, params["c_frob"]
    )
    delta_norm = hamiltonian_diff(h, h0).frobenius_norm()
    if far and delta_norm < 12.0 * eps - 1e-9:
        raise PromiseViolationError(
            f"far-arm instance has ||dH||_F = {delta_norm} < 12 eps = {12 * eps}"
        )
    if not far and delta_norm > eps + 1e-9:
        raise PromiseViolationError(
            f"close-arm instance has ||dH||_F = {delta_norm} > eps = {eps}"
        )
    config = CertConfig(
        eps=eps, delta=params["delta"], c_op=params["c_op"],
        c_frob=params["c_frob"], profile=params["profile"],
        estimator=params["estimator"],
        synthetic_noise=params.get("synthetic_noise", 0.0),
    )
    report = certify(h0, h, config, rng, seed=[seed, trial])
    expected = "FAR" if far else "CLOSE"
    return {
        "trial": trial,
        "verdict": report.verdict,
        "expected": expected,
        "correct": report.verdict == expected,
        "delta_frobenius_oracle_only": delta_norm,
        "ledger": report.ledger,
        "levels": [vars(r) for r in report.levels],
    }


def task_certify_dynamics(params, trials, seed, parallelism):
    records = _run_trials(_dynamics_trial, params, trials, seed, parallelism)
    errors = sum(1 for r in records if not r["correct"])
    total_time = [r["ledger"]["total_evolution_time"] for r in records]
    schedule = IterationSchedule(params["eps"], params["delta"], params["c_frob"])
    config = CertConfig(
        eps=params["eps"], delta=params["delta"], c_op=params["c_op"],
        c_frob=params["c_frob"], profile=params["profile"],
        estimator=params["estimator"],
    )
    mean_time = float(np.mean(total_time))
    payload = {
        "task": "certify-dynamics",
        "arm": params["arm"],
        "error_count": errors,
        "error_rate": errors / len(records),
        "mean_total_evolution_time": mean_time,
        "normalized_time": mean_time * params["eps"] / schedule.log_factor(),
        "time_bound": evolution_time_bound(config),
        "schedule_levels": schedule.big_l + 1,
        "trials": [{k: v for k, v in r.items() if k != "levels"} for r in records],
    }
    table = [
        [r["trial"], r["verdict"], r["expected"], int(r["correct"]),
         r["ledger"]["total_evolution_time"], r["ledger"]["query_count"],
         r["ledger"]["experiment_count"]]
        for r in records
    ]
    header = ["trial", "verdict", "expected", "correct",
              "total_evolution_time", "query_count", "experiment_count"]
    return payload, {"verdicts": (header, table)}


DEFAULT_PARAMS["certify-dynamics"] = {
    "n": 2, "eps": 0.05, "delta": 0.1, "arm": "close", "c_frob": 1.0,
    "c_op": 2.0, "profile": "calibrated", "estimator": "sampled",
}


# ---------------------------------------------------------------- learn

def _resolve_samples(requested, nominal: int) -> int:
    if requested is not None:
        return int(requested)
    if nominal > SHADOW_SAMPLE_HARD_CAP:
        raise BudgetExceededError(
            f"nominal sample budget {nominal} exceeds the hard cap "
            f"{SHADOW_SAMPLE_HARD_CAP}; set params.samples explicitly"
        )
    return nominal


def _learn_trial(args) -> dict:
    params, seed, trial = args
    support = tuple(PauliString.from_label(s) for s in params["support"])
    config = GibbsLearnConfig(
        n=params["n"], k=params["k"], beta=params["beta"],
        eps=params["eps"], delta=params["delta"], support=support,
        eta=params.get("eta"), samples=params.get("samples"),
    )
    net = build_net(support, config.eta_used)
    rng = trial_rng(seed, trial)
    if params.get("on_grid"):
        truth_index = int(rng.integers(net.size))
        truth = net.member(truth_index)
    else:
        truth_index = None
        coeffs = {p: float(rng.uniform(-1.0, 1.0)) for p in support}
        truth = LocalHamiltonian(params["n"], params["k"], coeffs)
    rho = gibbs_density(truth, params["beta"])
    if params.get("exact_estimates"):
        estimates = {p: pauli_trace_inner(p, rho).real for p in support}
        samples = None
        index, learned, report = learn_gibbs(None, net, config, estimates=estimates)
    else:
        m = _resolve_samples(params.get("samples"), config.nominal_budget)
        samples = collect_shadows(rho, m, trial_rng(seed, trial, 1))
        index, learned, report = learn_gibbs(samples, net, config)
    dist = trace_distance(learned.rho, rho)
    rec = {
        "trial": trial,
        "index": index,
        "objective": report.objective,
        "distance_oracle_only": dist,
        "within_eps": bool(dist <= params["eps"]),
        "samples_used": 0 if samples is None else len(samples),
        "nominal_budget": report.nominal_budget,
    }
    if truth_index is not None:
        rec["truth_index"] = truth_index
        rec["recovered"] = index == truth_index
    return rec


def task_learn_gibbs(params, trials, seed, parallelism):
    records = _run_trials(_learn_trial, params, trials, seed, parallelism)
    success = sum(1 for r in records if r["within_eps"])
    payload = {
        "task": "learn-gibbs",
        "success_count": success,
        "success_rate": success / len(records),
        "trials": records,
    }
    if all("recovered" in r for r in records):
        payload["recovery_rate"] = sum(r["recovered"] for r in records) / len(records)
    header = ["trial", "index", "objective", "distance", "within_eps"]
    table = [[r["trial"], r["index"], r["objective"],
              r["distance_oracle_only"], int(r["within_eps"])] for r in records]
    return payload, {"learned": (header, table)}


DEFAULT_PARAMS["learn-gibbs"] = {
    "n": 2, "k": 2, "beta": 1.0, "eps": 0.3, "delta": 0.1,
    "support": ["ZI", "IZ", "ZZ"], "eta": 0.25, "samples": 20000,
    "on_grid": False, "exact_estimates": False,
}


# ---------------------------------------------------------------- gibbs cert

def _zblock_hamiltonian(n: int, k: int, sign: float) -> LocalHamiltonian:
    coeffs = {}
    for i in range(n):
        label = "I" * i + "Z" + "I" * (n - 1 - i)
        coeffs[PauliString.from_label(label)] = sign
    return LocalHamiltonian(n, k, coeffs)


def _gibbs_cert_trial(args) -> dict:
    params, seed, trial = args
    n, k, beta, eps = params["n"], params["k"], params["beta"], params["eps"]
    config = GibbsCertConfig(n=n, k=k, beta=beta, eps=eps, delta=params["delta"],
                             samples=params.get("samples"))
    m = _resolve_samples(params.get("samples"), config.nominal_budget)
    arm = params["arm"]
    if arm == "equal":
        h = random_hamiltonian(n, k, trial_rng(seed, trial, 1))
        rho = gibbs_density(h, beta)
        rho0 = rho
        expected = "CLOSE"
        # identical states sampled on identical sub-seeds, as the equal-arm
        # pairing: the two estimate sets then agree exactly
        samples_a = collect_shadows(rho, m, trial_rng(seed, trial, 2))
        samples_b = collect_shadows(rho0, m, trial_rng(seed, trial, 2))
    elif arm == "far":
        h = _zblock_hamiltonian(n, k, 1.0)
        h0 = _zblock_hamiltonian(n, k, -1.0)
        rho = gibbs_density(h, beta)
        rho0 = gibbs_density(h0, beta)
        dist = trace_distance(rho, rho0)
        if dist < 2.0 * eps - 1e-9:
            raise PromiseViolationError(
                f"far-arm states are only {dist} apart, need >= {2 * eps}"
            )
        expected = "FAR"
        samples_a = collect_shadows(rho, m, trial_rng(seed, trial, 2))
        samples_b = collect_shadows(rho0, m, trial_rng(seed, trial, 3))
    else:
        raise ConfigError(f"unknown arm {arm!r}")
    verdict, report = certify_gibbs(samples_a, samples_b, config)
    return {
        "trial": trial,
        "verdict": verdict,
        "expected": expected,
        "correct": verdict == expected,
        "max_gap": report.max_gap,
        "far_threshold": report.far_threshold,
        "samples_used": m,
        "nominal_budget": report.nominal_budget,
    }


def task_certify_gibbs(params, trials, seed, parallelism):
    records = _run_trials(_gibbs_cert_trial, params, trials, seed, parallelism)
    errors = sum(1 for r in records if not r["correct"])
    payload = {
        "task": "certify-gibbs",
        "arm": params["arm"],
        "error_count": errors,
        "error_rate": errors / len(records),
        "trials": records,
    }
    header = ["trial", "verdict", "expected", "correct", "max_gap", "far_threshold"]
    table = [[r["trial"], r["verdict"], r["expected"], int(r["correct"]),
              r["max_gap"], r["far_threshold"]] for r in records]
    return payload, {"verdicts": (header, table)}


DEFAULT_PARAMS["certify-gibbs"] = {
    "n": 2, "k": 2, "beta": 1.0, "eps": 0.3, "delta": 0.1,
    "arm": "equal", "samples": 20000,
}


# ---------------------------------------------------------------- shadows

def _shadow_trial(args) -> dict:
    params, seed, trial = args
    n, k, eps, delta = params["n"], params["k"], params["eps"], params["delta"]
    h = random_hamiltonian(n, k, trial_rng(seed, trial, 1))
    rho = gibbs_density(h, params["beta"])
    m = _resolve_samples(params.get("samples"), shadow_budget(n, k, eps, delta))
    samples = collect_shadows(rho, m, trial_rng(seed, trial, 2))
    est = estimate_all(samples, k, delta)
    errors = {
        p.label: abs(est.value(p) - pauli_trace_inner(p, rho).real)
        for p in enumerate_local_paulis(n, k)
    }
    max_err = max(errors.values())
    return {
        "trial": trial, "samples_used": m, "batches": est.batches,
        "max_abs_error": max_err, "all_within_eps": bool(max_err <= eps),
        "errors": errors,
    }


def task_shadow_estimate(params, trials, seed, parallelism):
    records = _run_trials(_shadow_trial, params, trials, seed, parallelism)
    success = sum(1 for r in records if r["all_within_eps"])
    payload = {
        "task": "shadow-estimate",
        "success_count": success,
        "success_rate": success / len(records),
        "budget": records[0]["samples_used"],
        "trials": [{k: v for k, v in r.items() if k != "errors"} for r in records],
    }
    header = ["trial", "samples", "batches", "max_abs_error", "all_within_eps"]
    table = [[r["trial"], r["samples_used"], r["batches"],
              r["max_abs_error"], int(r["all_within_eps"])] for r in records]
    return payload, {"coverage": (header, table)}


DEFAULT_PARAMS["shadow-estimate"] = {
    "n": 3, "k": 2, "eps": 0.1, "delta": 0.05, "beta": 1.0,
}


# ---------------------------------------------------------------- dispatch

_TASK_FUNCS = {
    "verify-bonami": task_verify_bonami,
    "verify-bounds": task_verify_bounds,
    "certify-dynamics": task_certify_dynamics,
    "learn-gibbs": task_learn_gibbs,
    "certify-gibbs": task_certify_gibbs,
    "shadow-estimate": task_shadow_estimate,
}

DEFAULT_TRIALS = {
    "verify-bonami": 1000,
    "verify-bounds": 500,
    "certify-dynamics": 50,
    "learn-gibbs": 20,
    "certify-gibbs": 50,
    "shadow-estimate": 40,
}


def run_task(config: dict) -> tuple[dict, dict]:
    """Execute a validated run configuration; returns (payload, csv tables)."""
    task = config["task"]
    params = {**DEFAULT_PARAMS[task], **config.get("params", {})}
    trials = config.get("trials") or DEFAULT_TRIALS[task]
    seed = config.get("seed", 0)
    parallelism = config.get("parallelism", 1)
    payload, tables = _TASK_FUNCS[task](params, trials, seed, parallelism)
    payload["resolved_config"] = {
        "task": task, "seed": seed, "trials": trials,
        "parallelism": parallelism, "params": params,
        "schema_version": 1,
    }
    payload["constants"] = constants_ledger()
    return payload, tables


def validate_config(raw: dict) -> dict:
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a JSON object")
    if raw.get("schema_version") != 1:
        raise ConfigError(f"unsupported schema_version {raw.get('schema_version')!r}")
    task = raw.get("task")
    if task not in TASKS:
        raise ConfigError(f"unknown task {task!r}; expected one of {', '.join(TASKS)}")
    out = {"schema_version": 1, "task": task}
    for key, kind, default in (
        ("seed", int, 0), ("trials", int, None), ("parallelism", int, 1),
    ):
        val = raw.get(key, default)
        if val is not None and (not isinstance(val, int) or isinstance(val, bool) or val < 0):
            raise ConfigError(f"{key} must be a nonnegative integer, got {val!r}")
        out[key] = val
    if out["parallelism"] == 0:
        raise ConfigError("parallelism must be >= 1")
    if out["trials"] is not None and out["trials"] == 0:
        raise ConfigError("trials must be >= 1")
    params = raw.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("params must be an object")
    allowed = set(DEFAULT_PARAMS[task]) | {"samples", "synthetic_noise", "on_grid",
                                           "exact_estimates", "eta"}
    unknown = set(params) - allowed
    if unknown:
        raise ConfigError(f"unknown params for {task}: {sorted(unknown)}")
    out["params"] = params
    if "out" in raw:
        if not isinstance(raw["out"], str):
            raise ConfigError("out must be a string path")
        out["out"] = raw["out"]
    return out
