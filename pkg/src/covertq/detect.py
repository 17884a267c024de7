"""Log-likelihood-ratio detection and exact error-probability oracles.

All likelihood arithmetic is in the log domain so sequences up to 10^6
symbols never underflow.  Ties at the threshold decide H0 (the ">= gamma
implies H0" orientation), which makes every error probability bit-exactly
reproducible.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import log, sqrt

import numpy as np
from scipy.special import gammaln, logsumexp

from .model import Hypothesis, ModelParams, stationary_distribution, transition_matrix
from .sim import ObservationSequence, RngSeed, simulate_sequence_batch

INITIAL_MODES = ("stationary", "conditioned")

MC_BLOCK_SIZE = 20_000


class LlrUndefinedError(ValueError):
    """A zero transition probability was hit along the observed path."""


class DegenerateModelError(ValueError):
    """lambda_b = 0: both hypotheses coincide and errors are degenerate."""


@dataclass(frozen=True)
class LlrResult:
    llr: float
    decision: Hypothesis
    threshold: float


@dataclass(frozen=True)
class ErrorProbabilities:
    p_f: float
    p_m: float
    p_e: float
    se_f: float | None = None
    se_m: float | None = None
    trials: int | None = None

    def __post_init__(self):
        for name, v in (("p_f", self.p_f), ("p_m", self.p_m), ("p_e", self.p_e)):
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0,1]")
        if abs(self.p_e - (self.p_f + self.p_m) / 2.0) > 1e-12:
            raise ValueError("p_e must equal (p_f + p_m)/2")

    def to_json_record(self, params: ModelParams, n: int, threshold: float) -> str:
        rec = {
            "n": n,
            "lambda_w": params.lambda_w,
            "lambda_b": params.lambda_b,
            "mu": params.mu,
            "threshold": threshold,
            "p_f": self.p_f,
            "p_m": self.p_m,
            "p_e": self.p_e,
            "se_f": self.se_f,
            "se_m": self.se_m,
            "trials": self.trials,
        }
        return json.dumps(rec, sort_keys=True)


def _first_symbol_term(x1: int, p_mat: np.ndarray, q_mat: np.ndarray) -> float:
    pi_p = stationary_distribution(p_mat)
    pi_q = stationary_distribution(q_mat)
    num, den = pi_p[x1], pi_q[x1]
    if num == 0.0 or den == 0.0:
        raise LlrUndefinedError(f"zero stationary probability for first symbol {x1}")
    return log(num / den)


def log_likelihood_ratio(
    obs: ObservationSequence,
    p_mat: np.ndarray,
    q_mat: np.ndarray,
    initial: str = "stationary",
) -> float:
    """Natural-log likelihood ratio of H0 over H1 for a 2-state chain.

    With initial='stationary' the first symbol contributes the log ratio of
    the stationary probabilities; with 'conditioned' it contributes nothing.
    """
    if initial not in INITIAL_MODES:
        raise ValueError(f"initial must be one of {INITIAL_MODES}")
    if obs.n < 1:
        raise ValueError("observation sequence is empty")
    bits = obs.bits.astype(np.intp)
    total = 0.0
    if initial == "stationary":
        total += _first_symbol_term(int(bits[0]), p_mat, q_mat)
    if obs.n >= 2:
        prev, nxt = bits[:-1], bits[1:]
        p_path = p_mat[prev, nxt]
        q_path = q_mat[prev, nxt]
        if np.any(p_path == 0.0) or np.any(q_path == 0.0):
            raise LlrUndefinedError("zero transition probability along observed path")
        total += float(np.sum(np.log(p_path) - np.log(q_path)))
    return total


def decide(
    obs: ObservationSequence,
    p_mat: np.ndarray,
    q_mat: np.ndarray,
    threshold: float = 0.0,
    initial: str = "stationary",
) -> LlrResult:
    """Threshold rule: H0 when llr >= threshold, H1 otherwise."""
    llr = log_likelihood_ratio(obs, p_mat, q_mat, initial)
    decision = Hypothesis.H0 if llr >= threshold else Hypothesis.H1
    return LlrResult(llr=llr, decision=decision, threshold=threshold)


def _binom_logpmf(k: np.ndarray, n: int, prob: float) -> np.ndarray:
    k = np.asarray(k, dtype=float)
    return (
        gammaln(n + 1)
        - gammaln(k + 1)
        - gammaln(n - k + 1)
        + k * log(prob)
        + (n - k) * log(1.0 - prob)
    )


def _llr_coefficients(params: ModelParams) -> tuple[float, float]:
    """Per-symbol LLR contributions (idle symbol, busy symbol)."""
    p = params.idle_probability(Hypothesis.H0)
    q = params.idle_probability(Hypothesis.H1)
    return log(p / q), log((1.0 - p) / (1.0 - q))


def exact_error_probabilities(
    params: ModelParams,
    n: int,
    threshold: float = 0.0,
    initial: str = "stationary",
) -> ErrorProbabilities:
    """Closed-form error probabilities of the threshold test.

    Both rows of the chain are equal, so the idle-count over the counted
    symbols is a binomial sufficient statistic and the LLR is affine in it.
    Tail masses are accumulated from log-domain binomial terms.
    """
    if initial not in INITIAL_MODES:
        raise ValueError(f"initial must be one of {INITIAL_MODES}")
    if params.lambda_b <= 0:
        raise DegenerateModelError("lambda_b must be positive for a nondegenerate test")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    p = params.idle_probability(Hypothesis.H0)
    q = params.idle_probability(Hypothesis.H1)
    c_idle, c_busy = _llr_coefficients(params)
    m = n if initial == "stationary" else n - 1
    if m == 0:
        # single conditioned symbol: llr identically 0, ties go to H0
        p_f, p_m = (0.0, 1.0) if 0.0 >= threshold else (1.0, 0.0)
        return ErrorProbabilities(p_f=p_f, p_m=p_m, p_e=(p_f + p_m) / 2.0)
    k = np.arange(m + 1)
    llr_k = k * c_idle + (m - k) * c_busy
    decide_h0 = llr_k >= threshold
    p_f = _tail_mass(k[~decide_h0], m, p)
    p_m = _tail_mass(k[decide_h0], m, q)
    return ErrorProbabilities(p_f=p_f, p_m=p_m, p_e=(p_f + p_m) / 2.0)


def _tail_mass(ks: np.ndarray, m: int, prob: float) -> float:
    if ks.size == 0:
        return 0.0
    if ks.size == m + 1:
        return 1.0
    return float(min(1.0, np.exp(logsumexp(_binom_logpmf(ks, m, prob)))))


def _mc_block(
    params: ModelParams,
    hyp: Hypothesis,
    n: int,
    threshold: float,
    block_trials: int,
    seed: RngSeed,
    initial: str,
) -> int:
    """Number of erroneous decisions in one simulation block."""
    bits = simulate_sequence_batch(params, hyp, n, block_trials, seed)
    c_idle, c_busy = _llr_coefficients(params)
    counted = bits if initial == "stationary" else bits[:, 1:]
    m = counted.shape[1]
    k = m - counted.sum(axis=1)  # idle count
    llr = k * c_idle + (m - k) * c_busy
    decide_h0 = llr >= threshold
    if hyp is Hypothesis.H0:
        return int(np.count_nonzero(~decide_h0))
    return int(np.count_nonzero(decide_h0))


def monte_carlo_error(
    params: ModelParams,
    n: int,
    threshold: float,
    trials: int,
    seed: RngSeed,
    initial: str = "stationary",
    workers: int = 1,
    block_size: int = MC_BLOCK_SIZE,
) -> ErrorProbabilities:
    """Empirical error rates over `trials` simulated sequences per hypothesis.

    Trials are split into fixed blocks with independent (seed, stream_id)
    streams; integer error counts are summed in block order, so the result
    is bit-identical at any worker count.
    """
    if initial not in INITIAL_MODES:
        raise ValueError(f"initial must be one of {INITIAL_MODES}")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    jobs = []
    for hyp in (Hypothesis.H0, Hypothesis.H1):
        done = 0
        block_index = 0
        while done < trials:
            bt = min(block_size, trials - done)
            # hypothesis and block packed into disjoint offset ranges so
            # streams never collide across rows of a campaign grid
            stream = seed.stream_id + 1 + hyp.value * 2**20 + 2 * block_index
            jobs.append((hyp, bt, seed.with_stream(stream)))
            done += bt
            block_index += 1

    def run(job):
        hyp, bt, s = job
        return hyp, _mc_block(params, hyp, n, threshold, bt, s, initial)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(j) for j in jobs]
    errors = {Hypothesis.H0: 0, Hypothesis.H1: 0}
    for hyp, count in results:
        errors[hyp] += count
    p_f = errors[Hypothesis.H0] / trials
    p_m = errors[Hypothesis.H1] / trials
    return ErrorProbabilities(
        p_f=p_f,
        p_m=p_m,
        p_e=(p_f + p_m) / 2.0,
        se_f=sqrt(p_f * (1.0 - p_f) / trials),
        se_m=sqrt(p_m * (1.0 - p_m) / trials),
        trials=trials,
    )


def matrices(params: ModelParams) -> tuple[np.ndarray, np.ndarray]:
    """Convenience: (P, Q) for the two hypotheses."""
    return (
        transition_matrix(params, Hypothesis.H0),
        transition_matrix(params, Hypothesis.H1),
    )
