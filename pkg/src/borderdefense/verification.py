"""
Randomized checks of the value function: HJI residual, finite-difference
gradient agreement and the F/G identities behind the two-pursuer closed form.

States are drawn either around a scenario (``jitter_states``) or from two
canned regimes (``random_regime_state``). Samples that sit within a small
margin of a dispersal surface or of a solo/simultaneous switch are skipped
and counted, since the value is not differentiable there.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Dict, Iterator, Optional, Tuple

import numpy as np

from .assignment import NoFeasibleAssignmentError, optimal_assignment
from .geometry import DegenerateConfigurationError
from .state import GameState, SpeedTable
from .value import (DispersalSurfaceError, TooFewAssignmentsError, coop_identities, dispersal_gap,
                    finite_difference_gradient, hamiltonian, mode_margin, optimal_headings, value_gradient)

HJI_TOL = 1e-6
GRAD_TOL = 1e-5
IDENTITY_TOL = 1e-9
DISPERSAL_SKIP = 1e-6
MODE_SKIP = 1e-4


@dataclass
class SampleCheck:
    hji: float  # |grad V . f| / (v_max |grad V|)
    gradient: Optional[float]  # max componentwise relative error, None when not computed
    identity: Optional[float]  # max identity residual, None without a simultaneous pair


@dataclass
class VerificationReport:
    samples: int = 0
    checked: int = 0
    skipped_dispersal: int = 0
    skipped_mode_boundary: int = 0
    max_hji: float = 0.0
    max_gradient_error: float = 0.0
    max_identity_residual: float = 0.0

    @property
    def passed(self) -> bool:
        return (self.max_hji <= HJI_TOL and self.max_gradient_error <= GRAD_TOL
                and self.max_identity_residual <= IDENTITY_TOL)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["tolerances"] = {"hji": HJI_TOL, "gradient": GRAD_TOL, "identity": IDENTITY_TOL}
        d["passed"] = self.passed
        return d


def gradient_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """Componentwise relative error, measured against max(|g_k|, 1)."""
    return float(np.max(np.abs(analytic - numeric) / np.maximum(np.abs(analytic), 1.0)))


def near_switch(state: GameState, speeds: SpeedTable) -> Optional[str]:
    """'dispersal' or 'mode' when the state is too close to a kink, else None."""
    best = optimal_assignment(state, speeds)
    try:
        gap = dispersal_gap(state, speeds)
        if gap <= DISPERSAL_SKIP * max(1.0, abs(best.value)):
            return "dispersal"
    except TooFewAssignmentsError:
        pass
    if mode_margin(state, speeds, best) < MODE_SKIP:
        return "mode"
    return None


def check_state(state: GameState, speeds: SpeedTable, with_gradient: bool = True) -> SampleCheck:
    best = optimal_assignment(state, speeds)
    grad = value_gradient(state, speeds)
    hp, he = optimal_headings(state, speeds, best)
    h = hamiltonian(state, speeds, grad, hp, he)
    norm = grad.norm
    hji = abs(h) / (speeds.v_max * norm) if norm > 0 else abs(h)
    gerr = None
    if with_gradient:
        gerr = gradient_error(grad.vector, finite_difference_gradient(state, speeds))
    ident = None
    for j, plan in best.plans.items():
        if plan is None or plan.mode != "simultaneous":
            continue
        try:
            r = max(coop_identities(state, speeds, plan.pursuers, j).values())
        except DegenerateConfigurationError:
            continue
        ident = r if ident is None else max(ident, r)
    return SampleCheck(hji, gerr, ident)


def jitter_states(state: GameState, speeds: SpeedTable, rng: np.random.Generator,
                  spread: float = 0.1, max_tries: int = 50) -> Iterator[GameState]:
    """Endless stream of states in the pursuers' winning region near ``state``.

    Each coordinate moves by a normal offset of ``spread`` times the
    configuration diameter; states below the border or outside the winning
    region are redrawn (up to ``max_tries`` times in a row).
    """
    x0 = state.to_vector()
    sigma = spread * max(state.diameter(), 1e-9)
    n_ys = slice(1, None, 2)
    while True:
        for _ in range(max_tries):
            x = x0 + rng.normal(0.0, sigma, size=x0.shape)
            if np.any(x[n_ys] < 0):
                continue
            cand = state.with_vector(x)
            try:
                optimal_assignment(cand, speeds)
            except NoFeasibleAssignmentError:
                continue
            yield cand
            break
        else:
            return


def verify_around(state: GameState, speeds: SpeedTable, samples: int, seed: int,
                  with_gradient: bool = True) -> VerificationReport:
    rng = np.random.default_rng(seed)
    rep = VerificationReport()
    if samples <= 0:
        return rep
    for cand in jitter_states(state, speeds, rng):
        _tally(rep, cand, speeds, with_gradient)
        if rep.samples >= samples:
            break
    return rep


def _tally(rep: VerificationReport, state: GameState, speeds: SpeedTable, with_gradient: bool) -> None:
    rep.samples += 1
    kink = near_switch(state, speeds)
    if kink is not None:
        if kink == "dispersal":
            rep.skipped_dispersal += 1
        else:
            rep.skipped_mode_boundary += 1
        return
    try:
        chk = check_state(state, speeds, with_gradient)
    except DispersalSurfaceError:
        rep.skipped_dispersal += 1
        return
    rep.checked += 1
    rep.max_hji = max(rep.max_hji, chk.hji)
    if chk.gradient is not None:
        rep.max_gradient_error = max(rep.max_gradient_error, chk.gradient)
    if chk.identity is not None:
        rep.max_identity_residual = max(rep.max_identity_residual, chk.identity)


# ---------------------------------------------------------------------------
# canned regimes

def random_2v2_solo(rng: np.random.Generator) -> Tuple[GameState, SpeedTable]:
    """Two pursuers against two evaders, every evader's capture point above the border."""
    while True:
        ps = [(rng.uniform(-10, 10), rng.uniform(0, 6)) for _ in range(2)]
        es = [(rng.uniform(-10, 10), rng.uniform(6, 14)) for _ in range(2)]
        speeds = SpeedTable(rng.uniform(1.0, 1.3, 2), rng.uniform(0.4, 0.9, 2))
        st = GameState(ps, es)
        try:
            optimal_assignment(st, speeds)
        except NoFeasibleAssignmentError:
            continue
        return st, speeds


def random_2v1_simultaneous(rng: np.random.Generator) -> Tuple[GameState, SpeedTable]:
    """Two distinct-speed pursuers that capture one evader together above the border."""
    while True:
        e = (rng.uniform(-2, 2), rng.uniform(6, 12))
        ps = [(rng.uniform(-10, -1), rng.uniform(0, 8)), (rng.uniform(1, 10), rng.uniform(0, 8))]
        vp = rng.uniform(1.0, 1.5, 2)
        if abs(vp[0] - vp[1]) < 0.02:
            continue
        speeds = SpeedTable(vp, [rng.uniform(0.5, 0.95)])
        st = GameState(ps, [e])
        try:
            best = optimal_assignment(st, speeds)
        except NoFeasibleAssignmentError:
            continue
        if best.plans[0].mode == "simultaneous":
            return st, speeds


REGIMES = {"2v2-solo": random_2v2_solo, "2v1-simultaneous": random_2v1_simultaneous}


def verify_regimes(samples: int, seed: int, with_gradient: bool = True) -> Dict[str, VerificationReport]:
    """Split ``samples`` evenly over the canned regimes."""
    rng = np.random.default_rng(seed)
    out = {}
    per = [samples // len(REGIMES) + (k < samples % len(REGIMES)) for k in range(len(REGIMES))]
    for (name, gen), n in zip(REGIMES.items(), per):
        rep = VerificationReport()
        while rep.checked < n:
            st, sp = gen(rng)
            _tally(rep, st, sp, with_gradient)
        out[name] = rep
    return out


def merge(reports) -> VerificationReport:
    tot = VerificationReport()
    for r in reports:
        tot.samples += r.samples
        tot.checked += r.checked
        tot.skipped_dispersal += r.skipped_dispersal
        tot.skipped_mode_boundary += r.skipped_mode_boundary
        tot.max_hji = max(tot.max_hji, r.max_hji)
        tot.max_gradient_error = max(tot.max_gradient_error, r.max_gradient_error)
        tot.max_identity_residual = max(tot.max_identity_residual, r.max_identity_residual)
    return tot


def finite_or_none(v: float) -> Optional[float]:
    return v if math.isfinite(v) else None
