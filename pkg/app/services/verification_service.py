"""Property suite for gradients, objectives and rewards on small random policies."""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from app.autodiff import engine as ge
from app.autodiff import finite_diff_check
from app.config import AppSettings
from app.models import (
    EMPIRICAL_ALPHA_WINDOW,
    FORMAL_ALPHA_WINDOW,
    BetaDpoState,
    MlpDims,
    Node,
    ObjectiveConfig,
    ObjectiveKind,
    PolicyKind,
    PreferencePair,
    PropertyResult,
    RewardPack,
    TauMode,
    VerificationReport,
    WorldSpec,
    is_recording,
)
from app.ports import IPolicyModel
from app.services.objectives import (
    acpo_alpha,
    acpo_analytic_gradient,
    acpo_loss,
    beta_dpo_loss,
    build_objective,
    dpo_loss,
    dpo_shift_loss,
)
from app.services.policy_service import clone_as_reference, init_model, next_token_log_probs
from app.services.reward_service import RewardService, advantage_target, implicit_reward
from app.services.synthdata_service import gen_dataset


logger = logging.getLogger(__name__)

FAULT_UNDETACHED_ALPHA = "undetached-alpha"
FAULTS = (FAULT_UNDETACHED_ALPHA,)

TOY_VOCAB = 32
TOY_DIMS = MlpDims(embed_dim=4, window=2, hidden=6)
TOY_PAIRS = 4
TOY_DELTA = 0.01
PERTURBATION = 0.3
FUZZ_TRIPLES = 1000
ASYMMETRY_TOL = 1e-8
NORMALIZATION_TOL = 1e-9
DECOMPOSITION_TOL = 1e-10

# (r_w, tau, r_l) -> expected alpha_hat under the formal window
BOUNDARY_CASES = (
    ((1.0, 2.0, -2.0), 0.5),
    ((3.0, 2.0, -2.0), 0.0),
    ((-1.0, 2.0, -1.0), 1.0),
    ((0.0, 2.0, 1e-9), 0.0),
)


@dataclass
class ToyProblem:
    """A perturbed policy, its frozen starting point and a small batch."""
    model: IPolicyModel
    ref: IPolicyModel
    pairs: list[PreferencePair]

    @property
    def params(self) -> list[Node]:
        return list(self.model.parameters().values())


def toy_problem(seed: int, kind: PolicyKind = PolicyKind.MLP) -> ToyProblem:
    world = WorldSpec(vocab_size=TOY_VOCAB, prompt_len=3, resp_len=4, overlap=0.5, seed=seed)
    pairs = gen_dataset(world, TOY_PAIRS).pairs
    model = init_model(kind, TOY_VOCAB, seed, TOY_DIMS)
    ref = clone_as_reference(model)
    rng = np.random.default_rng([seed, 1])
    for node in model.parameters().values():
        node.value = node.value + rng.normal(0.0, PERTURBATION, size=node.shape)
    return ToyProblem(model=model, ref=ref, pairs=pairs)


def _vector_rel_error(a: np.ndarray, b: np.ndarray) -> float:
    scale = max(float(np.linalg.norm(a)), float(np.linalg.norm(b)), 1e-12)
    return float(np.linalg.norm(a - b)) / scale


def _flat_grads(params: list[Node]) -> np.ndarray:
    return np.concatenate(
        [(p.grad if p.grad is not None else np.zeros_like(p.value)).ravel() for p in params]
    )


class VerificationService:
    """
    Runs every property on a number of seeds and collects the outcomes.

    With fault="undetached-alpha" ACPO is built without its stop-gradient;
    the gradient properties must then fail.
    """

    def __init__(self, settings: AppSettings, fault: Optional[str] = None):
        if fault is not None and fault not in FAULTS:
            raise ValueError(f"Unknown fault '{fault}' (expected one of: {', '.join(FAULTS)})")
        self.settings = settings
        self.fault = fault

    def objective_config(self, kind: ObjectiveKind, **overrides) -> ObjectiveConfig:
        s = self.settings
        values = dict(
            kind=kind,
            beta=s.beta,
            delta=TOY_DELTA,
            epsilon=s.epsilon,
            alpha_lo=FORMAL_ALPHA_WINDOW[0],
            alpha_hi=FORMAL_ALPHA_WINDOW[1],
            simpo_beta=s.simpo_beta,
            gamma=s.simpo_gamma,
            shift_lambda=s.shift_lambda,
            shift_mode=s.shift_mode,
            beta_dpo_c=s.beta_dpo_c,
            beta_dpo_decay=s.beta_dpo_decay,
            detach_alpha=self.fault != FAULT_UNDETACHED_ALPHA,
        )
        values.update(overrides)
        return ObjectiveConfig(**values)

    def run(self, seeds: int) -> VerificationReport:
        report = VerificationReport()
        for seed in range(seeds):
            problem = toy_problem(seed)
            for kind in ObjectiveKind:
                report.results.append(self.check_gradients(problem, kind, seed))
            report.results.append(self.check_acpo_oracle(problem, seed))
            report.results.append(self.check_gradient_asymmetry(problem, seed))
            report.results.append(self.check_degeneration(problem, seed))
            report.results.append(self.check_normalization(seed))
            report.results.append(self.check_reward_decomposition(seed))
        report.results.append(self.check_alpha_boundaries())
        report.results.append(self.check_alpha_fuzz(seeds))
        report.results.append(self.check_alpha_monotonicity())
        report.results.append(self.check_boundedness(seeds))
        report.results.append(self.check_tau_linearity())

        for name, (worst, tol, ok) in report.summary().items():
            log = logger.info if ok else logger.error
            log(f"{name}: max err {worst:.3e} (tol {tol:.0e}) {'PASS' if ok else 'FAIL'}")
        return report

    def _loss_fn(self, problem: ToyProblem, config: ObjectiveConfig) -> Callable[[], Node]:
        """
        Loss closure for finite differencing.

        The analytic pass (graph recording) uses the objective as trained;
        perturbed evaluations hold alpha (ACPO) or beta_t (beta-DPO) at their
        base values, the constants the optimizer sees.
        """
        rewards = RewardService(config)

        def packs() -> list[RewardPack]:
            return rewards.build_packs(problem.model, problem.ref, problem.pairs)

        if config.kind == ObjectiveKind.ACPO:
            pinned = [a.alpha_hat for a in acpo_loss(packs(), config).alphas]
            return lambda: acpo_loss(packs(), config, None if is_recording() else pinned).loss

        if config.kind == ObjectiveKind.BETA_DPO:
            base = packs()
            margin = float(np.mean([(p.r_w.item() - p.r_l.item()) / config.beta for p in base]))
            state = BetaDpoState(margin_ema=margin - 1.0)
            beta_t = beta_dpo_loss(base, state, config).effective_beta
            return lambda: beta_dpo_loss(
                packs(), state, config, None if is_recording() else beta_t
            ).loss

        objective = build_objective(config)
        return lambda: objective.compute(packs()).loss

    def check_gradients(self, problem: ToyProblem, kind: ObjectiveKind, seed: int) -> PropertyResult:
        s = self.settings
        config = self.objective_config(kind)
        report = finite_diff_check(
            self._loss_fn(problem, config),
            problem.params,
            h=s.gradcheck_step,
            tol=s.gradcheck_tol,
            max_coords=s.gradcheck_coords,
            rng=np.random.default_rng(seed),
        )
        return PropertyResult(
            name=f"gradcheck[{kind.value}]",
            seed=seed,
            max_error=report.max_rel_error,
            tolerance=report.tolerance,
            passed=report.passed,
            detail=f"{report.coordinates_checked} coordinates",
        )

    def _oracle_error(self, problem: ToyProblem, config: ObjectiveConfig) -> float:
        packs = RewardService(config).build_packs(problem.model, problem.ref, problem.pairs)
        ge.backward(acpo_loss(packs, config).loss)
        autodiff = _flat_grads(problem.params)
        analytic = acpo_analytic_gradient(packs, config, problem.params)
        return _vector_rel_error(autodiff, analytic)

    def check_acpo_oracle(self, problem: ToyProblem, seed: int) -> PropertyResult:
        """
        Autodiff gradient of the ACPO loss against the hand-assembled one.

        The second configuration pins a static target so that the first pair's
        alpha sits strictly inside the clamp window.
        """
        config = self.objective_config(ObjectiveKind.ACPO)
        errors = [self._oracle_error(problem, config)]

        packs = RewardService(config).build_packs(problem.model, problem.ref, problem.pairs)
        r_w, r_l = packs[0].r_w.item(), packs[0].r_l.item()
        denom = (1.0 if r_l > 0 else -1.0) * max(abs(r_l), config.epsilon)
        interior = self.objective_config(
            ObjectiveKind.ACPO, tau_mode=TauMode.STATIC, static_margin=r_w - 0.5 * denom
        )
        errors.append(self._oracle_error(problem, interior))

        worst = max(errors)
        tol = self.settings.oracle_tol
        return PropertyResult(name="acpo-oracle", seed=seed, max_error=worst, tolerance=tol, passed=worst < tol)

    def check_gradient_asymmetry(self, problem: ToyProblem, seed: int) -> PropertyResult:
        """
        Loss-gradient magnitude through r_l over that through r_w equals
        alpha_hat * |grad r_l| / |grad r_w| for every pair.
        """
        config = self.objective_config(ObjectiveKind.ACPO)
        packs = RewardService(config).build_packs(problem.model, problem.ref, problem.pairs)
        breakdown = acpo_loss(packs, config)
        ge.backward(breakdown.loss)
        upstream = [(float(p.r_w.grad), float(p.r_l.grad)) for p in packs]

        worst = 0.0
        for pack, (g_w, g_l), record in zip(packs, upstream, breakdown.alphas):
            ge.backward(pack.r_w)
            norm_w = float(np.linalg.norm(_flat_grads(problem.params)))
            ge.backward(pack.r_l)
            norm_l = float(np.linalg.norm(_flat_grads(problem.params)))
            if norm_w == 0.0:
                continue
            if g_w == 0.0:
                worst = math.inf
                continue
            measured = (abs(g_l) * norm_l) / (abs(g_w) * norm_w)
            expected = record.alpha_hat * norm_l / norm_w
            worst = max(worst, abs(measured - expected) / max(abs(expected), 1.0))
        return PropertyResult(
            name="gradient-asymmetry", seed=seed, max_error=worst, tolerance=ASYMMETRY_TOL,
            passed=worst < ASYMMETRY_TOL,
        )

    def check_degeneration(self, problem: ToyProblem, seed: int) -> PropertyResult:
        """ACPO with alpha fixed at 1 and DPO-Shift with lambda = 1 equal DPO bitwise."""
        base = self.objective_config(ObjectiveKind.DPO)
        packs = RewardService(base).build_packs(problem.model, problem.ref, problem.pairs)
        dpo = dpo_loss(packs).loss.item()
        pinned_one = self.objective_config(ObjectiveKind.ACPO, alpha_lo=1.0, alpha_hi=1.0)
        acpo = acpo_loss(packs, pinned_one).loss.item()
        shift = dpo_shift_loss(packs, 1.0).loss.item()
        worst = max(abs(acpo - dpo), abs(shift - dpo))
        return PropertyResult(
            name="degeneration", seed=seed, max_error=worst, tolerance=0.0,
            passed=acpo == dpo and shift == dpo,
        )

    def check_normalization(self, seed: int) -> PropertyResult:
        worst = 0.0
        for kind in PolicyKind:
            problem = toy_problem(seed, kind)
            for pair in problem.pairs:
                for response in (pair.chosen, pair.rejected):
                    rows = next_token_log_probs(problem.model, pair.prompt, response)
                    worst = max(worst, float(np.max(np.abs(np.exp(rows).sum(axis=1) - 1.0))))
        return PropertyResult(
            name="normalization", seed=seed, max_error=worst, tolerance=NORMALIZATION_TOL,
            passed=worst < NORMALIZATION_TOL,
        )

    def check_reward_decomposition(self, seed: int) -> PropertyResult:
        """Bigram implicit reward is beta times the sum of per-token log-ratios."""
        problem = toy_problem(seed, PolicyKind.BIGRAM)
        beta = self.settings.beta
        worst = 0.0
        for pair in problem.pairs:
            for response in (pair.chosen, pair.rejected):
                reward = implicit_reward(problem.model, problem.ref, pair.prompt, response, beta).item()
                policy_rows = next_token_log_probs(problem.model, pair.prompt, response)
                ref_rows = next_token_log_probs(problem.ref, pair.prompt, response)
                steps = np.arange(len(response))
                tokens = np.array(response.tokens)
                token_sum = float(np.sum(policy_rows[steps, tokens] - ref_rows[steps, tokens]))
                worst = max(worst, abs(reward - beta * token_sum))
        return PropertyResult(
            name="reward-decomposition", seed=seed, max_error=worst, tolerance=DECOMPOSITION_TOL,
            passed=worst < DECOMPOSITION_TOL,
        )

    def check_alpha_boundaries(self) -> PropertyResult:
        config = self.objective_config(ObjectiveKind.ACPO)
        failures = []
        for (r_w, tau, r_l), expected in BOUNDARY_CASES:
            record = acpo_alpha(r_w, r_l, tau, config)
            if record.alpha_hat != expected:
                failures.append(f"({r_w}, {tau}, {r_l}) -> {record.alpha_hat}, expected {expected}")
        floored = acpo_alpha(0.0, 1e-9, 2.0, config).denom_floored
        if not floored:
            failures.append("denominator floor not reported")
        return PropertyResult(
            name="alpha-boundaries", seed=None, max_error=float(len(failures)), tolerance=0.0,
            passed=not failures, detail="; ".join(failures),
        )

    def check_alpha_fuzz(self, seeds: int) -> PropertyResult:
        rng = np.random.default_rng(seeds)
        worst = 0.0
        for lo, hi in (FORMAL_ALPHA_WINDOW, EMPIRICAL_ALPHA_WINDOW):
            config = self.objective_config(ObjectiveKind.ACPO, alpha_lo=lo, alpha_hi=hi)
            triples = rng.normal(0.0, 3.0, size=(FUZZ_TRIPLES, 3))
            triples[::7, 1] = 0.0
            triples[1::11, 1] = rng.uniform(-1e-7, 1e-7, size=len(triples[1::11]))
            for r_w, r_l, tau in triples:
                hat = acpo_alpha(float(r_w), float(r_l), abs(float(tau)), config).alpha_hat
                if not math.isfinite(hat):
                    worst = math.inf
                else:
                    worst = max(worst, lo - hat, hat - hi)
        return PropertyResult(
            name="alpha-fuzz", seed=seeds, max_error=max(worst, 0.0), tolerance=0.0,
            passed=worst <= 0.0,
        )

    def check_alpha_monotonicity(self) -> PropertyResult:
        """alpha_hat never increases with r_w for fixed r_l < 0 and tau."""
        config = self.objective_config(ObjectiveKind.ACPO)
        worst = 0.0
        for r_l in (-0.5, -2.0, -10.0):
            alphas = [acpo_alpha(float(r_w), r_l, 1.0, config).alpha_hat for r_w in np.linspace(-20, 20, 401)]
            worst = max(worst, float(np.max(np.diff(alphas))))
        return PropertyResult(
            name="alpha-monotonicity", seed=None, max_error=max(worst, 0.0), tolerance=0.0,
            passed=worst <= 0.0,
        )

    def check_boundedness(self, seeds: int) -> PropertyResult:
        """
        With r_l < 0 and the formal window, ACPO never pushes r_l harder than
        DPO whenever its margin is at least DPO's.
        """
        config = self.objective_config(ObjectiveKind.ACPO)
        rng = np.random.default_rng(seeds + 1)
        worst = 0.0
        for _ in range(FUZZ_TRIPLES // 10):
            r_w_value = float(rng.normal(0.0, 2.0))
            r_l_value = -float(rng.uniform(1e-3, 5.0))
            pressures = []
            margins = []
            for loss_fn in (lambda p: acpo_loss(p, config), dpo_loss):
                r_w, r_l = ge.parameter(r_w_value), ge.parameter(r_l_value)
                zero = ge.constant(0.0)
                pack = RewardPack(
                    r_w=r_w, r_l=r_l, logp_w=zero, logp_l=zero, logp_w_ref=0.0, logp_l_ref=0.0,
                    len_w=4, len_l=4, tau=advantage_target(4, 4, TOY_DELTA),
                )
                breakdown = loss_fn([pack])
                ge.backward(breakdown.loss)
                pressures.append(abs(float(r_l.grad)))
                margins.append(breakdown.margins[0])
            if margins[0] >= margins[1]:
                worst = max(worst, pressures[0] - pressures[1])
        return PropertyResult(
            name="boundedness", seed=seeds + 1, max_error=max(worst, 0.0), tolerance=0.0,
            passed=worst <= 0.0,
        )

    def check_tau_linearity(self) -> PropertyResult:
        failures = []
        if advantage_target(12, 8, 0.1) != 2.0:
            failures.append("tau(12, 8, 0.1) != 2.0")
        for len_w, len_l in ((1, 1), (3, 7), (10, 10), (12, 8)):
            if advantage_target(2 * len_w, 2 * len_l, 0.1) != 2.0 * advantage_target(len_w, len_l, 0.1):
                failures.append(f"doubling ({len_w}, {len_l})")
        return PropertyResult(
            name="tau-linearity", seed=None, max_error=float(len(failures)), tolerance=0.0,
            passed=not failures, detail="; ".join(failures),
        )
