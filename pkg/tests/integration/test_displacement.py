"""Long-run reproduction of chosen-likelihood displacement under DPO."""

from multiprocessing import Pool

import pytest

from app.models import ObjectiveConfig, ObjectiveKind, PolicyKind, TrainConfig
from app.services import ComparisonService, gen_dataset, init_model, make_world


pytestmark = [pytest.mark.integration, pytest.mark.slow]

SEEDS = (1, 2, 3)
EARLY_STEP = 50


def _outcome(seed: int) -> dict[str, float]:
    dataset = gen_dataset(make_world(vocab_size=32, resp_len=10, overlap=0.8, seed=seed), 2000)
    initial = init_model(PolicyKind.MLP, 32, seed)
    base = TrainConfig(objective=ObjectiveConfig(delta=0.1), steps=2000, batch_size=32, seed=seed)
    result = ComparisonService().compare(initial, dataset, [ObjectiveKind.DPO, ObjectiveKind.ACPO], base)

    dpo = result.runs[ObjectiveKind.DPO].table.rows
    acpo = result.runs[ObjectiveKind.ACPO].table.rows
    return {
        "dpo_logp_w_early": dpo[EARLY_STEP].mean_logp_w,
        "dpo_logp_w_final": dpo[-1].mean_logp_w,
        "acpo_r_w_early": acpo[EARLY_STEP].mean_r_w,
        "acpo_r_w_final": acpo[-1].mean_r_w,
        "dpo_margin": dpo[-1].mean_margin,
        "acpo_margin": acpo[-1].mean_margin,
        "dpo_delta_r_w": result.final(ObjectiveKind.DPO).delta_r_w,
        "acpo_delta_r_w": result.final(ObjectiveKind.ACPO).delta_r_w,
    }


CRITERIA = {
    "dpo_displaces": lambda o: o["dpo_logp_w_final"] < o["dpo_logp_w_early"],
    "acpo_anchored": lambda o: o["acpo_r_w_final"] >= o["acpo_r_w_early"] - 0.05,
    "acpo_keeps_chosen": lambda o: o["acpo_delta_r_w"] > o["dpo_delta_r_w"],
    "margins_comparable": lambda o: o["acpo_margin"] >= 0.85 * o["dpo_margin"],
}


@pytest.fixture(scope="module")
def outcomes() -> list[dict[str, float]]:
    """One DPO and one ACPO run per seed, seeds in parallel processes."""
    with Pool(len(SEEDS)) as pool:
        return pool.map(_outcome, SEEDS)


def _assert_majority(outcomes: list[dict[str, float]], criterion: str) -> None:
    holds = sum(CRITERIA[criterion](outcome) for outcome in outcomes)
    assert holds >= 2, f"{criterion} held on {holds} of {len(SEEDS)} seeds: {outcomes}"


@pytest.mark.parametrize("criterion", ["dpo_displaces", "acpo_anchored", "acpo_keeps_chosen"])
def test_displacement_reproduced(outcomes, criterion):
    _assert_majority(outcomes, criterion)


@pytest.mark.xfail(
    strict=False,
    reason=(
        "with the [0, 1] clamp alpha_hat reaches 0 once r_w passes tau, so r_l stops moving "
        "while the DPO margin keeps growing; recorded in DESIGN.md"
    ),
)
def test_margins_comparable(outcomes):
    _assert_majority(outcomes, "margins_comparable")
