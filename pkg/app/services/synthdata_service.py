"""Seeded synthetic preference pairs with controllable chosen/rejected overlap."""

import logging
import math
from typing import Optional

import numpy as np
from pydantic import ValidationError

from app.exceptions import InvalidWorldSpecError
from app.models import CorruptionMode, Dataset, PreferencePair, TokenSeq, WorldSpec


logger = logging.getLogger(__name__)

PLANTED_PROBABILITY = 0.9
MAX_ATTEMPTS = 1000


def make_world(**fields) -> WorldSpec:
    """
    Validate world parameters.

    Raises:
        InvalidWorldSpecError: If the world cannot produce valid pairs
    """
    try:
        return WorldSpec(**fields)
    except ValidationError as e:
        messages = "; ".join(err["msg"].removeprefix("Value error, ") for err in e.errors())
        raise InvalidWorldSpecError(messages) from e


def _streams(world: WorldSpec) -> tuple[np.random.Generator, np.random.Generator]:
    planted_seq, pair_seq = np.random.SeedSequence(world.seed).spawn(2)
    return np.random.default_rng(planted_seq), np.random.default_rng(pair_seq)


def planted_mapping(world: WorldSpec) -> np.ndarray:
    """Preferred next token for every token: a seeded permutation of the vocabulary."""
    planted_rng, _ = _streams(world)
    return planted_rng.permutation(world.vocab_size)


def planted_log_likelihood(
    mapping: np.ndarray,
    prompt: TokenSeq,
    response: TokenSeq,
) -> float:
    """
    log P(response | prompt) under the planted chain.

    Each token is the planted successor of the previous one with probability
    0.9, otherwise uniform over the vocabulary.
    """
    size = len(mapping)
    noise = (1.0 - PLANTED_PROBABILITY) / size
    total = 0.0
    previous = prompt.tokens[-1]
    for token in response.tokens:
        p = noise + (PLANTED_PROBABILITY if mapping[previous] == token else 0.0)
        total += math.log(p)
        previous = token
    return total


def _different_token(rng: np.random.Generator, avoid: int, size: int) -> int:
    draw = int(rng.integers(size - 1))
    return draw + 1 if draw >= avoid else draw


def _draw_pair(world: WorldSpec, mapping: np.ndarray, rng: np.random.Generator) -> PreferencePair:
    size = world.vocab_size
    prompt = [int(t) for t in rng.integers(size, size=world.prompt_len)]

    chosen = []
    previous = prompt[-1]
    for _ in range(world.resp_len):
        if rng.random() < PLANTED_PROBABILITY:
            token = int(mapping[previous])
        else:
            token = int(rng.integers(size))
        chosen.append(token)
        previous = token

    shared = world.shared_prefix_len
    rejected = list(chosen[:shared])
    for offset, token in enumerate(chosen[shared:]):
        replace = world.corruption == CorruptionMode.SUFFIX_REPLACE or offset % 2 == 0
        rejected.append(_different_token(rng, token, size) if replace else token)

    return PreferencePair(
        prompt=TokenSeq.of(prompt),
        chosen=TokenSeq.of(chosen),
        rejected=TokenSeq.of(rejected),
    )


def sample_pair(
    world: WorldSpec,
    rng: np.random.Generator,
    mapping: Optional[np.ndarray] = None,
) -> PreferencePair:
    """
    Draw one pair whose chosen response is strictly more likely under the
    planted distribution than its rejected response.

    Args:
        world: Validated world
        rng: Pair stream; advanced by the draw
        mapping: Planted successor table (derived from world.seed when omitted)

    Raises:
        InvalidWorldSpecError: If no valid pair is found within the attempt limit
    """
    if mapping is None:
        mapping = planted_mapping(world)
    for _ in range(MAX_ATTEMPTS):
        pair = _draw_pair(world, mapping, rng)
        if planted_log_likelihood(mapping, pair.prompt, pair.chosen) > planted_log_likelihood(
            mapping, pair.prompt, pair.rejected
        ):
            return pair
    raise InvalidWorldSpecError(
        f"No pair with a strictly preferred chosen response after {MAX_ATTEMPTS} attempts"
    )


def gen_dataset(world: WorldSpec, pairs: int) -> Dataset:
    """
    Generate `pairs` preference pairs sequentially from the world's seed.

    Raises:
        InvalidWorldSpecError: If pairs < 1 or the world is infeasible
    """
    if pairs < 1:
        raise InvalidWorldSpecError(f"Pair count must be at least 1, got {pairs}")
    mapping = planted_mapping(world)
    _, pair_rng = _streams(world)
    dataset = Dataset(world=world, pairs=[sample_pair(world, pair_rng, mapping) for _ in range(pairs)])
    logger.info(
        f"Generated {pairs} pairs (V={world.vocab_size}, L={world.resp_len}, "
        f"overlap={world.overlap}, corruption={world.corruption.value}, seed={world.seed})"
    )
    return dataset


def regenerate(dataset: Dataset) -> Dataset:
    """Rebuild a dataset from its own manifest."""
    return gen_dataset(dataset.world, len(dataset))
