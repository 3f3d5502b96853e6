"""Preference lab exceptions."""


class PreferenceLabError(Exception):
    """Base exception for the preference lab."""
    pass


class ShapeMismatchError(PreferenceLabError):
    """Operand shapes do not conform for a graph operation."""
    pass


class GatherIndexError(PreferenceLabError):
    """Gather index outside the operand's range."""
    pass


class NonScalarSeedError(PreferenceLabError):
    """Backward was invoked on a non-scalar node."""
    pass


class NonFiniteEvaluationError(PreferenceLabError):
    """A function evaluation produced NaN or infinity."""
    pass


class EmptySequenceError(PreferenceLabError):
    """A token sequence that must be non-empty is empty."""
    pass


class VocabMismatchError(PreferenceLabError):
    """Two policies or a policy and a sequence disagree on the vocabulary."""
    pass


class InvalidPolicyError(PreferenceLabError):
    """Invalid policy kind or dimensions."""
    pass


class FrozenModelError(PreferenceLabError):
    """Attempt to update a frozen reference policy."""
    pass


class CheckpointFormatError(PreferenceLabError):
    """Checkpoint file is malformed."""
    pass


class DatasetFormatError(PreferenceLabError):
    """Dataset file is malformed."""
    pass


class InvalidWorldSpecError(PreferenceLabError):
    """Synthetic world cannot produce valid preference pairs."""
    pass


class InvalidConfigurationError(PreferenceLabError):
    """Invalid objective or training configuration."""
    pass


class UnknownObjectiveError(InvalidConfigurationError):
    """Objective kind is not registered."""
    pass


class ReferenceDriftError(PreferenceLabError):
    """Reference log-probabilities changed during training."""
    pass


class NonFiniteLossError(PreferenceLabError):
    """Training loss became NaN or infinite."""

    def __init__(self, step: int, batch_id: str, value: float):
        self.step = step
        self.batch_id = batch_id
        self.value = value
        super().__init__(
            f"Non-finite loss {value} at step {step} (batch {batch_id})"
        )
