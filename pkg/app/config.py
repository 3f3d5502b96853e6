"""Application configuration for the preference lab."""

from pydantic_settings import BaseSettings, SettingsConfigDict


class AppSettings(BaseSettings):
    """Application settings with environment variable support."""

    model_config = SettingsConfigDict(
        env_prefix="ACPO_LAB_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # Service settings
    service_name: str = "acpo-lab"
    environment: str = "local"  # local, ci, memory

    # Logging settings
    log_level: str = "INFO"
    log_format: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

    # Objective settings (shared across all DPO-based objectives)
    beta: float = 0.1
    delta: float = 0.1
    epsilon: float = 1e-5
    alpha_lo: float = 0.0
    alpha_hi: float = 1.0
    alpha_preset: str = "formal"  # formal [0, 1], empirical [0.3, 0.95]
    tau_mode: str = "pair"  # pair, batch, static
    static_margin: float = 0.1

    # Baseline-specific settings
    simpo_beta: float = 2.0
    simpo_gamma: float = 0.5
    shift_lambda: float = 0.95
    shift_mode: str = "multiplicative"  # multiplicative, additive
    beta_dpo_c: float = 0.1
    beta_dpo_decay: float = 0.9

    # Run selection
    objective: str = "acpo"
    objectives: str = "dpo,acpo"  # compare

    # Training settings
    learning_rate: float = 1e-3
    steps: int = 2000
    batch_size: int = 32
    seed: int = 1
    optimizer: str = "adam"  # adam, sgd
    deterministic: bool = True
    log_every: int = 100

    # Policy settings
    policy_kind: str = "mlp"  # bigram, mlp
    embed_dim: int = 16
    window: int = 8
    hidden: int = 32
    init_scale: float = 0.1

    # Synthetic data settings
    vocab_size: int = 32
    prompt_len: int = 4
    resp_len: int = 10
    overlap: float = 0.8
    corruption: str = "suffix-replace"  # suffix-replace, interleave
    pairs: int = 2000

    # Verification settings
    verify_seeds: int = 20
    gradcheck_step: float = 1e-4
    gradcheck_tol: float = 1e-4
    gradcheck_coords: int = 200
    oracle_tol: float = 1e-10
