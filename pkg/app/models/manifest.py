"""Run manifest domain model."""

from pydantic import BaseModel, Field


class RunManifest(BaseModel):
    """
    Provenance of one experiment directory.

    `config` is the fully resolved flat configuration (defaults, then config
    file, then flags), so passing the manifest back through --config
    reproduces the run.
    """

    command: str
    tool_version: str
    config: dict[str, str] = Field(default_factory=dict)
    dataset_manifest_sha256: str = ""
    outputs: dict[str, str] = Field(default_factory=dict)
