"""Runtime configuration for the CLI and the HTTP service.

Config files are flat ``key = value`` lines ('#' starts a comment). The
COV19IR_ENDPOINT environment variable overrides the configured endpoint.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .corpus import ChunkPolicy
from .errors import ConfigError

SCORER_KINDS = ("lexical", "remote")

ENDPOINT_ENV_VAR = "COV19IR_ENDPOINT"


@dataclass(frozen=True)
class Config:
    index: str | None = None
    scorer: str = "lexical"
    endpoint: str | None = None
    top_k: int = 3
    pn_weight: float = 0.3
    cutoff: float = 0.75
    max_tokens: int = 128
    overlap_tokens: int = 32
    workers: int = 8
    timeout: float = 30.0
    retries: int = 2
    embeddings: str | None = None
    lexicon: str | None = None

    def chunk_policy(self) -> ChunkPolicy:
        return ChunkPolicy(self.max_tokens, self.overlap_tokens)

    def validate(self) -> "Config":
        if self.scorer not in SCORER_KINDS:
            raise ConfigError(f"scorer must be one of {SCORER_KINDS}, got {self.scorer!r}")
        if self.scorer == "remote" and not self.endpoint:
            raise ConfigError("remote scorer requires an endpoint")
        if self.top_k < 1:
            raise ConfigError(f"top_k must be >= 1, got {self.top_k}")
        if not 0.0 <= self.pn_weight <= 1.0:
            raise ConfigError(f"pn_weight must be in [0, 1], got {self.pn_weight}")
        if not 0.0 < self.cutoff <= 1.0:
            raise ConfigError(f"cutoff must be in (0, 1], got {self.cutoff}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if self.timeout <= 0:
            raise ConfigError(f"timeout must be positive, got {self.timeout}")
        if self.retries < 0:
            raise ConfigError(f"retries must be >= 0, got {self.retries}")
        try:
            self.chunk_policy()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return self


_FIELD_TYPES = {f.name: f.type for f in fields(Config)}
_INT_KEYS = {"top_k", "max_tokens", "overlap_tokens", "workers", "retries"}
_FLOAT_KEYS = {"pn_weight", "cutoff", "timeout"}


def load_config(path: str | Path) -> Config:
    """Parse a key = value config file into a validated Config."""
    values: dict[str, object] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip().lower()
        value = value.strip()
        if key not in _FIELD_TYPES:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        if not value:
            continue
        try:
            if key in _INT_KEYS:
                values[key] = int(value)
            elif key in _FLOAT_KEYS:
                values[key] = float(value)
            else:
                values[key] = value
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key!r}: {value!r}") from exc
    return apply_env(Config(**values)).validate()


def apply_env(config: Config) -> Config:
    endpoint = os.environ.get(ENDPOINT_ENV_VAR)
    if endpoint:
        return replace(config, endpoint=endpoint)
    return config
