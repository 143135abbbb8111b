"""Runtime configuration for the service and CLI.

Defaults follow the engine's fixed parameters: batches of 8 cards, 2 per
strategy, a 180-day recency window, and 100-paper relevance pools. A JSON
config file may override any field; the AUTHORSCOUT_CONFIG environment
variable points at the file when --config is not given.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields

from .scorer import ScorerConfig
from .session import EngineConfig

CONFIG_ENV_VAR = "AUTHORSCOUT_CONFIG"


@dataclass
class ApiConfig:
    corpus_path: str = ""
    port: int = 8000
    host: str = "127.0.0.1"
    now_override: int | None = None
    seed: int = 0
    batch_size: int = 8
    per_strategy: int = 2
    recency_window_days: int = 180
    pool_size: int = 100
    retrain_per_event: bool = True
    snapshot_dir: str | None = None
    trace_path: str | None = None
    scorer: ScorerConfig = field(default_factory=ScorerConfig)

    def engine_config(self) -> EngineConfig:
        return EngineConfig(
            seed=self.seed,
            now=self.now_override,
            batch_size=self.batch_size,
            per_strategy=self.per_strategy,
            recency_window_days=self.recency_window_days,
            pool_size=self.pool_size,
            retrain_per_event=self.retrain_per_event,
            scorer=self.scorer,
        )


def load_config(path=None) -> ApiConfig:
    """Load config from an explicit path, the env var, or defaults."""
    path = path or os.environ.get(CONFIG_ENV_VAR)
    cfg = ApiConfig()
    if not path:
        return cfg
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    scorer_doc = doc.pop("scorer", None)
    known = {f.name for f in fields(ApiConfig)}
    for key, value in doc.items():
        if key not in known:
            raise ValueError(f"unknown config key {key!r}")
        setattr(cfg, key, value)
    if scorer_doc:
        cfg.scorer = ScorerConfig(**scorer_doc)
    return cfg
