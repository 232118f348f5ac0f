"""Pipeline configuration loaded from toml or json."""

from __future__ import annotations

import json
import os
import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

from ..engine import EngineConfig
from ..llm.client import LlmEndpointConfig
from ..llm.prompts import DEFAULT_DOMAINS
from ..verify.compiler import CompilerConfig

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

METHODS = ("domain", "difficulty", "ast")


@dataclass(frozen=True)
class PipelineConfig:
    input: str = "seeds.jsonl"
    input_format: str = "auto"
    output: str = "out"
    methods: tuple[str, ...] = METHODS
    engine: EngineConfig = field(default_factory=EngineConfig)
    evolution_llm: LlmEndpointConfig = field(default_factory=LlmEndpointConfig)
    judge_llm: LlmEndpointConfig = field(default_factory=lambda: LlmEndpointConfig(temperature=0.0))
    compiler: CompilerConfig = field(default_factory=CompilerConfig)
    domains: tuple[str, ...] = DEFAULT_DOMAINS
    domain_calls_per_seed: int = 1
    difficulty_calls_per_seed: int = 2
    skip_difficulty_judge_for: tuple[str, ...] = ()
    ast_on_seeds: bool = True
    emit_seeds: bool = False
    dedup: bool = True
    benchmarks: tuple[str, ...] = ()
    sample: Optional[int] = None
    jobs: int = field(default_factory=lambda: os.cpu_count() or 1)
    rng_seed: int = 0
    mock: bool = False
    resume: bool = True

    def __post_init__(self):
        methods = tuple(m.lower() for m in self.methods)
        bad = set(methods) - set(METHODS)
        if bad:
            raise ValueError(f"unknown methods {sorted(bad)}")
        if not methods:
            raise ValueError("at least one method must be enabled")
        object.__setattr__(self, "methods", methods)
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")
        if not 0 <= self.rng_seed < 2**64:
            raise ValueError("rng_seed must be an unsigned 64-bit integer")

    def to_dict(self) -> dict:
        return {
            "input": self.input, "input_format": self.input_format, "output": self.output,
            "methods": list(self.methods), "engine": self.engine.to_dict(),
            "domains": list(self.domains),
            "domain_calls_per_seed": self.domain_calls_per_seed,
            "difficulty_calls_per_seed": self.difficulty_calls_per_seed,
            "skip_difficulty_judge_for": list(self.skip_difficulty_judge_for),
            "ast_on_seeds": self.ast_on_seeds, "emit_seeds": self.emit_seeds,
            "dedup": self.dedup, "benchmarks": list(self.benchmarks), "sample": self.sample,
            "rng_seed": self.rng_seed, "mock": self.mock,
        }


_NESTED = {
    "engine": EngineConfig.from_dict,
    "evolution_llm": LlmEndpointConfig.from_dict,
    "judge_llm": LlmEndpointConfig.from_dict,
    "compiler": CompilerConfig.from_dict,
}
_TUPLES = {"methods", "domains", "benchmarks", "skip_difficulty_judge_for"}


def config_from_dict(d: dict, base_dir: Path | None = None) -> PipelineConfig:
    known = {f.name for f in fields(PipelineConfig)}
    unknown = set(d) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    kw = {}
    for k, v in d.items():
        if k in _NESTED:
            v = _NESTED[k](v)
        elif k in _TUPLES:
            v = tuple(v)
        kw[k] = v
    if base_dir is not None:
        for key in ("input", "output"):
            if key in kw and not Path(kw[key]).is_absolute():
                kw[key] = str(base_dir / kw[key])
        if "benchmarks" in kw:
            kw["benchmarks"] = tuple(p if Path(p).is_absolute() else str(base_dir / p) for p in kw["benchmarks"])
    return PipelineConfig(**kw)


def load_config(path) -> PipelineConfig:
    path = Path(path)
    raw = path.read_bytes()
    if path.suffix == ".json":
        data = json.loads(raw)
    else:
        data = tomllib.loads(raw.decode("utf-8"))
    return config_from_dict(data, path.parent)


def with_overrides(cfg: PipelineConfig, **kw) -> PipelineConfig:
    kw = {k: v for k, v in kw.items() if v is not None}
    if "mock" in kw and kw["mock"]:
        kw["compiler"] = replace(cfg.compiler, mock=True)
    return replace(cfg, **kw)
