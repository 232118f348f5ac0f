from .client import (
    CallStats, Completion, EndpointError, HttpBackend, LlmEndpointConfig, MockBackend,
    RateLimiter, TransientError, call_llm,
)
from .prompts import (
    DEFAULT_DOMAINS, DifficultyStrategy, DomainList, get_strategy, load_template,
    render_difficulty_prompt, render_domain_prompt, render_judge_prompt,
    render_repair_prompt, strategies,
)
from .responses import ParseResult, Variant, fenced_blocks, filter_domain, parse_variants, render_variants

__all__ = [
    "CallStats", "Completion", "DEFAULT_DOMAINS", "DifficultyStrategy", "DomainList",
    "EndpointError", "HttpBackend", "LlmEndpointConfig", "MockBackend", "ParseResult",
    "RateLimiter", "TransientError", "Variant", "call_llm", "fenced_blocks",
    "filter_domain", "get_strategy", "load_template", "parse_variants",
    "render_difficulty_prompt", "render_domain_prompt", "render_judge_prompt",
    "render_repair_prompt", "render_variants", "strategies",
]
