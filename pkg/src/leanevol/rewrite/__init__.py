from .reorder import can_reorder, legal_orders, reorder_hypotheses
from .rules import (
    RewriteRule, RuleApplication, RuleId, Scope, all_rules, applicable, apply,
    catalog, get_rule, node_rules, register,
)
from .types import infer

__all__ = [
    "RewriteRule", "RuleApplication", "RuleId", "Scope", "all_rules", "applicable",
    "apply", "can_reorder", "catalog", "get_rule", "infer", "legal_orders",
    "node_rules", "register", "reorder_hypotheses",
]
