from ncdp.analytic.throughput import (
    expected_replicas,
    full_rank_bruteforce,
    prob_active_le_S,
    prob_full_rank,
    slotted_aloha_throughput,
    sparsity_threshold,
    throughput_analytic,
    throughput_limit,
)

__all__ = [
    "expected_replicas", "full_rank_bruteforce", "prob_active_le_S",
    "prob_full_rank", "slotted_aloha_throughput", "sparsity_threshold",
    "throughput_analytic", "throughput_limit",
]
