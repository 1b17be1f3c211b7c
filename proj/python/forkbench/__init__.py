"""Fork-join scheduling, in-process message passing and parallel course kernels."""

from ._forkbench import (
    ContractError,
    ForkbenchError,
    ParseError,
    TimeoutError,
    amdahl_fraction,
    checksum_reals,
    claim_sequence,
    efficiency,
    life_run,
    life_step,
    locality,
    pi_rectangle,
    pi_simpson,
    place_pages,
    plan_static,
    prefix_sum,
    prime_count,
    random_grid,
    resolve_schedule,
    run_cli,
    running_average,
    schedule_access_trace,
    speedup,
    vector_sum,
)

__all__ = [
    "ContractError",
    "ForkbenchError",
    "ParseError",
    "TimeoutError",
    "amdahl_fraction",
    "checksum_reals",
    "claim_sequence",
    "efficiency",
    "life_run",
    "life_step",
    "locality",
    "pi_rectangle",
    "pi_simpson",
    "place_pages",
    "plan_static",
    "prefix_sum",
    "prime_count",
    "random_grid",
    "resolve_schedule",
    "run_cli",
    "running_average",
    "schedule_access_trace",
    "speedup",
    "vector_sum",
]
