"""Exact arithmetic-coding delay laboratory."""
from .exact import (
    DyadicInterval,
    RationalInterval,
    binary_expansion,
    midpoint,
    minimal_covering_dyadic,
    ones_count_to_resolution,
)
from .source import (
    MarkovSource,
    MemorylessSource,
    check_bounded_delay_condition,
    conditional_prob,
    expand_order,
    gamma,
    make_memoryless,
    sample_sequence,
    stationary_distribution,
    xi,
)
from .coder import Decoder, Encoder, decode, encode, pipeline_decoded_count, source_interval
from .adjacency import (
    adjacent_delta_set,
    delay_of_extension,
    lemma1_bound,
    left_adjacent,
    right_adjacent,
    s0_blocking_point,
)
from .bounds import (
    d0_of,
    d1_bound,
    d1_of,
    d2_bound,
    d3_bound,
    gallager_bound,
    memory_delay_bound,
    modified_gallager,
    scan_curves,
    tail_bound,
)

__version__ = "0.1.0"
