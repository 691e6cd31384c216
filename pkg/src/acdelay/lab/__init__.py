"""Experiment harness, source-spec files, figure output and the CLI."""
from .harness import DelayStats, ExperimentConfig, run_exact_tail, run_monte_carlo
from .output import emit_figure, markov_check_command
from .rng import BitStream
from .specfile import SourceSpecError, parse_source_spec, parse_source_text
