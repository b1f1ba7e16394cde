"""Controllability of networked control loops over slotted ALOHA."""

from ._ccnet import (
    __version__,
    ChannelParams,
    NetworkModel,
    QuadratureSpec,
    binomial_tail,
    cond_success_prob_block,
    cond_success_prob_classical,
    default_channel,
    estimate_block_controllability,
    inverse_tail_threshold,
    meta_distribution_rested,
    minimal_poly_degree,
    moment_zeta,
    parse_config,
    prob_block_controllable_rested,
    prob_block_controllable_restless,
    regret_envelope,
    regret_envelope_explicit,
    run_ccdf_demoivre,
    run_ts,
    sample_ppp,
    selftest,
    to_config_text,
)

__all__ = [name for name in dir() if not name.startswith("_")]
