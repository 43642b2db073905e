"""Window mean-payoff objectives on Markov decision processes.

Exact solvers for sure, almost-sure and combined sure/almost-sure and
sure/limit-sure satisfaction, witness strategy synthesis, and an
independent product-game oracle.
"""

from .mdp import Edge, Mdp, MdpError, Owner, validate
from .io import format_mdp, parse_mdp, read_mdp
from .sure import (bwmp_window_bound, sure_bwmp, sure_dir_bwmp, sure_dir_fwmp,
                   sure_fwmp, sure_good_win)
from .probabilistic import almost_sure_buchi, almost_sure_bwmp, almost_sure_fwmp
from .combined import (build_gadget, is_good_edge, sas_bwmp, sas_fwmp, sls_bwmp,
                       sls_fwmp, sure_dirbwmp_as_buchi, sure_dirbwmp_pos_reach,
                       sure_dirfwmp_as_buchi, sure_dirfwmp_pos_reach)
from .strategy import (MealyStrategy, compute_N, streak_recurrence, synth_sas,
                       synth_sas_bwmp, synth_sdab, synth_sdpr, synth_sls,
                       synth_sure_fwmp)

__all__ = [
    "Edge", "Mdp", "MdpError", "Owner", "validate",
    "format_mdp", "parse_mdp", "read_mdp",
    "bwmp_window_bound", "sure_bwmp", "sure_dir_bwmp", "sure_dir_fwmp", "sure_fwmp",
    "sure_good_win", "almost_sure_buchi", "almost_sure_bwmp", "almost_sure_fwmp",
    "build_gadget", "is_good_edge", "sas_bwmp", "sas_fwmp", "sls_bwmp", "sls_fwmp",
    "sure_dirbwmp_as_buchi", "sure_dirbwmp_pos_reach", "sure_dirfwmp_as_buchi",
    "sure_dirfwmp_pos_reach", "MealyStrategy", "compute_N", "streak_recurrence",
    "synth_sas", "synth_sas_bwmp", "synth_sdab", "synth_sdpr", "synth_sls",
    "synth_sure_fwmp",
]
