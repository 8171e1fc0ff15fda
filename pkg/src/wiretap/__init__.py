"""Rate-equivocation regions of discrete memoryless wiretap channels."""
from .chain import AuxiliaryChain, evaluate_objective
from .channel import (ChannelMatrix, WiretapChannel, bec, bsc, capacity, f_mu,
                      load_channel, make_standard, mutual_information)
from .classify import (ClassificationReport, classify, improving_prefix, is_dominantly_cyclic,
                       is_less_noisy, is_more_capable)
from .region import (RegionBoundary, RegionPoint, auxiliary_problem, construct_optimal_uv,
                     corner_CB_Cs, dominant_shortcut, secrecy_capacity, trace_more_capable,
                     trace_region)

__version__ = "0.1.0"
