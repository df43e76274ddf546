"""Bayesian optimisation with unknown kernel lengthscale and RKHS norm.

Regret balancing over a growing set of (lengthscale, norm) candidates, plus
the usual comparison methods and a small experiment harness.
"""
from .errors import (ConfigError, DataFormatError, ExhaustedDomainError, InputError,
                     InvariantViolation, NumericalError, UnsupportedParameterError)
from .kernels import KernelSpec
from .bounds import BoundConfig
from .candidates import CandidateSchedule, GrowthFn
from .acquisition import Box, Discrete
from .gp import ObservationLog
from .loop import BOLoop, initial_design
from .balancer import Balancer
from .baselines import AGPUCBPolicy, MLEPolicy, OraclePolicy, estimate_theta_star

__version__ = "0.1.0"
