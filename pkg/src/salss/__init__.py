"""Stochastic automata simulation with lightweight scheduler sampling.

Quick tour::

    from salss import builtin, SchedulerClass, EstimationParams, lss_experiment
    res = lss_experiment(builtin("M1"), "win", SchedulerClass.parse("ml:e"), 2, 1000,
                         EstimationParams(epsilon=0.05))
"""
from .backend import NAME as BACKEND
from .builtins import NAMES as BUILTIN_NAMES, builtin
from .errors import (ContractViolation, InvalidModel, ModelError, NotFound, ParseError, SaError,
                     Timelock, TruncationError)
from .lss import LssScheduler, decide, sample_ids
from .model import Constant, Edge, Exponential, SaModel, Uniform, build, load, loads, save, validate
from .observe import ALL_CLASSES, SchedulerClass, discretise, expiration_order, project
from .oracle import mc_reference, named_strategy, reference_table
from .smc import EstimationParams, ExperimentResult, estimate, lss_experiment, okamoto_runs

__version__ = "0.1.0"
