"""Desk-scale simulators of the achievability constructions."""
from .balance import BalanceCheck, balance_statistic, run_balance_check
from .binning import BinningScheme, SimulationReport, exact_binning_leakage, run_binning
from .linear_code import LinearCodeScheme, exact_secrecy, hamming_code, run_example1
from .sampling import SourceBlock, sample_block

__all__ = [
    "BalanceCheck", "BinningScheme", "LinearCodeScheme", "SimulationReport", "SourceBlock",
    "balance_statistic", "exact_binning_leakage", "exact_secrecy", "hamming_code",
    "run_balance_check", "run_binning", "run_example1", "sample_block",
]
