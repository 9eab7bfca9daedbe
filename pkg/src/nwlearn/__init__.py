"""Learning small circuits from distinguishers, circuit search and witnessing protocols."""

from .circuits import (
    BitFunction, Circuit, SampleList, TruthTable, gcsp, gcsp_decide, is_hard, realizable_tables,
    sample_hard_function,
)
from .designs import DesignMatrix, make_design
from .errors import (
    BudgetExceeded, NWLearnError, ParameterError, ProtocolError, StructuralError, VerificationError,
)
from .games import GameMatrix, MixedStrategy, dichotomy, find_anticheckers, k_uniform_sparsify, solve_game
from .generators import NWGenerator, SampleGenerator, SuccinctPRF
from .learning import (
    Predictor, bfkl_predictor, boost, distinguishing_advantage, instance_predict, natural_proof_learner,
)
from .stats import AdvantageReport
from .witnessing import (
    find_frequent_trace, reconstruct_predictor, run_protocol, speedup_transform, witnesses_from_learning,
)

__version__ = "0.1.0"

__all__ = [
    "AdvantageReport",
    "BitFunction",
    "BudgetExceeded",
    "Circuit",
    "DesignMatrix",
    "GameMatrix",
    "MixedStrategy",
    "NWGenerator",
    "NWLearnError",
    "ParameterError",
    "Predictor",
    "ProtocolError",
    "SampleGenerator",
    "SampleList",
    "StructuralError",
    "SuccinctPRF",
    "TruthTable",
    "VerificationError",
    "bfkl_predictor",
    "boost",
    "dichotomy",
    "distinguishing_advantage",
    "find_anticheckers",
    "find_frequent_trace",
    "gcsp",
    "gcsp_decide",
    "instance_predict",
    "is_hard",
    "k_uniform_sparsify",
    "make_design",
    "natural_proof_learner",
    "realizable_tables",
    "reconstruct_predictor",
    "run_protocol",
    "sample_hard_function",
    "solve_game",
    "speedup_transform",
    "witnesses_from_learning",
]
