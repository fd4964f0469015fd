from .costs import CostEvaluator
from .trainer import CompileTrainer

__all__ = ["CompileTrainer", "CostEvaluator"]
