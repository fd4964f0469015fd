from .experiment_validators import ExperimentValidators
from .fock_validators import FockValidators
from .nfl_validators import NflValidators

__all__ = ["ExperimentValidators", "FockValidators", "NflValidators"]
