from .circuit import (
    AnsatzSpec,
    GateParams,
    OptimizationResult,
    OptimizerConfig,
    ScheduleConfig,
    ScheduleResult,
    TargetInstance,
    TargetSpec,
    TrainRecord,
)
from .cost import CostSpec, TrainingSet
from .hilbert import (
    AnyOperator,
    DensityMatrix,
    HilbertSpec,
    Ket,
    Operator,
    ProductOperator,
)
from .nfl import GroupIntegralEstimate, PhaseSpaceMap, RiskEstimate
from .records import (
    ExperimentConfig,
    ExperimentRecord,
    LandscapeConfig,
    LandscapeScan,
    NflConfig,
    RecordHeader,
    VerifyConfig,
)

__all__ = [
    "AnsatzSpec",
    "AnyOperator",
    "CostSpec",
    "DensityMatrix",
    "ExperimentConfig",
    "ExperimentRecord",
    "GateParams",
    "HilbertSpec",
    "Ket",
    "LandscapeConfig",
    "LandscapeScan",
    "GroupIntegralEstimate",
    "NflConfig",
    "Operator",
    "OptimizationResult",
    "OptimizerConfig",
    "PhaseSpaceMap",
    "ProductOperator",
    "RecordHeader",
    "RiskEstimate",
    "ScheduleConfig",
    "ScheduleResult",
    "TargetInstance",
    "TargetSpec",
    "TrainRecord",
    "TrainingSet",
    "VerifyConfig",
]
