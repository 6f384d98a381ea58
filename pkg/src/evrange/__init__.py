"""Route-aware BEV velocity, power, energy and state-of-charge forecasting."""

from .config import PipelineConfig, load_config
from .pipeline import EstimateResult, export_result, load_weights_bundle, run_pipeline

__version__ = "0.1.0"

__all__ = [
    "PipelineConfig",
    "load_config",
    "EstimateResult",
    "export_result",
    "load_weights_bundle",
    "run_pipeline",
    "__version__",
]
