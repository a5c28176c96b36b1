"""Cut times, normal exponential maps and backward spheres of submanifolds in Finsler manifolds."""

__version__ = "0.1.0"

from .errors import FinslerError  # noqa: E402
from .metric import MetricSpec, TangentVector, reverse_metric  # noqa: E402
from .submanifold import SubmanifoldSpec  # noqa: E402

__all__ = ["FinslerError", "MetricSpec", "SubmanifoldSpec", "TangentVector", "reverse_metric", "__version__"]
