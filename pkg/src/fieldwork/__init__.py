"""Work and internal-energy statistics for unitary quantum processes."""

from . import field, qsys, ramsey, workdist
from .errors import *  # noqa: F401,F403
from .qsys import (
    DensityMatrix,
    HermitianOperator,
    ProcessSpec,
    UnitaryOperator,
    expm_i,
    gibbs,
)

__version__ = "0.1.0"
