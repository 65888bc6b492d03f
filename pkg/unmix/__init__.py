r"""
```
 _   _ _ __  _ __ ___ (_)_  __
| | | | '_ \| '_ ` _ \| \ \/ /
| |_| | | | | | | | | | |>  <
 \__,_|_| |_|_| |_| |_|_/_/\_\

   Sparse Unmixing by ADMM
   ~~~~~~~~~~~~~~~~~~~~~~~
```
"""

__version__: str = "0.1.0"

from .api import prepare_workspace, solve, solve_pixels
from .enums import NoiseKind, Preset, ProblemKind, ReturnIterate, SolverName
from .errors import InvalidInputError, SolverError, UnmixError
from .models import SolveResult, SolverConfig, SpectralLibrary
from .problem import default_lambda
