from typing import Tuple

from pytest import fixture

from unmix.models import SpectralLibrary
from unmix.types import Vector

from . import utils


@fixture
def library() -> SpectralLibrary:
    return utils.build_library()


@fixture
def feasible_problem() -> Tuple[SpectralLibrary, Vector, Vector]:
    return utils.build_feasible_problem()
