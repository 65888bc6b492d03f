from typing import Final, Tuple

from . import __version__

PACKAGE_NAME: Final[str] = __package__
PACKAGE_VERSION: Final[str] = __version__
ENV_PREFIX: Final[str] = "UNMIX_"
JSON_SCHEMA_VERSION: Final[int] = 1
CSV_COLUMNS: Final[Tuple[str, ...]] = (
    "solver",
    "snr_db",
    "rsnr_db",
    "time_s",
    "lambda",
    "delta",
    "mu",
    "runs",
)
DATA_PACKAGE: Final[str] = f"{PACKAGE_NAME}.data"
BUNDLED_LIBRARY: Final[str] = "example_library.txt"
