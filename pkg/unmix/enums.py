from enum import Enum

__all__ = (
    "ProblemKind",
    "ReturnIterate",
    "NoiseKind",
    "SolverName",
    "Preset",
)


class HiddenValueEnum(Enum):
    def __repr__(self) -> str:
        return f"<{type(self).__name__}.{self.name}>"


class StrEnum(str, Enum):
    def __str__(self) -> str:
        return self.value


class ProblemKind(HiddenValueEnum, StrEnum):
    CLS = "cls"
    CSR = "csr"
    CBP = "cbp"
    CBPDN = "cbpdn"

    @property
    def uses_split(self) -> bool:
        """Whether the problem is solved by the two-block (ball + prox) split."""
        return self in (ProblemKind.CBP, ProblemKind.CBPDN)


class ReturnIterate(HiddenValueEnum, StrEnum):
    X_ITERATE = "x"
    U_ITERATE = "u"


class NoiseKind(HiddenValueEnum, StrEnum):
    LOWPASS = "lowpass"
    WHITE = "white"


class SolverName(HiddenValueEnum, StrEnum):
    SUNSAL = "sunsal"
    CSUNSAL = "csunsal"
    NNLS = "nnls"
    FCLS = "fcls"


class Preset(HiddenValueEnum, StrEnum):
    TABLE1 = "table1"
    TABLE2_LIKE = "table2-like"
