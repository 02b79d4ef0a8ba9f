from pydantic import BaseModel, ConfigDict, Field

from cv_repeater.models.common import AmplifierKind

MAX_ORDER = 8


class AmplifierSpec(BaseModel):
    """
    An amplifier family without a gain: the kind and truncation order that a
    sweep compares while the gain is tuned point by point.
    """

    model_config = ConfigDict(frozen=True)

    kind: AmplifierKind
    order: int = Field(..., ge=1, le=MAX_ORDER)

    @property
    def label(self) -> str:
        return f"{self.kind}-{self.order}"

    def with_gain(self, gain: float) -> "AmplifierModel":
        return AmplifierModel(kind=self.kind, order=self.order, gain=gain)


class AmplifierModel(AmplifierSpec):
    """
    A noiseless linear amplifier acting diagonally in the number basis,
    |n> -> t_n |n> for n <= order and |n> -> 0 above it.

    - `scissors`: `order` quantum scissors in parallel.
    - `optimal`: the ideal truncated amplifier |n> -> s_N g^n |n>.
    """

    gain: float = Field(..., ge=0, allow_inf_nan=False)
