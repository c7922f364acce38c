"""
Driving fields and instantaneous Hamiltonian evaluation
"""
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, Field, model_validator

from .core import TWO_PI, CanonicalState
from ..errors import DomainError, PeriodError

Vector3 = Tuple[float, float, float]


@dataclass(frozen=True)
class RotatingFieldParams:
    """B_R(t) = -2 (B0 cos(ωt+φ), B0 sin(ωt+φ), B3)"""

    b0: float
    b3: float
    omega: float
    phi: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(x) for x in (self.b0, self.b3, self.omega, self.phi)):
            raise DomainError("field parameters must be finite")
        if self.omega <= 0:
            raise DomainError("omega must be positive")
        if self.b0 < 0:
            raise DomainError("b0 must be non-negative")

    @property
    def detuning(self) -> float:
        """Ω = B3 - ω/2"""
        return self.b3 - 0.5 * self.omega

    @property
    def magnitude(self) -> float:
        """B = 2 sqrt(B0² + Ω²)"""
        return 2.0 * math.hypot(self.b0, self.detuning)

    @property
    def period(self) -> float:
        return TWO_PI / self.omega


@dataclass(frozen=True)
class NonrotatingFieldParams:
    """B_NR(t) = -2 (B0, 0, B3 cos ωt)"""

    b0: float
    b3: float
    omega: float

    def __post_init__(self):
        if not all(math.isfinite(x) for x in (self.b0, self.b3, self.omega)):
            raise DomainError("field parameters must be finite")
        if self.omega <= 0:
            raise DomainError("omega must be positive")

    @property
    def period(self) -> float:
        return TWO_PI / self.omega


class FieldVariant(str, Enum):
    ROTATING = "rotating"
    NONROTATING = "nonrotating"
    CONSTANT = "constant"
    MEAN_OF_NR = "mean_of_nr"


@dataclass(frozen=True)
class FieldSpec:
    variant: FieldVariant
    params: Optional[Union[RotatingFieldParams, NonrotatingFieldParams]] = None
    vector: Optional[Vector3] = None

    def __post_init__(self):
        variant = FieldVariant(self.variant)
        object.__setattr__(self, "variant", variant)
        if variant is FieldVariant.ROTATING and not isinstance(self.params, RotatingFieldParams):
            raise DomainError("rotating field needs RotatingFieldParams")
        if variant in (FieldVariant.NONROTATING, FieldVariant.MEAN_OF_NR) and not isinstance(
            self.params, NonrotatingFieldParams
        ):
            raise DomainError(f"{variant.value} field needs NonrotatingFieldParams")
        if variant is FieldVariant.CONSTANT:
            if self.vector is None or len(self.vector) != 3:
                raise DomainError("constant field needs a 3-vector")
            vec = tuple(float(x) for x in self.vector)
            if not all(math.isfinite(x) for x in vec):
                raise DomainError("constant field must be finite")
            object.__setattr__(self, "vector", vec)

    @classmethod
    def rotating(cls, b0: float, b3: float, omega: float, phi: float = 0.0) -> "FieldSpec":
        return cls(FieldVariant.ROTATING, RotatingFieldParams(b0, b3, omega, phi))

    @classmethod
    def nonrotating(cls, b0: float, b3: float, omega: float) -> "FieldSpec":
        return cls(FieldVariant.NONROTATING, NonrotatingFieldParams(b0, b3, omega))

    @classmethod
    def constant(cls, vector: Vector3) -> "FieldSpec":
        return cls(FieldVariant.CONSTANT, vector=tuple(vector))

    @classmethod
    def mean_of_nr(cls, b0: float, b3: float, omega: float) -> "FieldSpec":
        return cls(FieldVariant.MEAN_OF_NR, NonrotatingFieldParams(b0, b3, omega))

    @property
    def is_periodic(self) -> bool:
        return self.variant in (FieldVariant.ROTATING, FieldVariant.NONROTATING)

    def to_dict(self) -> dict:
        return FieldSpecModel.from_spec(self).model_dump(exclude_none=True)

    @classmethod
    def from_dict(cls, data: dict) -> "FieldSpec":
        return FieldSpecModel.model_validate(data).to_spec()


class FieldSpecModel(BaseModel):
    """JSON form of a FieldSpec"""

    variant: Literal["rotating", "nonrotating", "constant", "mean_of_nr"]
    b0: Optional[float] = Field(default=None, description="Transverse amplitude B0")
    b3: Optional[float] = Field(default=None, description="Longitudinal amplitude B3")
    omega: Optional[float] = Field(default=None, gt=0, description="Drive frequency ω")
    phi: Optional[float] = Field(default=None, description="Rotating-field phase φ")
    vector: Optional[List[float]] = Field(default=None, min_length=3, max_length=3)

    @model_validator(mode="after")
    def _check_variant_fields(self):
        if self.variant == "constant":
            if self.vector is None:
                raise ValueError("constant field needs 'vector'")
        elif self.omega is None:
            raise ValueError(f"{self.variant} field needs 'omega'")
        return self

    def to_spec(self) -> FieldSpec:
        b0 = self.b0 or 0.0
        b3 = self.b3 or 0.0
        if self.variant == "rotating":
            return FieldSpec.rotating(b0, b3, self.omega, self.phi or 0.0)
        if self.variant == "nonrotating":
            return FieldSpec.nonrotating(b0, b3, self.omega)
        if self.variant == "mean_of_nr":
            return FieldSpec.mean_of_nr(b0, b3, self.omega)
        return FieldSpec.constant(tuple(self.vector))

    @classmethod
    def from_spec(cls, spec: FieldSpec) -> "FieldSpecModel":
        if spec.variant is FieldVariant.CONSTANT:
            return cls(variant="constant", vector=list(spec.vector))
        p = spec.params
        phi = p.phi if isinstance(p, RotatingFieldParams) else None
        return cls(variant=spec.variant.value, b0=p.b0, b3=p.b3, omega=p.omega, phi=phi)


def field_function(spec: FieldSpec) -> Callable[[float], Vector3]:
    """Return a fast closure t -> (B1, B2, B3); time is reduced mod T before trigonometry"""
    variant = spec.variant
    if variant is FieldVariant.CONSTANT:
        vec = spec.vector
        return lambda t: vec
    p = spec.params
    if variant is FieldVariant.MEAN_OF_NR:
        vec = (-2.0 * p.b0, 0.0, 0.0)
        return lambda t: vec

    omega = p.omega
    T = p.period
    if variant is FieldVariant.ROTATING:
        a, c, phi = -2.0 * p.b0, -2.0 * p.b3, p.phi

        def rotating(t: float) -> Vector3:
            arg = omega * math.fmod(t, T) + phi
            return (a * math.cos(arg), a * math.sin(arg), c)

        return rotating

    a, c = -2.0 * p.b0, -2.0 * p.b3

    def nonrotating(t: float) -> Vector3:
        return (a, 0.0, c * math.cos(omega * math.fmod(t, T)))

    return nonrotating


def field_at(spec: FieldSpec, t: float) -> Vector3:
    if not math.isfinite(t):
        raise DomainError("time must be finite")
    return field_function(spec)(t)


def hamiltonian_value(spec: FieldSpec, state: CanonicalState, t: float) -> float:
    """H = -B(t).S = -[B1 cos p + B2 sin p] sqrt(1-q²) + B3 q"""
    b1, b2, b3 = field_at(spec, t)
    r = math.sqrt(max(0.0, 1.0 - state.q * state.q))
    return -(b1 * math.cos(state.p) + b2 * math.sin(state.p)) * r + b3 * state.q


def energy(field: Vector3, S) -> float:
    """-B.S for a field triple and anything indexable as (s1, s2, s3)"""
    return -(field[0] * S[0] + field[1] * S[1] + field[2] * S[2])


def period(spec: FieldSpec) -> float:
    if not spec.is_periodic:
        raise PeriodError(f"{spec.variant.value} field has no period")
    return spec.params.period


def drive_frequency(spec: FieldSpec) -> float:
    if not spec.is_periodic:
        raise PeriodError(f"{spec.variant.value} field has no drive frequency")
    return spec.params.omega
