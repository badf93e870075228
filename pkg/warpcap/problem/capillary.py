from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Union

import numpy as np

from warpcap.cli.expression import Expression, parse_expression, symbolic_s_derivative
from warpcap.errors import InvalidInput

ExpressionLike = Union[Expression, str, float, int]


def _expression(value: ExpressionLike) -> Expression:
    if isinstance(value, Expression):
        return value
    if isinstance(value, str):
        return parse_expression(value)
    return Expression.constant(float(value))


@dataclass(frozen=True, eq=False)
class CapillaryProblem:
    """
    Data of the capillary problem nH = Ψ(x, u) in Ω, ⟨N, ν⟩ = Φ(x, u) on Γ.

    The s-derivatives default to the symbolic derivative of the data. The
    constants are optional declarations; validation cross-checks them against
    samples and keeps the safer value.
    """

    psi: Expression
    phi: Expression
    dpsi_ds: Optional[Expression] = None
    dphi_ds: Optional[Expression] = None
    beta: Optional[float] = None
    mu: Optional[float] = None
    beta_prime: Optional[float] = None
    C_psi: Optional[float] = None
    C_phi: Optional[float] = None
    name: str = field(default="custom", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "psi", _expression(self.psi))
        object.__setattr__(self, "phi", _expression(self.phi))
        for attr, source in (("dpsi_ds", self.psi), ("dphi_ds", self.phi)):
            value = getattr(self, attr)
            object.__setattr__(
                self,
                attr,
                symbolic_s_derivative(source) if value is None else _expression(value),
            )
        for attr in ("beta", "beta_prime", "C_psi", "C_phi"):
            value = getattr(self, attr)
            if value is not None and not value > 0:
                raise InvalidInput(f"declared {attr} must be positive, got {value}")

    @classmethod
    def from_strings(
        cls,
        psi: str,
        phi: str = "0",
        dpsi_ds: str = None,
        dphi_ds: str = None,
        **constants,
    ) -> "CapillaryProblem":
        return cls(
            parse_expression(psi),
            parse_expression(phi),
            None if dpsi_ds is None else parse_expression(dpsi_ds),
            None if dphi_ds is None else parse_expression(dphi_ds),
            **constants,
        )

    @property
    def phi_depends_on_s(self) -> bool:
        return self.phi.depends_on("s")

    def with_phi(self, phi: ExpressionLike) -> "CapillaryProblem":
        """Same Ψ and declarations with another angle datum."""
        return CapillaryProblem(
            self.psi,
            _expression(phi),
            dpsi_ds=self.dpsi_ds,
            beta=self.beta,
            mu=self.mu,
            C_psi=self.C_psi,
            name=self.name,
        )

    def psi_at(self, x, s) -> np.ndarray:
        return self.psi.evaluate(x, s)

    def dpsi_at(self, x, s) -> np.ndarray:
        return self.dpsi_ds.evaluate(x, s)

    def phi_at(self, x, s) -> np.ndarray:
        return self.phi.evaluate(x, s)

    def dphi_at(self, x, s) -> np.ndarray:
        return self.dphi_ds.evaluate(x, s)


def gravity(c: float = 1.0, kappa: float = 1.0, phi: float = 0.0) -> CapillaryProblem:
    """Ψ = c + κ s with a constant contact angle."""
    return CapillaryProblem(
        parse_expression(f"{float(c)!r} + {float(kappa)!r}*s"),
        Expression.constant(phi),
        name="gravity",
    )


def tilted(c: float = 1.0, a: float = 0.1, kappa: float = 1.0, phi: float = 0.0) -> CapillaryProblem:
    """Ψ = c + a x1 + κ s with a constant contact angle."""
    return CapillaryProblem(
        parse_expression(f"{float(c)!r} + {float(a)!r}*x1 + {float(kappa)!r}*s"),
        Expression.constant(phi),
        name="tilted",
    )


BUILTIN_FAMILIES: Dict[str, Callable[..., CapillaryProblem]] = {
    "gravity": gravity,
    "tilted": tilted,
}
