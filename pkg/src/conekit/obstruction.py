"""Exact-rational obstruction arithmetic for spherical space-form boundaries.

Everything here runs in `fractions.Fraction`; no floating point enters.
The pinned regression: an asymptotically locally Euclidean Ricci-flat
filling of the quaternion-group quotient sphere with Euler number 1 and
signature 0 violates the Hitchin inequality exactly (7/4 < 9/4), which is
the contradiction driving the four-dimensional rigidity argument.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

__all__ = [
    "SpaceFormGroup",
    "TopologicalData",
    "HitchinVerdict",
    "GROUPS",
    "eta_invariant",
    "hitchin_check",
    "betti_constraints",
]


@dataclass(frozen=True)
class SpaceFormGroup:
    """A finite group acting freely on the 3-sphere, with its boundary eta invariant.

    ``eta_magnitude`` is the absolute value of the eta invariant of the
    quotient's signature operator; the sign depends on the orientation, so
    callers pick it (the inequality below only uses |tau + eta| and holds
    for either choice when tau = 0).
    """

    id: str
    order: int
    eta_magnitude: Fraction


GROUPS = {
    "Q8": SpaceFormGroup("Q8", 8, Fraction(3, 4)),
    "BinaryIcosahedral": SpaceFormGroup("BinaryIcosahedral", 120,
                                        Fraction(361, 180)),
}


def eta_invariant(group_id: str) -> Fraction:
    """Tabulated |eta| of the quotient sphere for the signature operator."""
    try:
        return GROUPS[group_id].eta_magnitude
    except KeyError:
        raise KeyError(f"no eta table entry for group {group_id!r}") from None


@dataclass(frozen=True)
class TopologicalData:
    """Exact Euler number, signature, and optionally the Betti vector."""

    chi: Fraction
    tau: Fraction
    betti: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "chi", Fraction(self.chi))
        object.__setattr__(self, "tau", Fraction(self.tau))
        if self.betti is not None:
            b = tuple(int(x) for x in self.betti)
            if len(b) != 5:
                raise ValueError("betti vector must have entries b0..b4")
            alt = b[0] - b[1] + b[2] - b[3] + b[4]
            if Fraction(alt) != self.chi:
                raise ValueError(
                    f"chi = {self.chi} inconsistent with Betti alternating sum {alt}")
            object.__setattr__(self, "betti", b)


def betti_constraints(b) -> TopologicalData:
    """Topological data of an ALE Ricci-flat filling from its Betti numbers.

    The filling is connected and open with a rational homology sphere
    boundary, which forces b0 = 1, b1 = b2 = b4 = 0; only b3 >= 0 is free.
    Then chi = 1 - b3 and the signature vanishes with b2.
    """
    b = tuple(int(x) for x in b)
    if len(b) != 5:
        raise ValueError("betti vector must have entries b0..b4")
    if b[0] != 1 or b[1] != 0 or b[2] != 0 or b[4] != 0:
        raise ValueError(
            f"Betti pattern violated: need (1, 0, 0, b3, 0), got {b}")
    if b[3] < 0:
        raise ValueError("b3 must be nonnegative")
    return TopologicalData(chi=Fraction(1 - b[3]), tau=Fraction(0), betti=b)


@dataclass(frozen=True)
class HitchinVerdict:
    """Both sides of 2*(chi - 1/|G|) >= 3*|tau + eta|, exactly."""

    lhs: Fraction
    rhs: Fraction

    @property
    def consistent(self) -> bool:
        return self.lhs >= self.rhs

    def describe(self) -> str:
        rel = ">=" if self.consistent else "<"
        tail = "consistent" if self.consistent else "contradiction reproduced"
        return f"{self.lhs} {rel} {self.rhs}: {tail}"


def hitchin_check(data: TopologicalData, group: SpaceFormGroup,
                  eta_sign: int = 1) -> HitchinVerdict:
    """Evaluate the Hitchin inequality for an ALE Ricci-flat filling.

    Returns the exact values of ``2*(chi - 1/|G|)`` and
    ``3*|tau + sign*eta|``; an inconsistent verdict (lhs < rhs) means no
    such filling exists.
    """
    if eta_sign not in (1, -1):
        raise ValueError("eta_sign must be +1 or -1")
    lhs = 2 * (data.chi - Fraction(1, group.order))
    rhs = 3 * abs(data.tau + eta_sign * group.eta_magnitude)
    return HitchinVerdict(lhs=lhs, rhs=rhs)
