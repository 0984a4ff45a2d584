"""Decision records and the fixed certificate vocabulary."""

from __future__ import annotations

from dataclasses import dataclass, field

YES = "yes"
NO = "no"
UNDECIDED = "undecided"

# Certificate names for refusals.  Each NO decision carries exactly one of
# these together with evidence naming concrete family members.
NOT_VANDERGRAFT_IN_A1 = "NotVandergraftInA1"
ORIENTATION_CONFLICT = "OrientationConflict"
TOO_MANY_NONDIAG_LINES = "TooManyNondiagLines"
SEPARATION_FAILS = "SeparationFails"
BIG_CONE_IMPROPER = "BigConeImproper"
BIG_CONE_HITS_NON_DOMINANT = "BigConeHitsNonDominant"
BIG_CONE_EDGE_COLLISION = "BigConeEdgeCollision"
NEG_DET_TRACE_ZERO_CONFLICT = "NegDetTraceZeroConflict"
TWO_LINE_CONDITION_FAILS = "TwoLineConditionFails"
NONDIAG_WITH_NEG_DET = "NondiagWithNegativeDeterminant"
DOMINANT_NONNEGATIVITY_FAILS = "DominantNonnegativityFails"
NON_VANDERGRAFT_PRODUCT = "NonVandergraftProduct"
HYPOTHESES_NOT_MET = "HypothesesNotMet"


@dataclass(frozen=True)
class Decision:
    """Outcome of a family decision.

    `witness` is present exactly when answer == "yes"; the certificate is a
    JSON-ready dict (per-member invariance checks for YES, a named failed
    condition plus evidence for NO, a named missing hypothesis for
    UNDECIDED).
    """

    answer: str
    witness: object | None
    certificate: dict = field(default_factory=dict)
    route: str = "2x2"

    def __post_init__(self):
        if self.answer not in (YES, NO, UNDECIDED):
            raise ValueError(f"bad answer {self.answer!r}")
        if (self.witness is not None) != (self.answer == YES):
            raise ValueError("witness must be present exactly for YES decisions")
