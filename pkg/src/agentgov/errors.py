"""Exception hierarchy for the governance control plane.

Every operational failure raises a subclass of GovernanceError so callers
(API, CLI) can map failures to one error surface.
"""


class GovernanceError(Exception):
    """Base class for all control-plane errors."""


# -- registry ----------------------------------------------------------------

class MissingOwnerError(GovernanceError):
    """Identity spec lacks a designated human owner."""


class EmptyPurposeError(GovernanceError):
    """Identity spec lacks a business purpose."""


class ProvenanceGateFailedError(GovernanceError):
    """Model provenance deployment gate rejected the identity spec."""

    def __init__(self, reasons):
        self.reasons = list(reasons)
        super().__init__(f"deployment gate failed: {', '.join(self.reasons)}")


class DuplicateIdError(GovernanceError):
    """Identity id already present in the registry."""


class IllegalTransitionError(GovernanceError):
    """Requested lifecycle event is not legal from the current state."""


class UnknownIdentityError(GovernanceError):
    """Identity id not found in the registry."""


class NotOwnerError(GovernanceError):
    """Attesting party is not the identity's current owner."""


class NotActiveError(GovernanceError):
    """Operation requires the identity to be in the Active state."""


class StandingGrantWithoutWaiverError(GovernanceError):
    """Standing grant requested without an explicit waiver id."""


class AcceptanceTokenError(GovernanceError):
    """Ownership transfer lacks the new owner's acceptance token."""


# -- credential authority ----------------------------------------------------

class IdentityNotActiveError(GovernanceError):
    """Credential issuance requires an Active subject."""


class DecisionNotPermissiveError(GovernanceError):
    """Policy decision attached to the issuance request is not permissive."""


class ScopeExceedsPolicyError(GovernanceError):
    """Requested scope is not covered by grants plus the approved request."""


class ScopeWideningError(GovernanceError):
    """Delegated scope exceeds the delegator's effective scope."""


class NoLiveCredentialError(GovernanceError):
    """Delegator holds no live credential for the task."""


class EmptyManifestError(GovernanceError):
    """Tool manifest to measure is empty."""


class UnknownKeyError(GovernanceError):
    """No key material registered for the workload URI."""


# -- access governor ----------------------------------------------------------

class InsufficientHistoryError(GovernanceError):
    """Not enough history to build a behavioral baseline."""


class IdentityMismatchError(GovernanceError):
    """Baseline and request belong to different identities."""


class CheckerUnavailableError(GovernanceError):
    """Intent alignment checker could not produce a score."""


class UnknownEscalationError(GovernanceError):
    """Escalation id not present in the queue."""


# -- audit ledger --------------------------------------------------------------

class RangeOutOfBoundsError(GovernanceError):
    """Verification range exceeds ledger bounds."""


class ChainImportError(GovernanceError):
    """Imported ledger failed chain validation."""


# -- provenance ----------------------------------------------------------------

class MissingDigestError(GovernanceError):
    """AIBOM record lacks a parameter digest."""


class GpaiDocMissingError(GovernanceError):
    """GPAI model lacks compliance documentation reference."""


# -- regulatory ------------------------------------------------------------------

class MalformedDatasetError(GovernanceError):
    """Obligation matrix dataset failed validation."""


class ManagedWithoutApproachError(GovernanceError):
    """Conflict marked managed without a management approach."""


class EmptyJurisdictionsError(GovernanceError):
    """Deployment tiering requires a non-empty jurisdiction set."""


# -- risk catalog ------------------------------------------------------------------

class OutOfRangeError(GovernanceError):
    """Impact or likelihood factor outside the 1..3 range."""


class SeverityInconsistentError(GovernanceError):
    """Entry severity contradicts the assessment rubric."""


# -- threat overlay -------------------------------------------------------------

class MalformedFeedError(GovernanceError):
    """Threat indicator feed line failed to parse."""

    def __init__(self, line_number, message):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


# -- metrics / gateway -------------------------------------------------------------

class UnknownPhaseError(GovernanceError):
    """Phase gate number outside 1..4."""


class InvalidConfigError(GovernanceError):
    """Configuration failed validation."""


class BindFailureError(GovernanceError):
    """Service could not bind its listen address."""
