"""Exception types shared across the package."""


class PlanningError(Exception):
    """Base class for all hrmplan errors."""


class InvalidArgumentError(PlanningError, ValueError):
    """An argument violates a documented precondition (non-finite, wrong shape, ...)."""


class GeometryDegenerateError(PlanningError):
    """A geometric quantity degenerated (e.g. vanishing gradient norm)."""


class ErosionDegenerateError(PlanningError):
    """A Minkowski difference produced an empty or invalid region.

    Raised when a robot part is too large for the arena it must stay inside.
    Carries the offending part and arena indices.
    """

    def __init__(self, part_index: int, arena_index: int, message: str = ""):
        self.part_index = part_index
        self.arena_index = arena_index
        detail = message or "arena erosion degenerate"
        super().__init__(f"{detail} (part {part_index}, arena {arena_index})")


class RankDeficiencyError(PlanningError):
    """Input points are affinely dependent (coplanar / collinear)."""


class InvalidConfigurationError(PlanningError):
    """A robot configuration violates joint limits or is in collision."""


class SceneValidationError(PlanningError, ValueError):
    """A scene file failed validation; message carries the field path."""
