"""Exception hierarchy shared by all shadowloc modules."""


class ShadowLocError(Exception):
    """Base class for every error raised by this package."""


class DegenerateCenters(ShadowLocError, ValueError):
    pass


class DuplicateId(ShadowLocError, ValueError):
    pass


class NonPositiveRadius(ShadowLocError, ValueError):
    pass


class CoincidentNodes(ShadowLocError, ValueError):
    pass


class UnknownId(ShadowLocError, KeyError):
    pass


class NotYetConstrained(ShadowLocError):
    pass


class CollinearAnchors(ShadowLocError, ValueError):
    pass


class InconsistentDistances(ShadowLocError, ValueError):
    pass


class NoSolution(ShadowLocError):
    pass


class NotAmbiguous(ShadowLocError):
    pass


class SeedDegenerate(ShadowLocError, ValueError):
    pass


class ConstructionStalled(ShadowLocError):
    pass


class KernelPlacementFailed(ShadowLocError):
    pass


class EmptyGraph(ShadowLocError, ValueError):
    pass


class SchemaViolation(ShadowLocError, ValueError):
    pass
