class Rank2GeoError(Exception):
    """Base class for all package errors."""


class EmptyInput(Rank2GeoError, ValueError):
    pass


class NotSymmetric(Rank2GeoError, ValueError):
    pass


class UnsupportedSpace(Rank2GeoError, ValueError):
    pass


class NotApplicable(Rank2GeoError, ValueError):
    pass


class NotTangent(Rank2GeoError, ValueError):
    pass


class DegeneratePlane(Rank2GeoError, ValueError):
    pass


class NotAnLTS(Rank2GeoError, ValueError):
    pass


class NotAbelian(Rank2GeoError, ValueError):
    pass


class RecipeUnavailable(Rank2GeoError):
    pass


class OrbitNotFound(Rank2GeoError):
    pass


class UnsupportedAmbient(Rank2GeoError, ValueError):
    pass


class UnsupportedPair(Rank2GeoError, ValueError):
    pass


class SamplingFailed(Rank2GeoError):
    pass


class SearchUnsupported(Rank2GeoError, ValueError):
    pass
