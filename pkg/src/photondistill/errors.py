"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Matrix or mode-count dimensions are inconsistent with the operation."""


class PhotonConservationError(ValueError):
    """Input and output occupation vectors carry different photon numbers."""


class UnitarityError(ValueError):
    """A matrix required to be unitary fails the tolerance check."""


class LayoutError(ValueError):
    """A circuit layer uses the same mode twice or an element is malformed."""


class CapacityError(ValueError):
    """A computation exceeds its supported size caps."""


class MeshCapacityError(CapacityError):
    """The mesh is too small for the requested placement.

    Carries a hint with the minimum (rows, cols) that would fit.
    """

    def __init__(self, message: str, required_rows: int, required_cols: int):
        super().__init__(f"{message} (needs at least rows={required_rows}, cols={required_cols})")
        self.required_rows = required_rows
        self.required_cols = required_cols


class DegenerateHeraldError(RuntimeError):
    """The herald pattern has (near-)zero probability; conditioning is undefined."""
