from abc import ABC, abstractmethod
from typing import ClassVar

from src.model import Instance, Lottery


class Mechanism(ABC):
    """A mechanism maps a reported instance to an exact outcome distribution."""

    name: ClassVar[str] = "mechanism"

    # True when outcomes depend on reported positions only through known data
    position_independent: ClassVar[bool] = False

    @abstractmethod
    def outcome(self, inst: Instance) -> Lottery:
        """Return the outcome for ``inst`` (a point mass for deterministic mechanisms)."""

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name}>"
