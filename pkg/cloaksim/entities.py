"""Module that defines entities to be used across application layers.

"""
import enum
import typing


class CavityCondition(enum.Enum):
    """Enumeration of the boundary conditions on the cavity boundary.

    """
    DIRICHLET = 'dirichlet'
    NEUMANN = 'neumann'

    @staticmethod
    def from_name(name: str) -> 'CavityCondition':
        """Find an enumeration member by its name.

        Parameters
        ----------
        name : str
            The name to search for (case-insensitive).

        Raises
        ------
        NameError
            If no enumeration member can be found for the given name.

        """
        for condition in CavityCondition:
            if condition.value == name.lower():
                return condition
        raise NameError(name)


class ScatterMode(enum.Enum):
    """Enumeration of the scattering problem variants.

    IDEALIZED_DIRICHLET and IDEALIZED_NEUMANN treat D as an impenetrable
    obstacle, LOSSY1 and LOSSY2 fill D with a lossy layer around a core,
    and PENETRABLE takes explicit region coefficients.

    """
    IDEALIZED_DIRICHLET = 'idealized_dirichlet'
    IDEALIZED_NEUMANN = 'idealized_neumann'
    LOSSY1 = 'lossy1'
    LOSSY2 = 'lossy2'
    PENETRABLE = 'penetrable'

    @property
    def is_idealized(self) -> bool:
        return self in (ScatterMode.IDEALIZED_DIRICHLET,
                        ScatterMode.IDEALIZED_NEUMANN)

    @property
    def cavity_condition(self) -> typing.Optional[CavityCondition]:
        """The cavity condition whose eigenvalues the mode cloaks (None
        for penetrable media).

        """
        if self in (ScatterMode.IDEALIZED_DIRICHLET, ScatterMode.LOSSY1):
            return CavityCondition.DIRICHLET
        if self in (ScatterMode.IDEALIZED_NEUMANN, ScatterMode.LOSSY2):
            return CavityCondition.NEUMANN
        return None

    @staticmethod
    def from_name(name: str) -> 'ScatterMode':
        """Find an enumeration member by its name.

        Raises
        ------
        NameError
            If no enumeration member can be found for the given name.

        """
        for mode in ScatterMode:
            if mode.value == name.lower():
                return mode
        raise NameError(name)
