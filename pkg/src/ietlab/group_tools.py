"""Finitely generated groups and finite subgroups in one namespace (see ``groups`` and ``finite``)."""

from .finite import *  # noqa: F401,F403
from .finite import __all__ as _finite_all
from .groups import *  # noqa: F401,F403
from .groups import __all__ as _groups_all

__all__ = list(_groups_all) + list(_finite_all)
