"""Domains, subdomains and IETs in one namespace (see ``domain`` and ``iet``)."""

from .domain import *  # noqa: F401,F403
from .domain import __all__ as _domain_all
from .iet import *  # noqa: F401,F403
from .iet import __all__ as _iet_all

__all__ = list(_domain_all) + list(_iet_all)
