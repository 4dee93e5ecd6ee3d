"""Python surface of the steinmc C++ core."""

from _steinmc import *  # noqa: F401,F403
from _steinmc import __version__  # noqa: F401
