"""Self-focusing waveguide pulses and position-selective qubit driving."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
