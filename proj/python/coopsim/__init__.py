from ._coopsim import *  # noqa: F401,F403
from ._coopsim import __doc__  # noqa: F401
