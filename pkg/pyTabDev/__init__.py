from __future__ import absolute_import

__version__ = "0.1.0"

from pyTabDev.errors import *
from pyTabDev.core import *
