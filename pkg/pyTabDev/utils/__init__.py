from __future__ import absolute_import

from pyTabDev.utils.dataio import *
from pyTabDev.utils.manifest import *
from pyTabDev.utils.report import *
