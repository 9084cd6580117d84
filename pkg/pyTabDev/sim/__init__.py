from __future__ import absolute_import

from pyTabDev.sim.generators import *
from pyTabDev.sim.harness import *
from pyTabDev.sim.settings import *
