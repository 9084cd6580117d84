from __future__ import absolute_import

from pyTabDev.core.bandit import *
from pyTabDev.core.tab import *
from pyTabDev.core.twosample import *
from pyTabDev.core.power import *
from pyTabDev.core.sde import *
