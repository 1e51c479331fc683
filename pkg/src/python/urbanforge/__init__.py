#!/usr/bin/env python
# encoding=utf8 ---------------------------------------------------------------
# Project           : UrbanForge
# -----------------------------------------------------------------------------
# Author            : UrbanForge contributors
# License           : BSD License
# -----------------------------------------------------------------------------
# Creation date     : 02-Mar-2025
# Last modification : 17-Oct-2026
# -----------------------------------------------------------------------------

__doc__ = """
Land-use layout optimization in three stages: a thematic map is ingested into
a region inventory, a greedy + genetic solver places the non-residential roles
for service and ecological access, and four regional planners propose edits
that a master planner validates and integrates.
"""

VERSION            = "0.4.0"
LICENSE            = "http://ffctn.com/doc/licenses/bsd"

try:
	import reporter
	def logger( name ):
		return reporter.bind("urbanforge." + name)
except ImportError:
	import logging
	def logger( name ):
		return logging.getLogger("urbanforge." + name)

from .errors  import *
from .model   import *

# EOF - vim: ts=4 sw=4 noet
