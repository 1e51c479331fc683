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
The exception hierarchy. Every error carries the process exit code the
command-line front end uses when the error escapes a command.
"""

EXIT_INPUT    = 2
EXIT_EXTERNAL = 3

__all__ = [
	"UrbanForgeError", "NotALegendType", "UnknownRegion", "InvalidAction",
	"InvalidConfig", "AmbiguousLegend", "MaskDimensionMismatch",
	"RenderOutOfBounds", "NoFacilityOfType", "NoResidents", "RegionOccupied",
	"ParseError", "BudgetExceeded", "PlannerFailed", "CompletionError",
	"EmptySubRegion", "EXIT_INPUT", "EXIT_EXTERNAL",
]

class UrbanForgeError(Exception):

	EXIT_CODE = EXIT_INPUT

class NotALegendType(UrbanForgeError):
	pass

class UnknownRegion(UrbanForgeError):

	def __init__( self, regionID, message=None ):
		self.regionID = regionID
		super(UnknownRegion, self).__init__(message or "Unknown region: {0}".format(regionID))

class InvalidAction(UrbanForgeError):
	pass

class InvalidConfig(UrbanForgeError):
	pass

class AmbiguousLegend(UrbanForgeError):
	"""Raised when two legend ranges claim the same pixel."""

	def __init__( self, pixel, types ):
		self.pixel = pixel
		self.types = tuple(types)
		super(AmbiguousLegend, self).__init__("Pixel {0} is claimed by {1}".format(
			pixel, ", ".join(_.value for _ in self.types)
		))

class MaskDimensionMismatch(UrbanForgeError):
	pass

class RenderOutOfBounds(UrbanForgeError):
	pass

class NoFacilityOfType(UrbanForgeError):
	pass

class NoResidents(UrbanForgeError):
	pass

class RegionOccupied(UrbanForgeError):
	pass

class BudgetExceeded(UrbanForgeError):
	pass

class ParseError(UrbanForgeError):
	"""A planner reply that could not be decoded. When the failure has an
	offset in the raw text, `describe()` returns an excerpt of the lines
	around it with the offending character marked."""

	def __init__( self, message, text=None, offset=None ):
		self.text   = text
		self.offset = offset
		super(ParseError, self).__init__(message)

	def getContext( self, before=2, after=2 ):
		"""Returns the `before` lines, the current line and the `after`
		lines around the failure offset."""
		t    = self.text or ""
		o    = min(max(self.offset or 0, 0), len(t))
		bt   = t[0:o].rsplit("\n", before + 1)[-before-1:]
		at   = t[o:].split("\n", after + 1)[:after+1]
		return dict(
			before     = bt[:-1],
			line       = bt[-1] + at[0],
			after      = at[1:],
			lineOffset = len(bt[-1]),
		)

	def describe( self, before=2, after=2 ):
		if self.text is None or self.offset is None:
			return str(self)
		context = self.getContext(before, after)
		lines   = ["│ " + _ for _ in context["before"]]
		lines.append("└┐" + context["line"])
		lines.append("┌┘" + " " * context["lineOffset"] + "▲")
		lines += ["│ " + _ for _ in context["after"]]
		return "{0}\n{1}".format(self, "\n".join(lines))

class PlannerFailed(UrbanForgeError):

	EXIT_CODE = EXIT_EXTERNAL

	def __init__( self, subRegion, message=None ):
		self.subRegion = subRegion
		super(PlannerFailed, self).__init__(message or "Planner for sub-region {0} failed".format(subRegion))

class CompletionError(UrbanForgeError):
	"""The completion service could not be reached or answered with an
	error status."""

	EXIT_CODE = EXIT_EXTERNAL

class EmptySubRegion(UserWarning):
	pass

# EOF - vim: ts=4 sw=4 noet
