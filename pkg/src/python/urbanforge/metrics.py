#!/usr/bin/env python
# encoding=utf8 ---------------------------------------------------------------
# Project           : UrbanForge
# -----------------------------------------------------------------------------
# Author            : UrbanForge contributors
# License           : BSD License
# -----------------------------------------------------------------------------
# Creation date     : 07-Mar-2025
# Last modification : 17-Oct-2026
# -----------------------------------------------------------------------------

import os, math, json, collections
from   dataclasses import dataclass
from   typing      import Tuple
import numpy

from .        import logger
from .errors  import NoFacilityOfType, NoResidents, InvalidConfig
from .model   import LandUseType, Demographic, DemographicRole, default_roles, land_use

__doc__ = """
The three layout metrics. Residents are sampled one per Residential region
centroid and distances are centroid to centroid, scaled by the layout's
meters per pixel.

- Service accessibility: the share of (resident, essential service type)
  pairs with a facility strictly closer than the service radius.
- Ecological coverage: the share of residents within the ecology radius
  (inclusive) of a park.
- Satisfaction: the mean over residents of the share of their sub-region's
  demographic needs strictly closer than the satisfaction radius.

Every aggregate sums per-resident terms in ascending resident id order so
that values are bit-stable.
"""

logging = logger("metrics")

DEFAULT_SERVICES = (
	LandUseType.Educational,
	LandUseType.Hospital,
	LandUseType.Business,
	LandUseType.ShopsAndMarket,
	LandUseType.ParkAndOpenSpace,
)

SAMPLING_CENTROID = "centroid"
SAMPLING_AREA     = "area"
SAMPLINGS         = (SAMPLING_CENTROID, SAMPLING_AREA)
CSV_HEADER        = "stage,service,ecology,satisfaction"

# -----------------------------------------------------------------------------
#
# TYPES
#
# -----------------------------------------------------------------------------

@dataclass(frozen=True)
class EssentialServiceSet:

	types : Tuple[LandUseType, ...] = DEFAULT_SERVICES

	def __post_init__( self ):
		types = tuple(land_use(_) for _ in self.types)
		object.__setattr__(self, "types", types)
		if not types:
			raise InvalidConfig("The essential service set cannot be empty")
		if len(set(types)) != len(types):
			raise InvalidConfig("The essential service set lists a type twice")
		excluded = [_ for _ in types if _ in (LandUseType.Residential, LandUseType.VacantLand, LandUseType.Unassigned)]
		if excluded:
			raise InvalidConfig("Not a service type: {0}".format(", ".join(_.value for _ in excluded)))

	def facilities( self, layout ):
		"""Returns `{type: [centroid]}` for every service type, in
		ascending region id order."""
		return collections.OrderedDict((t, [layout.region(_).centroid for _ in layout.idsWithRole(t)]) for t in self.types)

class ResidentSet:
	"""The residents of a layout, one per Residential region, in ascending
	id order. With area sampling each resident weighs its region's area."""

	def __init__( self, layout, sampling=SAMPLING_CENTROID ):
		if sampling not in SAMPLINGS:
			raise InvalidConfig("Unknown resident sampling {0!r}, expected one of {1}".format(sampling, ", ".join(SAMPLINGS)))
		self.ids       = layout.idsWithRole(LandUseType.Residential)
		self.indices   = numpy.array([layout.geometry.index[_] for _ in self.ids], dtype=numpy.intp)
		self.locations = [layout.region(_).centroid for _ in self.ids]
		self.weights   = [layout.region(_).areaPx for _ in self.ids] if sampling == SAMPLING_AREA else None

	def __len__( self ):
		return len(self.ids)

	def mean( self, terms, members=None ):
		"""Averages the per-resident `terms`, summing in ascending resident
		order. `members` optionally restricts to the given positions."""
		members = range(len(terms)) if members is None else members
		total   = 0.0
		weight  = 0
		for i in members:
			if self.weights is None:
				total  += terms[i]
				weight += 1
			else:
				total  += self.weights[i] * terms[i]
				weight += self.weights[i]
		return total / weight

@dataclass(frozen=True)
class MetricsReport:

	service      : float
	ecology      : float
	satisfaction : float
	stage        : str = ""

	def toCSV( self ):
		return "{0},{1:.3f},{2:.3f},{3:.3f}".format(self.stage, self.service, self.ecology, self.satisfaction)

	def asDict( self ):
		return collections.OrderedDict((
			("stage",        self.stage),
			("service",      self.service),
			("ecology",      self.ecology),
			("satisfaction", self.satisfaction),
		))

	def toJSON( self ):
		return json.dumps(self.asDict())

# -----------------------------------------------------------------------------
#
# DISTANCES
#
# -----------------------------------------------------------------------------

def min_distance( resident, facilities, scale ):
	"""Meters from `resident` to the nearest of `facilities`."""
	if len(facilities) == 0:
		raise NoFacilityOfType("No facility to measure the distance to")
	f = numpy.asarray(facilities, dtype=numpy.float64).reshape(-1, 2)
	d = numpy.hypot(f[:,0] - resident[0], f[:,1] - resident[1])
	return float(d.min() * scale.metersPerPixel)

def nearest( layout, residents, role ):
	"""Distances in meters from every resident to the nearest region
	holding `role`, `inf` when there is none."""
	facilities = [layout.geometry.index[_] for _ in layout.idsWithRole(role)]
	if not facilities or not len(residents):
		return numpy.full(len(residents), numpy.inf)
	d = layout.geometry.distances()[numpy.ix_(residents.indices, numpy.array(facilities, dtype=numpy.intp))]
	return d.min(axis=1) * layout.scale.metersPerPixel

def _residents( layout, sampling ):
	residents = ResidentSet(layout, sampling)
	if not len(residents):
		raise NoResidents("The layout has no Residential region")
	return residents

# -----------------------------------------------------------------------------
#
# METRICS
#
# -----------------------------------------------------------------------------

def service_accessibility( layout, services=None, sampling=SAMPLING_CENTROID ):
	services  = services or EssentialServiceSet()
	residents = _residents(layout, sampling)
	hits      = numpy.zeros(len(residents), dtype=numpy.int64)
	for t in services.types:
		hits += nearest(layout, residents, t) < layout.scale.serviceRadius
	n = len(services.types)
	return residents.mean([int(_) / n for _ in hits])

def ecological_coverage( layout, sampling=SAMPLING_CENTROID ):
	residents = _residents(layout, sampling)
	inside    = nearest(layout, residents, LandUseType.ParkAndOpenSpace) <= layout.scale.ecologyRadius
	return residents.mean([1.0 if _ else 0.0 for _ in inside])

def subregion_membership( layout, residents, subregions ):
	"""Maps each resident position to the key of the first sub-region whose
	mask is white under its floored centroid, or `None` for orphans."""
	res = []
	for x, y in residents.locations:
		px, py = int(math.floor(x)), int(math.floor(y))
		res.append(next((k for k, mask in subregions.items() if mask.isSet(px, py)), None))
	return res

def satisfaction( layout, roles, subregions=None, sampling=SAMPLING_CENTROID, membership=None, warnOrphans=True ):
	"""Mean share of met demographic needs. `roles` maps sub-region keys
	to `DemographicRole`s and `subregions` the same keys to masks. Without
	sub-regions every resident takes the first role. Residents outside
	every sub-region are left out with a warning. The warning is
	skipped when `warnOrphans` is false."""
	residents = _residents(layout, sampling)
	if membership is None:
		if subregions is None:
			first      = next(iter(roles))
			membership = [first] * len(residents)
		else:
			membership = subregion_membership(layout, residents, subregions)
	orphans = [residents.ids[i] for i, k in enumerate(membership) if k is None]
	if orphans and warnOrphans:
		logging.warning("{0} residents fall in no sub-region and are left out of satisfaction: {1}".format(len(orphans), ", ".join(orphans)))
	members = [i for i, k in enumerate(membership) if k is not None]
	if not members:
		raise NoResidents("No resident falls within a sub-region")
	radius  = layout.scale.satisfactionRadius
	wanted  = []
	for k in set(membership) - set([None]):
		wanted += [_ for _ in roles[k].needs if _ not in wanted]
	met     = dict((t, nearest(layout, residents, t) < radius) for t in wanted)
	terms   = [0.0] * len(residents)
	for i in members:
		needs    = roles[membership[i]].needs
		terms[i] = sum(1 for t in needs if met[t][i]) / len(needs)
	return residents.mean(terms, members)

# -----------------------------------------------------------------------------
#
# EVALUATOR
#
# -----------------------------------------------------------------------------

class Evaluator:
	"""Bundles what the metrics need besides the layout: the essential
	services, the demographic role and mask of each sub-region and the
	resident sampling mode."""

	def __init__( self, services=None, roles=None, subregions=None, sampling=SAMPLING_CENTROID ):
		if sampling not in SAMPLINGS:
			raise InvalidConfig("Unknown resident sampling {0!r}".format(sampling))
		self.services   = services or EssentialServiceSet()
		self.sampling   = sampling
		self.subregions = subregions
		if roles is None:
			roles = default_roles()
			if subregions is None:
				roles = collections.OrderedDict(((Demographic.Residential, roles[Demographic.Residential]),))
		self.roles      = roles
		if subregions is not None:
			missing = [_ for _ in subregions if _ not in roles]
			if missing:
				raise InvalidConfig("No demographic role for sub-regions {0}".format(", ".join(str(_) for _ in missing)))
		self._membership = None

	def membership( self, layout ):
		"""Resident sub-region membership, cached per geometry and resident
		set since residents never move."""
		residents = ResidentSet(layout, self.sampling)
		ids       = tuple(residents.ids)
		cached    = self._membership
		if cached is None or cached[0] is not layout.geometry or cached[1] != ids:
			if self.subregions is None:
				value = [next(iter(self.roles))] * len(residents)
			else:
				value = subregion_membership(layout, residents, self.subregions)
			self._membership = (layout.geometry, ids, value)
		return self._membership[2]

	def service( self, layout ):
		return service_accessibility(layout, self.services, self.sampling)

	def ecology( self, layout ):
		return ecological_coverage(layout, self.sampling)

	def satisfaction( self, layout ):
		return satisfaction(layout, self.roles, self.subregions, self.sampling, membership=self.membership(layout))

	def report( self, layout, stage="" ):
		return metrics_report(layout, self, stage)

def metrics_report( layout, evaluator, stage="" ):
	return MetricsReport(
		service      = evaluator.service(layout),
		ecology      = evaluator.ecology(layout),
		satisfaction = evaluator.satisfaction(layout),
		stage        = stage,
	)

# -----------------------------------------------------------------------------
#
# REPORTING
#
# -----------------------------------------------------------------------------

def format_table( reports ):
	"""Formats the reports as a metrics × stage table."""
	width  = max([12] + [len(_.stage) + 2 for _ in reports])
	lines  = ["{0:<14}".format("Metrics") + "".join("{0:>{1}}".format(_.stage, width) for _ in reports)]
	lines.append("-" * len(lines[0]))
	for label, name in (("Service", "service"), ("Ecology", "ecology"), ("Satisfaction", "satisfaction")):
		lines.append("{0:<14}".format(label) + "".join("{0:>{1}.3f}".format(getattr(_, name), width) for _ in reports))
	return "\n".join(lines)

def write_reports_csv( path, reports, append=True ):
	"""Writes the reports as CSV rows, adding the header when the file is
	new or empty."""
	exists = append and os.path.exists(path) and os.path.getsize(path) > 0
	with open(path, "a" if exists else "w") as f:
		if not exists:
			f.write(CSV_HEADER + "\n")
		for _ in reports:
			f.write(_.toCSV() + "\n")
	return path

def write_reports_json( path, reports ):
	"""Writes the reports as JSON lines, one report per line."""
	with open(path, "w") as f:
		for _ in reports:
			f.write(_.toJSON() + "\n")
	return path

# EOF - vim: ts=4 sw=4 noet
