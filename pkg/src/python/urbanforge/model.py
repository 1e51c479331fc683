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

import enum, json, collections
from   dataclasses import dataclass
from   typing      import Optional, Tuple
import numpy

from .errors import NotALegendType, UnknownRegion, InvalidAction, InvalidConfig

__doc__ = """
Domain types shared by every stage: land-use roles and their legend colors,
regions, the city layout (immutable geometry + mutable role overlay), the
demographic roles of the regional planners and the layout edit actions.
"""

__all__ = [
	"LandUseType", "LEGEND", "LEGEND_TYPES", "PLAYER_ROLES", "legend_color",
	"land_use", "Region", "ScaleConfig", "Demographic", "DemographicRole",
	"DEMOGRAPHIC_ORDER", "DEFAULT_NEEDS", "default_roles", "ActionKind",
	"LayoutAction", "ChangePolicy", "RejectionReason", "Rejection",
	"Geometry", "CityLayout", "apply_action", "validate_action",
	"layout_to_dict", "layout_from_dict", "save_layout", "load_layout",
	"save_inventory", "load_inventory",
]

# -----------------------------------------------------------------------------
#
# LAND USE
#
# -----------------------------------------------------------------------------

class LandUseType(enum.Enum):
	Residential       = "Residential"
	StateGovtProperty = "StateGovtProperty"
	Business          = "Business"
	PublicUtilities   = "PublicUtilities"
	ShopsAndMarket    = "ShopsAndMarket"
	Educational       = "Educational"
	VacantLand        = "VacantLand"
	ParkAndOpenSpace  = "ParkAndOpenSpace"
	Hospital          = "Hospital"
	# A region no player has claimed yet
	Unassigned        = "None"

	def isLegend( self ):
		return self is not LandUseType.Unassigned

	def isOpen( self ):
		"""Open regions can be claimed by a player."""
		return self in (LandUseType.Unassigned, LandUseType.VacantLand)

LEGEND = collections.OrderedDict((
	(LandUseType.Residential,       (255, 255, 190)),
	(LandUseType.StateGovtProperty, (194, 231, 252)),
	(LandUseType.Business,          (192, 209, 254)),
	(LandUseType.PublicUtilities,   (255, 235, 190)),
	(LandUseType.ShopsAndMarket,    (200, 214, 157)),
	(LandUseType.Educational,       (254, 191, 229)),
	(LandUseType.VacantLand,        (214, 194, 158)),
	(LandUseType.ParkAndOpenSpace,  (210, 255, 116)),
	(LandUseType.Hospital,          (255, 190, 190)),
))

LEGEND_TYPES = tuple(LEGEND.keys())

PLAYER_ROLES = (
	LandUseType.Business,
	LandUseType.PublicUtilities,
	LandUseType.ShopsAndMarket,
	LandUseType.Educational,
	LandUseType.Hospital,
	LandUseType.ParkAndOpenSpace,
	LandUseType.StateGovtProperty,
)

def legend_color( t ):
	"""Returns the RGB triple the thematic map legend uses for `t`."""
	if t not in LEGEND:
		raise NotALegendType("{0} has no legend color".format(t))
	return LEGEND[t]

def land_use( name ):
	"""Parses a land-use name as written in inventories and config files."""
	if isinstance(name, LandUseType):
		return name
	try:
		return LandUseType(name)
	except ValueError:
		raise InvalidConfig("Unknown land-use type: {0!r}, expected one of {1}".format(
			name, ", ".join(_.value for _ in LandUseType)
		))

# -----------------------------------------------------------------------------
#
# REGION & SCALE
#
# -----------------------------------------------------------------------------

@dataclass(frozen=True)
class Region:
	"""A connected parcel of the map. `landUse` is the type the map was
	ingested with; the current role lives in the layout's assignment."""

	id       : str
	landUse  : LandUseType
	areaPx   : int
	centroid : Tuple[float, float]

@dataclass(frozen=True)
class ScaleConfig:

	metersPerPixel     : float = 1.0
	serviceRadius      : float = 500.0
	ecologyRadius      : float = 300.0
	satisfactionRadius : float = 800.0

	def __post_init__( self ):
		for name in ("metersPerPixel", "serviceRadius", "ecologyRadius", "satisfactionRadius"):
			value = getattr(self, name)
			if not value > 0:
				raise InvalidConfig("Scale {0} must be strictly positive, got {1}".format(name, value))

	def asDict( self ):
		return collections.OrderedDict((
			("meters_per_pixel",      self.metersPerPixel),
			("service_radius_m",      self.serviceRadius),
			("ecology_radius_m",      self.ecologyRadius),
			("satisfaction_radius_m", self.satisfactionRadius),
		))

	@classmethod
	def FromDict( cls, data ):
		data = data or {}
		return cls(
			metersPerPixel     = float(data.get("meters_per_pixel",      1.0)),
			serviceRadius      = float(data.get("service_radius_m",      500.0)),
			ecologyRadius      = float(data.get("ecology_radius_m",      300.0)),
			satisfactionRadius = float(data.get("satisfaction_radius_m", 800.0)),
		)

# -----------------------------------------------------------------------------
#
# DEMOGRAPHICS
#
# -----------------------------------------------------------------------------

class Demographic(enum.Enum):
	Industrial  = "Industrial"
	Educational = "Educational"
	Commercial  = "Commercial"
	Residential = "Residential"

# Sub-regions are always integrated in this order
DEMOGRAPHIC_ORDER = (
	Demographic.Industrial,
	Demographic.Educational,
	Demographic.Commercial,
	Demographic.Residential,
)

DEFAULT_NEEDS = {
	Demographic.Industrial  : (LandUseType.Business, LandUseType.PublicUtilities, LandUseType.ShopsAndMarket),
	Demographic.Educational : (LandUseType.Educational, LandUseType.ParkAndOpenSpace, LandUseType.ShopsAndMarket, LandUseType.Hospital),
	Demographic.Commercial  : (LandUseType.Business, LandUseType.ShopsAndMarket, LandUseType.PublicUtilities),
	Demographic.Residential : (LandUseType.Hospital, LandUseType.Educational, LandUseType.ShopsAndMarket, LandUseType.ParkAndOpenSpace),
}

@dataclass(frozen=True)
class DemographicRole:
	"""A demographic role and its 3 to 5 prioritized needs."""

	kind  : Demographic
	needs : Tuple[LandUseType, ...]

	def __post_init__( self ):
		needs = tuple(land_use(_) for _ in self.needs)
		object.__setattr__(self, "needs", needs)
		if not 3 <= len(needs) <= 5:
			raise InvalidConfig("{0} must list 3 to 5 needs, got {1}".format(self.kind.value, len(needs)))
		if len(set(needs)) != len(needs):
			raise InvalidConfig("{0} lists a need twice".format(self.kind.value))
		if any(not _.isLegend() for _ in needs):
			raise InvalidConfig("{0} needs cannot include the unassigned sentinel".format(self.kind.value))

def default_roles( overrides=None ):
	"""Returns the demographic roles in integration order, applying the
	optional `{name: [types]}` overrides."""
	names = dict((_.value, _) for _ in DEMOGRAPHIC_ORDER)
	given = {}
	for k, v in (overrides or {}).items():
		name = k.value if isinstance(k, Demographic) else k
		if name not in names:
			raise InvalidConfig("Unknown demographic role: {0!r}".format(k))
		given[names[name]] = v
	res = collections.OrderedDict()
	for kind in DEMOGRAPHIC_ORDER:
		res[kind] = DemographicRole(kind, tuple(given.get(kind, DEFAULT_NEEDS[kind])))
	return res

# -----------------------------------------------------------------------------
#
# ACTIONS
#
# -----------------------------------------------------------------------------

class ActionKind(enum.Enum):
	Reassign = "reassign"
	Swap     = "swap"

@dataclass(frozen=True)
class LayoutAction:

	kind    : ActionKind
	target  : str
	newType : Optional[LandUseType] = None
	other   : Optional[str]         = None

	@classmethod
	def Reassign( cls, target, newType ):
		return cls(ActionKind.Reassign, target, newType=land_use(newType))

	@classmethod
	def Swap( cls, target, other ):
		return cls(ActionKind.Swap, target, other=other)

	def inverse( self ):
		assert self.kind is ActionKind.Swap, "Only swaps have a layout-independent inverse"
		return LayoutAction.Swap(self.other, self.target)

	def regions( self ):
		return (self.target,) if self.kind is ActionKind.Reassign else (self.target, self.other)

	def asDict( self ):
		res = collections.OrderedDict((("kind", self.kind.value), ("target", self.target)))
		if self.kind is ActionKind.Reassign:
			res["new_type"] = self.newType.value
		else:
			res["other"] = self.other
		return res

	def __str__( self ):
		if self.kind is ActionKind.Reassign:
			return "reassign({0}→{1})".format(self.target, self.newType.value)
		else:
			return "swap({0}↔{1})".format(self.target, self.other)

@dataclass(frozen=True)
class ChangePolicy:
	"""The master planner's minimal-change rules."""

	budget        : int                         = 5
	protected     : Tuple[LandUseType, ...]     = (LandUseType.Residential, LandUseType.ParkAndOpenSpace)
	vacantOnly    : bool                        = True

	def __post_init__( self ):
		if self.budget < 0:
			raise InvalidConfig("Action budget must be non-negative, got {0}".format(self.budget))
		object.__setattr__(self, "protected", tuple(land_use(_) for _ in self.protected))

class RejectionReason(enum.Enum):
	UnknownRegion  = "UnknownRegion"
	InvalidAction  = "InvalidAction"
	NotVacant      = "NotVacant"
	ProtectedRole  = "ProtectedRole"
	BudgetExceeded = "BudgetExceeded"
	# Only produced by the master planner's metric guard
	MetricGuard    = "MetricGuard"

Rejection = collections.namedtuple("Rejection", "reason message")

# -----------------------------------------------------------------------------
#
# GEOMETRY
#
# -----------------------------------------------------------------------------

class Geometry:
	"""The immutable part of a layout: regions sorted by id, their centroids
	as an array and the lazily computed pairwise pixel distances. Layout
	copies share the same geometry."""

	def __init__( self, regions ):
		self.regions = tuple(sorted(regions, key=lambda _:_.id))
		self.ids     = tuple(_.id for _ in self.regions)
		self.index   = dict((r.id, i) for i, r in enumerate(self.regions))
		if len(self.index) != len(self.regions):
			raise InvalidConfig("Duplicate region ids in inventory")
		self.centroids  = numpy.array([_.centroid for _ in self.regions], dtype=numpy.float64).reshape(-1, 2)
		self._distances = None

	def distances( self ):
		"""Returns the `(n,n)` matrix of Euclidean centroid distances, in
		pixels."""
		if self._distances is None:
			c = self.centroids
			self._distances = numpy.hypot(
				c[:,0][:,numpy.newaxis] - c[:,0][numpy.newaxis,:],
				c[:,1][:,numpy.newaxis] - c[:,1][numpy.newaxis,:],
			)
		return self._distances

	def __len__( self ):
		return len(self.regions)

# -----------------------------------------------------------------------------
#
# CITY LAYOUT
#
# -----------------------------------------------------------------------------

class CityLayout:
	"""A game state: the region geometry plus the mapping from region id
	to its current role."""

	def __init__( self, regions=None, assignment=None, scale=None, geometry=None ):
		self.geometry   = geometry if geometry is not None else Geometry(regions or ())
		self.scale      = scale or ScaleConfig()
		if assignment is None:
			assignment = dict((r.id, r.landUse) for r in self.geometry.regions)
		self.assignment = dict((k, land_use(v)) for k, v in assignment.items())
		missing = [_ for _ in self.geometry.ids if _ not in self.assignment]
		extra   = [_ for _ in self.assignment if _ not in self.geometry.index]
		if missing or extra:
			raise InvalidConfig("Assignment does not cover the inventory (missing: {0}, unknown: {1})".format(
				", ".join(missing) or "-", ", ".join(extra) or "-"
			))

	@property
	def regions( self ):
		return self.geometry.regions

	@property
	def ids( self ):
		return self.geometry.ids

	def has( self, regionID ):
		return regionID in self.geometry.index

	def region( self, regionID ):
		i = self.geometry.index.get(regionID)
		if i is None:
			raise UnknownRegion(regionID)
		return self.geometry.regions[i]

	def roleOf( self, regionID ):
		if regionID not in self.assignment:
			raise UnknownRegion(regionID)
		return self.assignment[regionID]

	def idsWithRole( self, *roles ):
		"""Region ids currently holding one of `roles`, in ascending id order."""
		return [_ for _ in self.geometry.ids if self.assignment[_] in roles]

	def roleCounts( self ):
		return collections.Counter(self.assignment.values())

	def copy( self ):
		return CityLayout(assignment=dict(self.assignment), scale=self.scale, geometry=self.geometry)

	def withRoles( self, roles ):
		"""Returns a copy with the given `{id: role}` updates applied."""
		res = self.copy()
		for k, v in roles.items():
			if k not in res.assignment:
				raise UnknownRegion(k)
			res.assignment[k] = land_use(v)
		return res

	def __eq__( self, other ):
		return isinstance(other, CityLayout) and self.geometry.ids == other.geometry.ids and self.assignment == other.assignment and self.scale == other.scale

	def __repr__( self ):
		return "<CityLayout regions={0} roles={1}>".format(
			len(self.geometry),
			", ".join("{0}:{1}".format(k.value, v) for k, v in sorted(self.roleCounts().items(), key=lambda _:_[0].value))
		)

# -----------------------------------------------------------------------------
#
# EDITS
#
# -----------------------------------------------------------------------------

def validate_action( layout, action, policy, position=0 ):
	"""Checks `action` against the layout and the minimal-change policy.
	`position` is the action's index within its proposal. Returns `None`
	when the action is acceptable, a `Rejection` otherwise. Never mutates
	the layout."""
	if position >= policy.budget:
		return Rejection(RejectionReason.BudgetExceeded, "Action #{0} exceeds the budget of {1}".format(position + 1, policy.budget))
	for _ in action.regions():
		if not layout.has(_):
			return Rejection(RejectionReason.UnknownRegion, "Unknown region {0}".format(_))
	if action.kind is ActionKind.Reassign:
		current = layout.roleOf(action.target)
		if action.newType is None or not action.newType.isLegend():
			return Rejection(RejectionReason.InvalidAction, "Reassign needs a legend type")
		if current in policy.protected:
			return Rejection(RejectionReason.ProtectedRole, "{0} holds protected role {1}".format(action.target, current.value))
		if action.newType in policy.protected:
			return Rejection(RejectionReason.ProtectedRole, "Cannot create protected role {0}".format(action.newType.value))
		if policy.vacantOnly and not current.isOpen():
			return Rejection(RejectionReason.NotVacant, "{0} is {1}, not vacant".format(action.target, current.value))
		if current is action.newType:
			return Rejection(RejectionReason.InvalidAction, "{0} already is {1}".format(action.target, current.value))
	elif action.kind is ActionKind.Swap:
		if action.other is None or action.target == action.other:
			return Rejection(RejectionReason.InvalidAction, "Swap needs two distinct regions")
		for _ in action.regions():
			role = layout.roleOf(_)
			if role in policy.protected:
				return Rejection(RejectionReason.ProtectedRole, "{0} holds protected role {1}".format(_, role.value))
	else:
		return Rejection(RejectionReason.InvalidAction, "Unsupported action kind {0}".format(action.kind))
	return None

def apply_action( layout, action ):
	"""Returns a new layout with `action` applied, the geometry being shared."""
	for _ in action.regions():
		if _ is None:
			raise InvalidAction("Incomplete action: {0}".format(action))
		if not layout.has(_):
			raise UnknownRegion(_)
	res = layout.copy()
	if action.kind is ActionKind.Reassign:
		if action.newType is None or not action.newType.isLegend():
			raise InvalidAction("Reassign needs a legend type: {0}".format(action))
		res.assignment[action.target] = action.newType
	elif action.kind is ActionKind.Swap:
		if action.target == action.other:
			raise InvalidAction("Swap targets must be distinct: {0}".format(action))
		a, b = action.target, action.other
		res.assignment[a], res.assignment[b] = layout.assignment[b], layout.assignment[a]
	else:
		raise InvalidAction("Unsupported action kind {0}".format(action.kind))
	return res

# -----------------------------------------------------------------------------
#
# SERIALIZATION
#
# -----------------------------------------------------------------------------

def _region_to_dict( region ):
	return collections.OrderedDict((
		("id",       region.id),
		("type",     region.landUse.value),
		("area_px",  int(region.areaPx)),
		("centroid", [float(region.centroid[0]), float(region.centroid[1])]),
	))

def _region_from_dict( data ):
	try:
		x, y = data["centroid"]
		return Region(
			id       = str(data["id"]),
			landUse  = land_use(data["type"]),
			areaPx   = int(data["area_px"]),
			centroid = (float(x), float(y)),
		)
	except (KeyError, TypeError, ValueError) as e:
		raise InvalidConfig("Malformed region entry {0!r}: {1}".format(data, e))

def layout_to_dict( layout, assignment=True ):
	res = collections.OrderedDict((
		("scale",   layout.scale.asDict()),
		("regions", [_region_to_dict(_) for _ in layout.regions]),
	))
	if assignment:
		res["assignment"] = collections.OrderedDict((_, layout.assignment[_].value) for _ in layout.ids)
	return res

def layout_from_dict( data ):
	if not isinstance(data, dict) or "regions" not in data:
		raise InvalidConfig("Inventory must be an object with a `regions` list")
	regions = [_region_from_dict(_) for _ in data["regions"]]
	return CityLayout(
		regions    = regions,
		assignment = data.get("assignment"),
		scale      = ScaleConfig.FromDict(data.get("scale")),
	)

def _write_json( data, path ):
	with open(path, "w") as f:
		f.write(json.dumps(data, indent=2))
		f.write("\n")
	return path

def _read_json( path ):
	try:
		with open(path) as f:
			return json.load(f)
	except (OSError, ValueError) as e:
		raise InvalidConfig("Cannot read {0}: {1}".format(path, e))

def save_inventory( layout, path ):
	return _write_json(layout_to_dict(layout, assignment=False), path)

def load_inventory( path ):
	return layout_from_dict(_read_json(path))

def save_layout( layout, path ):
	return _write_json(layout_to_dict(layout, assignment=True), path)

def load_layout( path ):
	return layout_from_dict(_read_json(path))

# EOF - vim: ts=4 sw=4 noet
