#!/usr/bin/env python
# encoding=utf8 ---------------------------------------------------------------
# Project           : UrbanForge
# -----------------------------------------------------------------------------
# Author            : UrbanForge contributors
# License           : BSD License
# -----------------------------------------------------------------------------
# Creation date     : 24-Mar-2025
# Last modification : 17-Oct-2026
# -----------------------------------------------------------------------------

import os, collections
from   dataclasses import dataclass, field, replace
from   typing      import Dict, Optional, Tuple
import yaml

from .         import logger
from .errors   import InvalidConfig, MaskDimensionMismatch
from .model    import LandUseType, ScaleConfig, Demographic, DEMOGRAPHIC_ORDER, PLAYER_ROLES, default_roles, land_use
from .ingest   import RasterImage, BinaryMask, DEFAULT_TOLERANCE, DEFAULT_MIN_AREA, legend_ranges
from .metrics  import EssentialServiceSet, Evaluator, DEFAULT_SERVICES, SAMPLING_CENTROID, SAMPLINGS
from .solver   import GAConfig
from .planners import IntegrationPolicy, HeuristicPlanner, ModelPlanner, HttpCompletionClient

__doc__ = """
The pipeline configuration, read from a YAML document such as:

```yaml
map: city.png
masks: {Industrial: nw.png, Educational: ne.png, Commercial: sw.png, Residential: se.png}
min_area: 20
scale: {meters_per_pixel: 60}
ga: {population_size: 20, generations: 50, rng_seed: 7}
policy: {budget: 5}
planner: {backend: heuristic}
output: out
```

Every key but `map` is optional and relative paths resolve against the
directory of the configuration file.
"""

logging = logger("config")

BACKEND_HEURISTIC = "heuristic"
BACKEND_REMOTE    = "remote"
BACKENDS          = (BACKEND_HEURISTIC, BACKEND_REMOTE)
ON_ERROR_FAIL     = "fail"
ON_ERROR_FALLBACK = "heuristic"
ON_ERRORS         = (ON_ERROR_FAIL, ON_ERROR_FALLBACK)

KEYS = (
	"map", "masks", "filter_mask", "legend", "hsv_tolerance", "min_area",
	"scale", "services", "sampling", "demographics", "players", "ga",
	"policy", "planner", "output",
)

GA_KEYS = collections.OrderedDict((
	("population_size",     "populationSize"),
	("generations",         "generations"),
	("elite_count",         "eliteCount"),
	("swaps_per_mutation",  "swapsPerMutation"),
	("tournament_size",     "tournamentSize"),
	("w_service",           "wService"),
	("w_ecology",           "wEcology"),
	("rng_seed",            "rngSeed"),
	("plateau_generations", "plateauGenerations"),
))

POLICY_KEYS = collections.OrderedDict((
	("budget",                 "budget"),
	("protected",              "protected"),
	("vacant_only",            "vacantOnly"),
	("min_satisfaction_delta", "minSatisfactionDelta"),
	("max_service_drop",       "maxServiceDrop"),
	("max_ecology_drop",       "maxEcologyDrop"),
))

# -----------------------------------------------------------------------------
#
# PLANNER SETTINGS
#
# -----------------------------------------------------------------------------

@dataclass(frozen=True)
class PlannerConfig:

	backend : str   = BACKEND_HEURISTIC
	retries : int   = 2
	timeout : float = 30.0
	rounds  : int   = 1
	onError : str   = ON_ERROR_FAIL

	def __post_init__( self ):
		if self.backend not in BACKENDS:
			raise InvalidConfig("Unknown planner backend {0!r}, expected one of {1}".format(self.backend, ", ".join(BACKENDS)))
		if self.onError not in ON_ERRORS:
			raise InvalidConfig("Unknown planner error mode {0!r}, expected one of {1}".format(self.onError, ", ".join(ON_ERRORS)))
		if self.retries < 0:
			raise InvalidConfig("Planner retries must be non-negative, got {0}".format(self.retries))
		if self.rounds < 1:
			raise InvalidConfig("Planning rounds must be at least 1, got {0}".format(self.rounds))

	@classmethod
	def FromDict( cls, data ):
		data = data or {}
		return cls(
			backend = data.get("backend", BACKEND_HEURISTIC),
			retries = int(data.get("retries", 2)),
			timeout = float(data.get("timeout", 30.0)),
			rounds  = int(data.get("rounds", 1)),
			onError = data.get("on_error", ON_ERROR_FAIL),
		)

# -----------------------------------------------------------------------------
#
# PIPELINE CONFIG
#
# -----------------------------------------------------------------------------

@dataclass(frozen=True)
class PipelineConfig:

	map          : Optional[str]                    = None
	masks        : Dict[Demographic, str]           = field(default_factory=collections.OrderedDict)
	filterMask   : Optional[str]                    = None
	legend       : Dict[LandUseType, Tuple[int,int,int]] = field(default_factory=dict)
	tolerance    : Tuple[float, float, float]       = DEFAULT_TOLERANCE
	minArea      : int                              = DEFAULT_MIN_AREA
	scale        : ScaleConfig                      = field(default_factory=ScaleConfig)
	services     : Tuple[LandUseType, ...]          = DEFAULT_SERVICES
	sampling     : str                              = SAMPLING_CENTROID
	demographics : Dict[str, Tuple[LandUseType, ...]] = field(default_factory=dict)
	players      : Optional[Dict[LandUseType, int]] = None
	ga           : GAConfig                         = field(default_factory=GAConfig)
	policy       : IntegrationPolicy                = field(default_factory=IntegrationPolicy)
	planner      : PlannerConfig                    = field(default_factory=PlannerConfig)
	output       : str                              = "."

	@classmethod
	def Load( cls, path ):
		"""Reads and validates the YAML configuration at `path`."""
		try:
			with open(path) as f:
				data = yaml.safe_load(f)
		except OSError as e:
			raise InvalidConfig("Cannot read configuration {0}: {1}".format(path, e))
		except yaml.YAMLError as e:
			raise InvalidConfig("Malformed configuration {0}: {1}".format(path, e))
		if not isinstance(data, dict):
			raise InvalidConfig("Configuration {0} must be a mapping".format(path))
		if "map" not in data:
			raise InvalidConfig("Configuration {0} does not name a map".format(path))
		return cls.FromDict(data, os.path.dirname(os.path.abspath(path))).checkPaths()

	@classmethod
	def FromDict( cls, data, base="." ):
		try:
			return cls._FromDict(data, base)
		except (ValueError, TypeError, AttributeError) as e:
			raise InvalidConfig("Invalid configuration value: {0}".format(e))

	@classmethod
	def _FromDict( cls, data, base ):
		unknown = [_ for _ in data if _ not in KEYS]
		if unknown:
			raise InvalidConfig("Unknown configuration keys: {0}".format(", ".join(sorted(str(_) for _ in unknown))))
		def resolve( p ):
			return p if p is None or os.path.isabs(p) else os.path.normpath(os.path.join(base, p))
		kinds = dict((_.value, _) for _ in DEMOGRAPHIC_ORDER)
		masks = collections.OrderedDict()
		for k, v in (data.get("masks") or {}).items():
			if k not in kinds:
				raise InvalidConfig("Unknown sub-region {0!r} in masks, expected one of {1}".format(k, ", ".join(kinds)))
			masks[kinds[k]] = resolve(v)
		# Masks are always kept in integration order
		masks = collections.OrderedDict((_, masks[_]) for _ in DEMOGRAPHIC_ORDER if _ in masks)
		legend = collections.OrderedDict()
		for k, v in (data.get("legend") or {}).items():
			if len(v) != 3:
				raise InvalidConfig("Legend color of {0} must be [r, g, b], got {1}".format(k, v))
			legend[land_use(k)] = tuple(int(_) for _ in v)
		tolerance = tuple(float(_) for _ in data.get("hsv_tolerance", DEFAULT_TOLERANCE))
		if len(tolerance) != 3:
			raise InvalidConfig("HSV tolerance must be [h, s, v], got {0}".format(list(tolerance)))
		sampling = data.get("sampling", SAMPLING_CENTROID)
		if sampling not in SAMPLINGS:
			raise InvalidConfig("Unknown resident sampling {0!r}".format(sampling))
		services = tuple(land_use(_) for _ in data.get("services", [_.value for _ in DEFAULT_SERVICES]))
		players  = data.get("players")
		if players is not None:
			players = collections.OrderedDict((land_use(k), int(v)) for k, v in players.items())
			bad     = [_.value for _ in players if _ not in PLAYER_ROLES]
			if bad:
				raise InvalidConfig("Not player roles: {0}".format(", ".join(bad)))
		return cls(
			map          = resolve(data.get("map")),
			masks        = masks,
			filterMask   = resolve(data.get("filter_mask")),
			legend       = legend,
			tolerance    = tolerance,
			minArea      = int(data.get("min_area", DEFAULT_MIN_AREA)),
			scale        = ScaleConfig.FromDict(data.get("scale")),
			services     = services,
			sampling     = sampling,
			demographics = dict(data.get("demographics") or {}),
			players      = players,
			ga           = cls._Section(GAConfig, GA_KEYS, data.get("ga"), "ga", services=EssentialServiceSet(services), sampling=sampling),
			policy       = cls._Section(IntegrationPolicy, POLICY_KEYS, data.get("policy"), "policy"),
			planner      = PlannerConfig.FromDict(data.get("planner")),
			output       = resolve(data.get("output", ".")),
		).validate()

	@staticmethod
	def _Section( kind, keys, data, name, **extra ):
		data    = data or {}
		unknown = [_ for _ in data if _ not in keys]
		if unknown:
			raise InvalidConfig("Unknown {0} keys: {1}".format(name, ", ".join(sorted(str(_) for _ in unknown))))
		values = dict((keys[k], v) for k, v in data.items())
		if "protected" in values:
			values["protected"] = tuple(land_use(_) for _ in values["protected"])
		values.update(extra)
		try:
			return kind(**values)
		except TypeError as e:
			raise InvalidConfig("Invalid {0} section: {1}".format(name, e))

	def validate( self ):
		if self.minArea < 1:
			raise InvalidConfig("min_area must be at least 1, got {0}".format(self.minArea))
		# Raises on unknown roles or malformed needs
		self.roles()
		EssentialServiceSet(self.services)
		return self

	def checkPaths( self ):
		paths = [self.map, self.filterMask] + list(self.masks.values())
		for p in paths:
			if p is not None and not os.path.exists(p):
				raise InvalidConfig("File not found: {0}".format(p))
		return self

	def requireMasks( self ):
		"""Planning needs one mask per demographic sub-region."""
		if len(self.masks) != len(DEMOGRAPHIC_ORDER):
			raise InvalidConfig("Planning needs {0} sub-region masks ({1}), got {2}".format(
				len(DEMOGRAPHIC_ORDER), ", ".join(_.value for _ in DEMOGRAPHIC_ORDER), len(self.masks)
			))
		return self

	def override( self, seed=None, output=None, minArea=None, tolerance=None, masks=None, filterMask=None, rounds=None, onError=None ):
		"""Returns a copy with the command-line overrides applied."""
		res = self
		if seed is not None:
			res = replace(res, ga=replace(res.ga, rngSeed=int(seed)))
		if output is not None:
			res = replace(res, output=output)
		if minArea is not None:
			res = replace(res, minArea=int(minArea))
		if tolerance is not None:
			res = replace(res, tolerance=tuple(float(_) for _ in tolerance))
		if filterMask is not None:
			res = replace(res, filterMask=filterMask)
		if masks:
			kinds = dict((_.value, _) for _ in DEMOGRAPHIC_ORDER)
			given = dict(res.masks)
			for name, path in masks:
				if name not in kinds:
					raise InvalidConfig("Unknown sub-region {0!r}, expected one of {1}".format(name, ", ".join(kinds)))
				given[kinds[name]] = path
			res = replace(res, masks=collections.OrderedDict((_, given[_]) for _ in DEMOGRAPHIC_ORDER if _ in given))
		if rounds is not None or onError is not None:
			res = replace(res, planner=replace(res.planner,
				rounds  = res.planner.rounds if rounds is None else int(rounds),
				onError = onError or res.planner.onError,
			))
		return res.validate()

	# =========================================================================
	# FACTORIES
	# =========================================================================

	def roles( self ):
		return default_roles(self.demographics)

	def ranges( self ):
		return legend_ranges(self.tolerance, self.legend)

	def loadMap( self ):
		if not self.map:
			raise InvalidConfig("No map configured")
		return RasterImage.Load(self.map)

	def loadFilterMask( self ):
		return BinaryMask.Load(self.filterMask) if self.filterMask else None

	def loadMasks( self, size=None ):
		"""Loads the sub-region masks in integration order, checking them
		against the `(width, height)` of the map when given."""
		res = collections.OrderedDict()
		for k, p in self.masks.items():
			mask = BinaryMask.Load(p)
			if size is not None and mask.size != tuple(size):
				raise MaskDimensionMismatch("Mask {0} is {1}×{2}, map is {3}×{4}".format(p, mask.width, mask.height, size[0], size[1]))
			res[k] = mask
		return res

	def evaluator( self, masks=None ):
		"""The metrics evaluator. Without sub-region masks satisfaction uses
		the Residential role for the whole city."""
		roles = self.roles()
		if not masks:
			roles = collections.OrderedDict(((Demographic.Residential, roles[Demographic.Residential]),))
			masks = None
		return Evaluator(EssentialServiceSet(self.services), roles, masks, self.sampling)

	def planners( self ):
		"""One planner per sub-region, in integration order."""
		res = collections.OrderedDict()
		for k in DEMOGRAPHIC_ORDER:
			if self.planner.backend == BACKEND_REMOTE:
				client = HttpCompletionClient.FromEnvironment(self.planner.timeout, self.planner.retries)
				res[k] = ModelPlanner(client, self.planner.retries)
			else:
				res[k] = HeuristicPlanner()
		return res

	def fallback( self ):
		return HeuristicPlanner() if self.planner.onError == ON_ERROR_FALLBACK else None

# EOF - vim: ts=4 sw=4 noet
