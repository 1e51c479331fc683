#!/usr/bin/env python
# encoding=utf8 ---------------------------------------------------------------
# Project           : UrbanForge
# -----------------------------------------------------------------------------
# Author            : UrbanForge contributors
# License           : BSD License
# -----------------------------------------------------------------------------
# Creation date     : 11-Mar-2025
# Last modification : 17-Oct-2026
# -----------------------------------------------------------------------------

from   dataclasses import dataclass, field
from   typing      import Optional, Tuple
import numpy

from .        import logger
from .errors  import RegionOccupied, InvalidConfig, InvalidAction
from .model   import LandUseType, PLAYER_ROLES, land_use
from .metrics import EssentialServiceSet, service_accessibility, ecological_coverage, SAMPLING_CENTROID

__doc__ = """
The deterministic solver. A greedy phase lets each player (a non-residential
role with a move limit) claim, round after round, the open region that
raises the layout fitness the most. A genetic algorithm then refines that
layout: every generation keeps the `k` fittest layouts and fills the rest of
the population with mutated copies of tournament-selected parents, a
mutation being a handful of random role swaps.

Randomness is drawn from generators seeded with `(rng_seed, generation,
member)` so that a run only depends on its configuration.
"""

logging = logger("solver")

PLATEAU_TOLERANCE = 1e-9

# -----------------------------------------------------------------------------
#
# TYPES
#
# -----------------------------------------------------------------------------

@dataclass
class Player:

	role      : LandUseType
	moveLimit : int

	def __post_init__( self ):
		self.role = land_use(self.role)
		if self.role in (LandUseType.Residential, LandUseType.Unassigned, LandUseType.VacantLand):
			raise InvalidConfig("{0} cannot be a player role".format(self.role.value))
		if self.moveLimit < 0:
			raise InvalidConfig("Move limit of {0} must be non-negative, got {1}".format(self.role.value, self.moveLimit))

@dataclass(frozen=True)
class GAConfig:

	populationSize     : int                     = 20
	generations        : int                     = 50
	eliteCount         : int                     = 4
	swapsPerMutation   : int                     = 2
	tournamentSize     : int                     = 3
	wService           : float                   = 0.5
	wEcology           : float                   = 0.5
	rngSeed            : int                     = 0
	plateauGenerations : Optional[int]           = None
	frozen             : Tuple[LandUseType, ...] = (LandUseType.Residential,)
	services           : EssentialServiceSet     = field(default_factory=EssentialServiceSet)
	sampling           : str                     = SAMPLING_CENTROID

	def __post_init__( self ):
		self.validate()

	def validate( self ):
		if self.populationSize < 1:
			raise InvalidConfig("Population size must be at least 1, got {0}".format(self.populationSize))
		if not 1 <= self.eliteCount <= self.populationSize:
			raise InvalidConfig("Elite count must be within [1, {0}], got {1}".format(self.populationSize, self.eliteCount))
		if self.generations < 0:
			raise InvalidConfig("Generations must be non-negative, got {0}".format(self.generations))
		if self.swapsPerMutation < 1:
			raise InvalidConfig("Swaps per mutation must be at least 1, got {0}".format(self.swapsPerMutation))
		if self.tournamentSize < 2:
			raise InvalidConfig("Tournament size must be at least 2, got {0}".format(self.tournamentSize))
		if self.wService < 0 or self.wEcology < 0 or abs(self.wService + self.wEcology - 1.0) > 1e-12:
			raise InvalidConfig("Fitness weights must be non-negative and sum to 1, got ({0}, {1})".format(self.wService, self.wEcology))
		if self.rngSeed < 0:
			raise InvalidConfig("The RNG seed must be non-negative, got {0}".format(self.rngSeed))
		if self.plateauGenerations is not None and self.plateauGenerations < 1:
			raise InvalidConfig("Plateau generations must be at least 1, got {0}".format(self.plateauGenerations))
		return self

class Population:

	def __init__( self, layouts ):
		self.layouts = list(layouts)

	def __len__( self ):
		return len(self.layouts)

	def __iter__( self ):
		return iter(self.layouts)

	def __getitem__( self, index ):
		return self.layouts[index]

class FitnessTrace:
	"""Best and mean fitness of every evaluated generation."""

	HEADER = "generation,best,mean"

	def __init__( self ):
		self.rows = []

	def record( self, generation, fitnesses ):
		self.rows.append((generation, max(fitnesses), sum(fitnesses) / len(fitnesses)))
		return self

	def best( self ):
		return [_[1] for _ in self.rows]

	def toCSV( self ):
		return "\n".join([self.HEADER] + ["{0},{1!r},{2!r}".format(*_) for _ in self.rows]) + "\n"

	def save( self, path ):
		with open(path, "w") as f:
			f.write(self.toCSV())
		return path

def rng_for( cfg, generation, member ):
	"""The generator of one population slot: a pure function of the seed,
	the generation (0 for initialization) and the member index."""
	return numpy.random.default_rng([cfg.rngSeed, generation, member])

# -----------------------------------------------------------------------------
#
# FITNESS
#
# -----------------------------------------------------------------------------

def fitness( layout, cfg ):
	res = 0.0
	if cfg.wService:
		res += cfg.wService * service_accessibility(layout, cfg.services, cfg.sampling)
	if cfg.wEcology:
		res += cfg.wEcology * ecological_coverage(layout, cfg.sampling)
	return res

def calculate_return( state, regionID, player, cfg, base=None ):
	"""The fitness gained by assigning `regionID` to the player's role.
	`base` is the fitness of `state` when the caller already knows it."""
	role = state.roleOf(regionID)
	if not role.isOpen():
		raise RegionOccupied("{0} already holds {1}".format(regionID, role.value))
	if player.moveLimit <= 0:
		raise InvalidAction("{0} has no move left".format(player.role.value))
	base = fitness(state, cfg) if base is None else base
	return fitness(state.withRoles({regionID:player.role}), cfg) - base

# -----------------------------------------------------------------------------
#
# GREEDY PHASE
#
# -----------------------------------------------------------------------------

def greedy_assign( state0, players, cfg=None, trace=None ):
	"""Round-robin over `players` in the given order: each player with moves
	left claims the open region of highest return, ties going to the lowest
	id. Stops when no open region remains or every limit is spent. Player
	limits are left untouched; `trace` receives `(role, region, return)`
	for every claim."""
	if not players:
		raise InvalidConfig("The greedy phase needs at least one player")
	cfg    = cfg or GAConfig()
	state  = state0.copy()
	left   = [Player(_.role, _.moveLimit) for _ in players]
	opened = state.idsWithRole(LandUseType.Unassigned, LandUseType.VacantLand)
	while opened and any(_.moveLimit > 0 for _ in left):
		for player in left:
			if player.moveLimit == 0:
				continue
			if not opened:
				break
			base = fitness(state, cfg)
			best, gain = None, None
			for r in opened:
				g = calculate_return(state, r, player, cfg, base)
				if gain is None or g > gain:
					best, gain = r, g
			state.assignment[best] = player.role
			opened.remove(best)
			player.moveLimit -= 1
			if trace is not None:
				trace.append((player.role, best, gain))
	return state

# -----------------------------------------------------------------------------
#
# GENETIC ALGORITHM
#
# -----------------------------------------------------------------------------

def mutable_regions( layout, cfg ):
	return [_ for _ in layout.ids if layout.assignment[_] not in cfg.frozen]

def mutate( layout, rng, cfg ):
	"""Swaps the roles of `swapsPerMutation` random pairs of distinct
	mutable regions. With fewer than two mutable regions the layout is
	returned unchanged."""
	res     = layout.copy()
	regions = mutable_regions(layout, cfg)
	if len(regions) < 2:
		return res
	for _ in range(cfg.swapsPerMutation):
		i, j = rng.choice(len(regions), size=2, replace=False)
		a, b = regions[int(i)], regions[int(j)]
		res.assignment[a], res.assignment[b] = res.assignment[b], res.assignment[a]
	return res

def initialize_population( seed, cfg ):
	"""The seed layout followed by `N - 1` mutations of it."""
	cfg.validate()
	return Population([seed.copy()] + [mutate(seed, rng_for(cfg, 0, i), cfg) for i in range(1, cfg.populationSize)])

def rank( fitnesses ):
	"""Member indices by decreasing fitness, ties by insertion index."""
	return sorted(range(len(fitnesses)), key=lambda i:(-fitnesses[i], i))

def tournament( fitnesses, rng, size ):
	"""Index of the fittest of `size` distinct random members."""
	size    = min(size, len(fitnesses))
	players = [int(_) for _ in rng.choice(len(fitnesses), size=size, replace=False)]
	return min(players, key=lambda i:(-fitnesses[i], i))

def evolve( population, cfg, trace=None ):
	"""Runs the generations and returns the fittest layout of the final
	population (lowest index on ties)."""
	if not len(population):
		raise InvalidConfig("Cannot evolve an empty population")
	cfg.validate()
	layouts   = list(population)
	fitnesses = [fitness(_, cfg) for _ in layouts]
	best      = max(fitnesses)
	stale     = 0
	done      = 0
	k         = min(cfg.eliteCount, len(layouts))
	for g in range(cfg.generations):
		done = g + 1
		if trace is not None:
			trace.record(g, fitnesses)
		order    = rank(fitnesses)
		elites   = [layouts[_] for _ in order[:k]]
		children = []
		for slot in range(k, len(layouts)):
			rng    = rng_for(cfg, g + 1, slot)
			parent = layouts[tournament(fitnesses, rng, cfg.tournamentSize)]
			children.append(mutate(parent, rng, cfg))
		layouts   = elites + children
		fitnesses = [fitnesses[_] for _ in order[:k]] + [fitness(_, cfg) for _ in children]
		current   = max(fitnesses)
		if current > best + PLATEAU_TOLERANCE:
			best, stale = current, 0
		else:
			stale += 1
		if cfg.plateauGenerations and stale >= cfg.plateauGenerations:
			logging.info("Fitness plateaued at {0:.6f} after {1} generations".format(best, g + 1))
			break
	if trace is not None:
		trace.record(done, fitnesses)
	return layouts[rank(fitnesses)[0]]

def optimize( state0, players, cfg, trace=None ):
	"""Greedy assignment followed by the genetic refinement."""
	greedy = greedy_assign(state0, players, cfg)
	logging.info("Greedy layout fitness {0:.6f}".format(fitness(greedy, cfg)))
	res    = evolve(initialize_population(greedy, cfg), cfg, trace)
	logging.info("Optimized layout fitness {0:.6f}".format(fitness(res, cfg)))
	return res

# -----------------------------------------------------------------------------
#
# STAGE HELPERS
#
# -----------------------------------------------------------------------------

def players_from_layout( layout, roles=PLAYER_ROLES, limits=None ):
	"""One player per role, its move limit being `limits[role]` or else the
	number of regions holding that role in `layout`."""
	counts = layout.roleCounts()
	limits = dict((land_use(k), v) for k, v in (limits or {}).items())
	return [Player(_, int(limits.get(_, counts.get(_, 0)))) for _ in roles]

def prepare_initial_state( layout, players ):
	"""S₀: the layout with every region of a player role unassigned."""
	roles = set(_.role for _ in players)
	return layout.withRoles(dict((_, LandUseType.Unassigned) for _ in layout.ids if layout.assignment[_] in roles))

def release_unassigned( layout ):
	"""Regions no player claimed become vacant land."""
	return layout.withRoles(dict((_, LandUseType.VacantLand) for _ in layout.idsWithRole(LandUseType.Unassigned)))

# EOF - vim: ts=4 sw=4 noet
