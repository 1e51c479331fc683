#!/usr/bin/env python
# encoding=utf8 ---------------------------------------------------------------
# Project           : UrbanForge
# -----------------------------------------------------------------------------
# Author            : UrbanForge contributors
# License           : BSD License
# -----------------------------------------------------------------------------
# Creation date     : 02-Apr-2025
# Last modification : 17-Oct-2026
# -----------------------------------------------------------------------------

import sys, os, math, collections
sys.path.insert(0, os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "src", "python"))
import numpy, yaml
from urbanforge.model  import LandUseType, LEGEND_TYPES, Region, CityLayout, ScaleConfig, DEMOGRAPHIC_ORDER, land_use
from urbanforge.ingest import BinaryMask, render_annotated, disk_radius

__doc__ = """
Synthetic cities shared by the test suites: hand-placed toy layouts, seeded
random layouts, non-overlapping disk maps and the 64×64 quadrant city the
pipeline runs on.
"""

T = LandUseType

# -----------------------------------------------------------------------------
#
# TOY LAYOUTS
#
# -----------------------------------------------------------------------------

def region( regionID, landUse, x, y, area=21 ):
	return Region(regionID, land_use(landUse), area, (float(x), float(y)))

def layout_of( specs, scale=None, assignment=None ):
	"""Builds a layout from `(id, type, x, y)` or `(id, type, x, y, area)`
	tuples."""
	return CityLayout([region(*_) for _ in specs], assignment=assignment, scale=scale or ScaleConfig())

def numbered( specs ):
	"""Gives `(type, x, y)` specs ingestion-style ids."""
	counts = collections.Counter()
	res    = []
	for t, x, y in specs:
		t = land_use(t)
		counts[t] += 1
		res.append(("{0}-{1:05d}".format(t.value, counts[t]), t, x, y))
	return res

# -----------------------------------------------------------------------------
#
# RANDOM LAYOUTS
#
# -----------------------------------------------------------------------------

def random_layout( seed, count=None, size=64, types=LEGEND_TYPES, scale=None ):
	"""A seeded layout of up to 50 regions at random float centroids, with
	at least one resident."""
	rng   = numpy.random.default_rng(seed)
	count = count or int(rng.integers(2, 51))
	specs = []
	for i in range(count):
		t = T.Residential if i == 0 else types[int(rng.integers(0, len(types)))]
		x, y = rng.uniform(0, size, 2)
		specs.append((t, float(x), float(y)))
	ids   = numbered(specs)
	scale = scale or ScaleConfig(metersPerPixel=float(rng.choice([10.0, 20.0, 30.0])))
	return CityLayout([region(i, t, x, y, int(rng.integers(1, 80))) for i, t, x, y in ids], scale=scale)

def quadrant_masks( size=64 ):
	"""Industrial, Educational, Commercial and Residential masks covering
	the top-left, top-right, bottom-left and bottom-right quadrants."""
	half = size // 2
	res  = collections.OrderedDict()
	for kind, (x0, y0) in zip(DEMOGRAPHIC_ORDER, ((0, 0), (half, 0), (0, half), (half, half))):
		bits = numpy.zeros((size, size), dtype=bool)
		bits[y0:y0 + half, x0:x0 + half] = True
		res[kind] = BinaryMask(bits)
	return res

def random_mask( rng, width, height, density=0.5 ):
	return BinaryMask(rng.random((height, width)) < density)

# -----------------------------------------------------------------------------
#
# DISK MAPS
#
# -----------------------------------------------------------------------------

def random_disks( seed, size=64, attempts=200, maxCount=12 ):
	"""Non-overlapping disks with integer centroids, separated enough that
	two disks never touch. Returns a layout whose regions are the disks."""
	rng   = numpy.random.default_rng(seed)
	disks = []
	for _ in range(attempts):
		if len(disks) >= maxCount:
			break
		area = int(rng.integers(10, 60))
		r    = disk_radius(area)
		m    = int(math.ceil(r)) + 1
		if size - 2 * m <= 0:
			continue
		x, y = int(rng.integers(m, size - m)), int(rng.integers(m, size - m))
		if all(math.hypot(x - ox, y - oy) > r + orr + 2 for ox, oy, orr, _, _ in disks):
			disks.append((x, y, r, area, LEGEND_TYPES[int(rng.integers(0, len(LEGEND_TYPES)))]))
	ids = numbered([(t, x, y) for x, y, _, _, t in disks])
	return CityLayout([region(i, t, x, y, a) for (i, t, x, y), (_, _, _, a, _) in zip(ids, disks)])

# -----------------------------------------------------------------------------
#
# QUADRANT CITY
#
# -----------------------------------------------------------------------------

CITY_SIZE         = 64
CITY_SCALE        = ScaleConfig(metersPerPixel=60.0)
CORNER_RESIDENTS  = ((4, 4), (10, 4), (4, 10))
CORNER_VACANT     = ((10, 10), (16, 4), (4, 16))
CENTER_FACILITIES = (
	(T.Business,          26, 26),
	(T.PublicUtilities,   32, 26),
	(T.ShopsAndMarket,    38, 26),
	(T.StateGovtProperty, 32, 32),
	(T.Educational,       26, 38),
	(T.Hospital,          32, 38),
	(T.ParkAndOpenSpace,  38, 38),
)

def _mirror( x, y, flipX, flipY ):
	return (CITY_SIZE - 1 - x if flipX else x, CITY_SIZE - 1 - y if flipY else y)

def quadrant_city():
	"""A 64×64 city of 31 regions: in every corner three residents and
	three vacant parcels, and one facility of every player role clustered
	around the center, too far from any resident to serve it."""
	specs = []
	for flipX, flipY in ((False, False), (True, False), (False, True), (True, True)):
		specs += [(T.Residential,) + _mirror(x, y, flipX, flipY) for x, y in CORNER_RESIDENTS]
		specs += [(T.VacantLand,)  + _mirror(x, y, flipX, flipY) for x, y in CORNER_VACANT]
	specs += list(CENTER_FACILITIES)
	return layout_of(numbered(specs), scale=CITY_SCALE)

def write_quadrant_city( directory, **overrides ):
	"""Writes the quadrant city map, its four masks and a pipeline
	configuration into `directory`. Returns the configuration path."""
	layout = quadrant_city()
	render_annotated(layout, (CITY_SIZE, CITY_SIZE)).save(os.path.join(directory, "map.png"))
	masks  = collections.OrderedDict()
	for kind, mask in quadrant_masks(CITY_SIZE).items():
		name = "{0}.png".format(kind.value.lower())
		mask.save(os.path.join(directory, name))
		masks[kind.value] = name
	config = {
		"map"      : "map.png",
		"masks"    : dict(masks),
		"min_area" : 8,
		"scale"    : dict(CITY_SCALE.asDict()),
		"ga"       : {"population_size":10, "generations":15, "elite_count":2, "rng_seed":7},
		"policy"   : {"budget":5},
		"planner"  : {"backend":"heuristic"},
		"output"   : "out",
	}
	config.update(overrides)
	path = os.path.join(directory, "urbanforge.yaml")
	with open(path, "w") as f:
		yaml.safe_dump(config, f, default_flow_style=False)
	return path

# EOF - vim: ts=4 sw=4 noet
