#!/usr/bin/env python
# encoding=utf8 ---------------------------------------------------------------
# Project           : UrbanForge
# -----------------------------------------------------------------------------
# Author            : UrbanForge contributors
# License           : BSD License
# -----------------------------------------------------------------------------
# Creation date     : 07-Apr-2025
# Last modification : 17-Oct-2026
# -----------------------------------------------------------------------------

import sys, os, json, math, tempfile, unittest, warnings
from   dataclasses   import replace
from   unittest.mock import patch
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
import numpy
from fixtures import T, region, layout_of, random_layout, quadrant_masks
from urbanforge.errors  import NoResidents, NoFacilityOfType, InvalidConfig
from urbanforge.model   import ScaleConfig, CityLayout, default_roles
from urbanforge.metrics import *

__doc__ = """
The three metrics against a direct brute-force reading of their
definitions, plus the reporting helpers.
"""

# -----------------------------------------------------------------------------
#
# BRUTE FORCE
#
# -----------------------------------------------------------------------------

def _within( layout, resident, role, radius, inclusive=False ):
	x, y = layout.region(resident).centroid
	for k in sorted(layout.assignment):
		if layout.assignment[k] is role:
			fx, fy = layout.region(k).centroid
			d = float(numpy.hypot(fx - x, fy - y)) * layout.scale.metersPerPixel
			if (d <= radius) if inclusive else (d < radius):
				return True
	return False

def _residents( layout ):
	return sorted(k for k, v in layout.assignment.items() if v is T.Residential)

def brute_service( layout, services=DEFAULT_SERVICES ):
	total = 0.0
	res   = _residents(layout)
	for r in res:
		total += sum(1 for t in services if _within(layout, r, t, layout.scale.serviceRadius)) / len(services)
	return total / len(res)

def brute_ecology( layout ):
	total = 0.0
	res   = _residents(layout)
	for r in res:
		total += 1.0 if _within(layout, r, T.ParkAndOpenSpace, layout.scale.ecologyRadius, inclusive=True) else 0.0
	return total / len(res)

def brute_satisfaction( layout, roles, masks ):
	total, count = 0.0, 0
	for r in _residents(layout):
		x, y = layout.region(r).centroid
		kind = None
		for k, m in masks.items():
			px, py = int(math.floor(x)), int(math.floor(y))
			if 0 <= px < m.width and 0 <= py < m.height and m.bits[py][px]:
				kind = k
				break
		if kind is None:
			continue
		needs  = roles[kind].needs
		total += sum(1 for t in needs if _within(layout, r, t, layout.scale.satisfactionRadius)) / len(needs)
		count += 1
	return total / count

# -----------------------------------------------------------------------------
#
# TESTS
#
# -----------------------------------------------------------------------------

class TestOracle(unittest.TestCase):

	def testRandomLayouts( self ):
		"""Every metric equals its brute-force reading exactly on seeded
		random layouts of up to 50 regions."""
		roles = default_roles()
		masks = quadrant_masks()
		for seed in range(100):
			layout = random_layout(seed)
			self.assertEqual(service_accessibility(layout), brute_service(layout), "seed {0}".format(seed))
			self.assertEqual(ecological_coverage(layout), brute_ecology(layout), "seed {0}".format(seed))
			with warnings.catch_warnings():
				warnings.simplefilter("ignore")
				self.assertEqual(satisfaction(layout, roles, masks), brute_satisfaction(layout, roles, masks), "seed {0}".format(seed))

class TestMetrics(unittest.TestCase):

	def testFullyServed( self ):
		layout = layout_of((
			("Residential-00001", T.Residential, 0, 0),
			("Educational-00001", T.Educational, 1, 0),
			("Hospital-00001", T.Hospital, 0, 1),
			("Business-00001", T.Business, 1, 1),
			("ShopsAndMarket-00001", T.ShopsAndMarket, 2, 0),
			("ParkAndOpenSpace-00001", T.ParkAndOpenSpace, 0, 2),
		))
		report = Evaluator().report(layout, "stage1")
		self.assertEqual((report.service, report.ecology, report.satisfaction), (1.0, 1.0, 1.0))
		self.assertEqual(report.toCSV(), "stage1,1.000,1.000,1.000")

	def testNoFacilities( self ):
		layout = layout_of((("Residential-00001", T.Residential, 0, 0), ("VacantLand-00001", T.VacantLand, 1, 0)))
		self.assertEqual(Evaluator().report(layout, "stage1").toCSV(), "stage1,0.000,0.000,0.000")

	def testRadiusBoundaries( self ):
		"""Service and satisfaction exclude the radius, ecology includes it."""
		scale  = ScaleConfig(metersPerPixel=100.0)
		layout = layout_of((
			("Residential-00001", T.Residential, 0, 0),
			("Hospital-00001", T.Hospital, 5, 0),
			("ParkAndOpenSpace-00001", T.ParkAndOpenSpace, 3, 0),
		), scale=scale)
		self.assertEqual(service_accessibility(layout, EssentialServiceSet((T.Hospital, T.ParkAndOpenSpace))), 0.5)
		self.assertEqual(ecological_coverage(layout), 1.0)

	def testHalfServed( self ):
		"""One of two residents reaches every service: 0.5."""
		layout = layout_of((
			("Residential-00001", T.Residential, 0, 0),
			("Residential-00002", T.Residential, 900, 0),
			("Educational-00001", T.Educational, 1, 0),
			("Hospital-00001", T.Hospital, 0, 1),
			("Business-00001", T.Business, 1, 1),
			("ShopsAndMarket-00001", T.ShopsAndMarket, 2, 0),
			("ParkAndOpenSpace-00001", T.ParkAndOpenSpace, 0, 2),
		))
		self.assertEqual(service_accessibility(layout), 0.5)

	def testNoResidents( self ):
		layout = layout_of((("Hospital-00001", T.Hospital, 0, 0),))
		for f in (service_accessibility, ecological_coverage):
			with self.assertRaises(NoResidents):
				f(layout)
		with self.assertRaises(NoResidents):
			satisfaction(layout, default_roles())

	def testOrphansAreLeftOut( self ):
		"""Residents outside every sub-region do not count; with none inside,
		satisfaction is undefined."""
		layout = layout_of((
			("Residential-00001", T.Residential, 1, 1),
			("Residential-00002", T.Residential, 100, 100),
			("Business-00001", T.Business, 2, 1),
		))
		roles  = default_roles()
		masks  = quadrant_masks()
		with warnings.catch_warnings():
			warnings.simplefilter("ignore")
			self.assertEqual(satisfaction(layout, roles, masks), 1.0 / 3)
			with self.assertRaises(NoResidents):
				satisfaction(layout.withRoles({"Residential-00001":T.VacantLand}), roles, masks)

	def testMembershipFollowsGeometry( self ):
		"""Layouts with the same ids but moved residents get their own
		sub-region membership from a shared evaluator."""
		masks     = quadrant_masks()
		evaluator = Evaluator(roles=default_roles(), subregions=masks)
		keys      = list(masks)
		for (x, y), kind in zip(((4, 4), (50, 4), (4, 50), (50, 50)), keys):
			layout = layout_of((("Residential-00001", T.Residential, x, y), ("Hospital-00001", T.Hospital, 60, 60)))
			self.assertEqual(evaluator.membership(layout), [kind])
			self.assertEqual(evaluator.membership(layout.copy()), [kind])

	def testOrphanWarning( self ):
		layout = layout_of((
			("Residential-00001", T.Residential, 1, 1),
			("Residential-00002", T.Residential, 100, 100),
		))
		with patch("urbanforge.metrics.logging") as log:
			satisfaction(layout, default_roles(), quadrant_masks())
		self.assertEqual(log.warning.call_count, 1)
		with patch("urbanforge.metrics.logging") as log:
			satisfaction(layout, default_roles(), quadrant_masks(), warnOrphans=False)
		log.warning.assert_not_called()

	def testMinDistance( self ):
		self.assertEqual(min_distance((0, 0), [(3, 4), (6, 8)], ScaleConfig(metersPerPixel=2.0)), 10.0)
		with self.assertRaises(NoFacilityOfType):
			min_distance((0, 0), [], ScaleConfig())

	def testBounds( self ):
		for seed in range(20):
			layout = random_layout(seed)
			for v in (service_accessibility(layout), ecological_coverage(layout), satisfaction(layout, default_roles())):
				assert 0.0 <= v <= 1.0

	def testAreaSampling( self ):
		"""With area sampling residents weigh their region's area."""
		layout = layout_of((
			("Residential-00001", T.Residential, 0, 0, 30),
			("Residential-00002", T.Residential, 2000, 0, 10),
			("ParkAndOpenSpace-00001", T.ParkAndOpenSpace, 1, 0),
		))
		self.assertEqual(ecological_coverage(layout), 0.5)
		self.assertEqual(ecological_coverage(layout, SAMPLING_AREA), 0.75)
		with self.assertRaises(InvalidConfig):
			ecological_coverage(layout, "pixels")

	def testServiceSet( self ):
		with self.assertRaises(InvalidConfig):
			EssentialServiceSet(())
		with self.assertRaises(InvalidConfig):
			EssentialServiceSet((T.Residential,))

def shifted( layout, dx, dy ):
	regions = [region(r.id, r.landUse, r.centroid[0] + dx, r.centroid[1] + dy, r.areaPx) for r in layout.regions]
	return CityLayout(regions, assignment=dict(layout.assignment), scale=layout.scale)

def rescaled( layout, factor ):
	s = layout.scale
	scale = replace(s,
		metersPerPixel     = s.metersPerPixel * factor,
		serviceRadius      = s.serviceRadius * factor,
		ecologyRadius      = s.ecologyRadius * factor,
		satisfactionRadius = s.satisfactionRadius * factor,
	)
	return CityLayout(list(layout.regions), assignment=dict(layout.assignment), scale=scale)

def scores( layout ):
	report = Evaluator().report(layout)
	return (report.service, report.ecology, report.satisfaction)

class TestInvariance(unittest.TestCase):

	def testTranslation( self ):
		for seed in range(30):
			layout = random_layout(seed)
			dx, dy = (seed % 7) - 3, 2 * (seed % 5)
			self.assertEqual(scores(shifted(layout, dx, dy)), scores(layout), "seed {0}".format(seed))

	def testScale( self ):
		"""Doubling the pixel size together with every radius changes nothing."""
		for seed in range(30):
			layout = random_layout(seed)
			self.assertEqual(scores(rescaled(layout, 2.0)), scores(layout), "seed {0}".format(seed))

	def testNewFacilitiesNeverHurt( self ):
		"""Turning vacant land into a service never lowers service, into a
		park never lowers ecology."""
		for seed in range(30):
			layout = random_layout(seed)
			before = scores(layout)
			for k in layout.idsWithRole(T.VacantLand):
				for t in DEFAULT_SERVICES:
					after = scores(layout.withRoles({k:t}))
					self.assertGreaterEqual(after[0], before[0], "seed {0} {1}".format(seed, t.value))
				after = scores(layout.withRoles({k:T.ParkAndOpenSpace}))
				self.assertGreaterEqual(after[1], before[1], "seed {0}".format(seed))

class TestReports(unittest.TestCase):

	def testCSV( self ):
		reports = [MetricsReport(0.5, 0.25, 0.125, "stage1"), MetricsReport(1.0, 0.0, 1.0 / 3, "stage2")]
		with tempfile.TemporaryDirectory() as d:
			path = os.path.join(d, "metrics.csv")
			write_reports_csv(path, reports[:1])
			write_reports_csv(path, reports[1:])
			self.assertEqual(open(path).read(), "stage,service,ecology,satisfaction\nstage1,0.500,0.250,0.125\nstage2,1.000,0.000,0.333\n")

	def testJSON( self ):
		reports = [MetricsReport(0.5, 0.25, 0.125, "before"), MetricsReport(1.0, 0.0, 1.0 / 3, "after")]
		self.assertEqual(json.loads(reports[0].toJSON()), {"stage":"before", "service":0.5, "ecology":0.25, "satisfaction":0.125})
		with tempfile.TemporaryDirectory() as d:
			path  = write_reports_json(os.path.join(d, "metrics.jsonl"), reports)
			lines = [json.loads(_) for _ in open(path)]
		self.assertEqual([_["stage"] for _ in lines], ["before", "after"])
		self.assertEqual(lines[1]["satisfaction"], 1.0 / 3)

	def testTable( self ):
		table = format_table([MetricsReport(0.5, 0.25, 0.125, "stage1")]).split("\n")
		assert table[0].startswith("Metrics")
		assert table[2].startswith("Service") and table[2].endswith("0.500")
		self.assertEqual(len(table), 5)

if __name__ == "__main__":
	unittest.main()

# EOF - vim: ts=4 sw=4 noet
