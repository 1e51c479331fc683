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

import sys, os, json, tempfile, unittest
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
from fixtures import T, layout_of, random_layout
from urbanforge.errors import InvalidConfig, NotALegendType, UnknownRegion, InvalidAction
from urbanforge.model  import *

__doc__ = """
Land-use types, layouts, edit actions and their validation against the
minimal-change policy, and the inventory/layout JSON files.
"""

def small_layout():
	return layout_of((
		("Residential-00001", T.Residential,      2,  2),
		("VacantLand-00001",  T.VacantLand,       5,  2),
		("VacantLand-00002",  T.VacantLand,       9,  2),
		("Hospital-00001",    T.Hospital,         2,  6),
		("ParkAndOpenSpace-00001", T.ParkAndOpenSpace, 9, 9),
	))

# -----------------------------------------------------------------------------
#
# TYPES
#
# -----------------------------------------------------------------------------

class TestLandUse(unittest.TestCase):

	def testLegend( self ):
		self.assertEqual(len(LEGEND), 9)
		self.assertEqual(legend_color(T.Hospital), (255, 190, 190))
		self.assertEqual(len(set(LEGEND.values())), 9)

	def testSentinelHasNoColor( self ):
		with self.assertRaises(NotALegendType):
			legend_color(T.Unassigned)
		assert not T.Unassigned.isLegend()
		assert T.Unassigned.isOpen() and T.VacantLand.isOpen()
		assert not T.Hospital.isOpen()

	def testParseNames( self ):
		self.assertIs(land_use("ShopsAndMarket"), T.ShopsAndMarket)
		self.assertIs(land_use("None"), T.Unassigned)
		with self.assertRaises(InvalidConfig):
			land_use("Casino")

	def testPlayerRoles( self ):
		assert T.Residential not in PLAYER_ROLES
		assert T.VacantLand not in PLAYER_ROLES
		self.assertEqual(len(PLAYER_ROLES), 7)

class TestScale(unittest.TestCase):

	def testDefaults( self ):
		s = ScaleConfig()
		self.assertEqual((s.serviceRadius, s.ecologyRadius, s.satisfactionRadius), (500.0, 300.0, 800.0))
		self.assertEqual(ScaleConfig.FromDict(s.asDict()), s)

	def testStrictlyPositive( self ):
		with self.assertRaises(InvalidConfig):
			ScaleConfig(metersPerPixel=0)
		with self.assertRaises(InvalidConfig):
			ScaleConfig(serviceRadius=-1)

class TestDemographics(unittest.TestCase):

	def testDefaultRoles( self ):
		roles = default_roles()
		self.assertEqual(list(roles), list(DEMOGRAPHIC_ORDER))
		self.assertEqual(roles[Demographic.Residential].needs[0], T.Hospital)

	def testOverride( self ):
		roles = default_roles({"Industrial":["Business", "Hospital", "PublicUtilities"]})
		self.assertEqual(roles[Demographic.Industrial].needs, (T.Business, T.Hospital, T.PublicUtilities))

	def testNeedCount( self ):
		"""Roles carry 3 to 5 distinct needs."""
		with self.assertRaises(InvalidConfig):
			DemographicRole(Demographic.Commercial, (T.Business, T.Hospital))
		with self.assertRaises(InvalidConfig):
			DemographicRole(Demographic.Commercial, (T.Business, T.Business, T.Hospital))
		with self.assertRaises(InvalidConfig):
			default_roles({"Tourist":["Business", "Hospital", "PublicUtilities"]})

# -----------------------------------------------------------------------------
#
# LAYOUT
#
# -----------------------------------------------------------------------------

class TestCityLayout(unittest.TestCase):

	def testAssignmentCoversInventory( self ):
		layout = small_layout()
		with self.assertRaises(InvalidConfig):
			CityLayout(layout.regions, assignment={"Residential-00001":T.Residential})
		with self.assertRaises(InvalidConfig):
			CityLayout(layout.regions, assignment=dict(layout.assignment, Ghost=T.Hospital))

	def testAscendingIds( self ):
		layout = small_layout()
		self.assertEqual(list(layout.ids), sorted(layout.ids))
		self.assertEqual(layout.idsWithRole(T.VacantLand), ["VacantLand-00001", "VacantLand-00002"])

	def testCopySharesGeometry( self ):
		layout = small_layout()
		copy   = layout.copy()
		copy.assignment["VacantLand-00001"] = T.Business
		self.assertIs(copy.geometry, layout.geometry)
		self.assertIs(layout.roleOf("VacantLand-00001"), T.VacantLand)
		self.assertNotEqual(copy, layout)

	def testUnknownRegion( self ):
		with self.assertRaises(UnknownRegion):
			small_layout().region("Nowhere")

	def testDistances( self ):
		g = small_layout().geometry
		d = g.distances()
		self.assertEqual(d.shape, (5, 5))
		self.assertEqual(d[0][0], 0.0)
		self.assertEqual(d[g.index["Residential-00001"]][g.index["VacantLand-00001"]], 3.0)

# -----------------------------------------------------------------------------
#
# ACTIONS
#
# -----------------------------------------------------------------------------

class TestActions(unittest.TestCase):

	def setUp( self ):
		self.layout = small_layout()
		self.policy = ChangePolicy(budget=2)

	def reason( self, action, position=0 ):
		r = validate_action(self.layout, action, self.policy, position)
		return r.reason if r else None

	def testValidReassign( self ):
		a = LayoutAction.Reassign("VacantLand-00001", T.Educational)
		self.assertIsNone(self.reason(a))
		after = apply_action(self.layout, a)
		self.assertIs(after.roleOf("VacantLand-00001"), T.Educational)
		self.assertIs(self.layout.roleOf("VacantLand-00001"), T.VacantLand)

	def testRejections( self ):
		self.assertIs(self.reason(LayoutAction.Reassign("Nowhere", T.Hospital)), RejectionReason.UnknownRegion)
		self.assertIs(self.reason(LayoutAction.Reassign("Hospital-00001", T.Business)), RejectionReason.NotVacant)
		self.assertIs(self.reason(LayoutAction.Reassign("Residential-00001", T.Business)), RejectionReason.ProtectedRole)
		self.assertIs(self.reason(LayoutAction.Reassign("VacantLand-00001", T.ParkAndOpenSpace)), RejectionReason.ProtectedRole)
		self.assertIs(self.reason(LayoutAction.Reassign("VacantLand-00001", T.VacantLand)), RejectionReason.InvalidAction)
		self.assertIs(self.reason(LayoutAction.Reassign("VacantLand-00001", T.Unassigned)), RejectionReason.InvalidAction)
		self.assertIs(self.reason(LayoutAction.Swap("Hospital-00001", "Hospital-00001")), RejectionReason.InvalidAction)
		self.assertIs(self.reason(LayoutAction.Swap("Hospital-00001", "ParkAndOpenSpace-00001")), RejectionReason.ProtectedRole)

	def testBudget( self ):
		a = LayoutAction.Reassign("VacantLand-00001", T.Educational)
		self.assertIsNone(self.reason(a, 1))
		self.assertIs(self.reason(a, 2), RejectionReason.BudgetExceeded)

	def testValidationNeverMutates( self ):
		before = dict(self.layout.assignment)
		for a in (LayoutAction.Swap("Hospital-00001", "VacantLand-00002"), LayoutAction.Reassign("Nowhere", T.Hospital)):
			validate_action(self.layout, a, self.policy)
		self.assertEqual(self.layout.assignment, before)

	def testSwapInverse( self ):
		"""A swap followed by its inverse restores the layout, roles being a
		permutation in between."""
		for seed in range(20):
			layout = random_layout(seed, count=10)
			a, b   = layout.ids[1], layout.ids[-1]
			s      = LayoutAction.Swap(a, b)
			after  = apply_action(layout, s)
			self.assertEqual(after.roleCounts(), layout.roleCounts())
			self.assertEqual(apply_action(after, s.inverse()), layout)

	def testApplyErrors( self ):
		with self.assertRaises(UnknownRegion):
			apply_action(self.layout, LayoutAction.Swap("Hospital-00001", "Nowhere"))
		with self.assertRaises(InvalidAction):
			apply_action(self.layout, LayoutAction.Swap("Hospital-00001", "Hospital-00001"))

	def testWireForm( self ):
		self.assertEqual(dict(LayoutAction.Reassign("VacantLand-00001", "Hospital").asDict()), {"kind":"reassign", "target":"VacantLand-00001", "new_type":"Hospital"})
		self.assertEqual(dict(LayoutAction.Swap("a", "b").asDict()), {"kind":"swap", "target":"a", "other":"b"})

# -----------------------------------------------------------------------------
#
# FILES
#
# -----------------------------------------------------------------------------

class TestFiles(unittest.TestCase):

	def testLayoutFile( self ):
		layout = small_layout().withRoles({"VacantLand-00002":T.Unassigned})
		with tempfile.TemporaryDirectory() as d:
			path = save_layout(layout, os.path.join(d, "layout.json"))
			data = json.load(open(path))
			self.assertEqual(data["assignment"]["VacantLand-00002"], "None")
			self.assertEqual(load_layout(path), layout)
			text = open(path).read()
			save_layout(load_layout(path), path)
			self.assertEqual(open(path).read(), text)

	def testInventoryFile( self ):
		layout = small_layout()
		with tempfile.TemporaryDirectory() as d:
			path = save_inventory(layout, os.path.join(d, "inventory.json"))
			assert "assignment" not in json.load(open(path))
			self.assertEqual(load_inventory(path), layout)

	def testUnreadable( self ):
		with tempfile.TemporaryDirectory() as d:
			path = os.path.join(d, "broken.json")
			open(path, "w").write("{\"regions\": [")
			with self.assertRaises(InvalidConfig):
				load_layout(path)
			with self.assertRaises(InvalidConfig):
				load_layout(os.path.join(d, "missing.json"))

if __name__ == "__main__":
	unittest.main()

# EOF - vim: ts=4 sw=4 noet
