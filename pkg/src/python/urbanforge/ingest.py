#!/usr/bin/env python
# encoding=utf8 ---------------------------------------------------------------
# Project           : UrbanForge
# -----------------------------------------------------------------------------
# Author            : UrbanForge contributors
# License           : BSD License
# -----------------------------------------------------------------------------
# Creation date     : 05-Mar-2025
# Last modification : 17-Oct-2026
# -----------------------------------------------------------------------------

import math, collections
from   dataclasses import dataclass
from   typing      import Tuple
import numpy
from   scipy       import ndimage
from   PIL         import Image

from .       import logger
from .errors import AmbiguousLegend, MaskDimensionMismatch, RenderOutOfBounds, InvalidConfig
from .model  import LEGEND, LEGEND_TYPES, Region, CityLayout, ScaleConfig, legend_color

__doc__ = """
Turns a legend-colored thematic map into a region inventory: every pixel is
converted to HSV and matched against a window around each legend color, each
per-type mask is split into 4-connected components, and components above the
minimum area become regions with their area and centroid. Sub-region masks
then keep the regions whose centroid falls on a white mask pixel.

Pixel coordinates are `(x, y)` with `x` the column and `y` the row.
"""

logging = logger("ingest")

DEFAULT_TOLERANCE = (4.0, 0.08, 0.08)
DEFAULT_MIN_AREA  = 20
MASK_THRESHOLD    = 128
HUE_PERIOD        = 360.0
BACKGROUND        = (255, 255, 255)

# 4-connectivity, no diagonal bridges between parcels
CONNECTIVITY      = ndimage.generate_binary_structure(2, 1)

# -----------------------------------------------------------------------------
#
# RASTERS
#
# -----------------------------------------------------------------------------

class RasterImage:
	"""An 8-bit RGB image backed by a `(height, width, 3)` array."""

	def __init__( self, pixels ):
		pixels = numpy.asarray(pixels)
		if pixels.ndim != 3 or pixels.shape[2] != 3:
			raise InvalidConfig("RasterImage expects (height, width, 3) pixels, got {0}".format(pixels.shape))
		if pixels.dtype != numpy.uint8:
			if pixels.size and (pixels.min() < 0 or pixels.max() > 255):
				raise InvalidConfig("RasterImage channels must be within [0, 255]")
			pixels = pixels.astype(numpy.uint8)
		self.pixels = pixels

	@classmethod
	def Blank( cls, width, height, color=BACKGROUND ):
		pixels = numpy.empty((height, width, 3), dtype=numpy.uint8)
		pixels[:,:] = color
		return cls(pixels)

	@classmethod
	def Load( cls, path ):
		try:
			with Image.open(path) as image:
				return cls(numpy.array(image.convert("RGB"), dtype=numpy.uint8))
		except (OSError, ValueError) as e:
			raise InvalidConfig("Cannot read image {0}: {1}".format(path, e))

	@property
	def width( self ):
		return self.pixels.shape[1]

	@property
	def height( self ):
		return self.pixels.shape[0]

	@property
	def size( self ):
		return (self.width, self.height)

	def pixel( self, x, y ):
		return tuple(int(_) for _ in self.pixels[y, x])

	def save( self, path ):
		Image.fromarray(self.pixels, "RGB").save(path, format="PNG")
		return path

class BinaryMask:
	"""One boolean per pixel, `True` being white (valid)."""

	def __init__( self, bits ):
		bits = numpy.asarray(bits, dtype=bool)
		if bits.ndim != 2:
			raise InvalidConfig("BinaryMask expects (height, width) bits, got {0}".format(bits.shape))
		self.bits = bits

	@classmethod
	def Full( cls, width, height, value=True ):
		return cls(numpy.full((height, width), value, dtype=bool))

	@classmethod
	def Load( cls, path, threshold=MASK_THRESHOLD ):
		"""Loads the image at `path` in grayscale, pixels at or above the
		threshold being white."""
		try:
			with Image.open(path) as image:
				gray = numpy.array(image.convert("L"))
		except (OSError, ValueError) as e:
			raise InvalidConfig("Cannot read mask {0}: {1}".format(path, e))
		return cls(gray >= threshold)

	@property
	def width( self ):
		return self.bits.shape[1]

	@property
	def height( self ):
		return self.bits.shape[0]

	@property
	def size( self ):
		return (self.width, self.height)

	def isSet( self, x, y ):
		return 0 <= x < self.width and 0 <= y < self.height and bool(self.bits[y, x])

	def count( self ):
		return int(self.bits.sum())

	def save( self, path ):
		Image.fromarray(numpy.where(self.bits, 255, 0).astype(numpy.uint8), "L").save(path, format="PNG")
		return path

# -----------------------------------------------------------------------------
#
# COLOR
#
# -----------------------------------------------------------------------------

def hsv_array( rgb ):
	"""Hexcone RGB→HSV over an array of `(…, 3)` 8-bit triples. Returns
	the `(h, s, v)` arrays with `h` in degrees within `[0, 360)` and `s`,
	`v` within `[0, 1]`."""
	a   = numpy.asarray(rgb, dtype=numpy.float64) / 255.0
	r, g, b = a[...,0], a[...,1], a[...,2]
	mx  = a.max(axis=-1)
	mn  = a.min(axis=-1)
	c   = mx - mn
	cs  = numpy.where(c > 0, c, 1.0)
	h   = numpy.select(
		[c == 0, mx == r, mx == g],
		[0.0, numpy.mod((g - b) / cs, 6.0), (b - r) / cs + 2.0],
		(r - g) / cs + 4.0,
	) * 60.0
	h   = numpy.where(h >= HUE_PERIOD, h - HUE_PERIOD, h)
	s   = numpy.where(mx > 0, c / numpy.where(mx > 0, mx, 1.0), 0.0)
	return h, s, mx

def rgb_to_hsv( rgb ):
	if any(not 0 <= _ <= 255 for _ in rgb):
		raise InvalidConfig("RGB channels must be within [0, 255]: {0}".format(rgb))
	h, s, v = hsv_array(numpy.array([rgb]))
	return float(h[0]), float(s[0]), float(v[0])

@dataclass(frozen=True)
class HsvRange:

	center    : Tuple[float, float, float]
	tolerance : Tuple[float, float, float] = DEFAULT_TOLERANCE

	def __post_init__( self ):
		if any(_ < 0 for _ in self.tolerance):
			raise InvalidConfig("HSV tolerances must be non-negative: {0}".format(self.tolerance))

	@classmethod
	def Around( cls, rgb, tolerance=DEFAULT_TOLERANCE ):
		return cls(rgb_to_hsv(rgb), tuple(float(_) for _ in tolerance))

	def contains( self, h, s, v ):
		"""Vectorized membership test, hue distance wrapping around the
		hue circle."""
		hc, sc, vc = self.center
		dh, ds, dv = self.tolerance
		d = numpy.mod(numpy.abs(numpy.asarray(h) - hc), HUE_PERIOD)
		d = numpy.minimum(d, HUE_PERIOD - d)
		return (d <= dh) & (numpy.abs(numpy.asarray(s) - sc) <= ds) & (numpy.abs(numpy.asarray(v) - vc) <= dv)

def legend_ranges( tolerance=DEFAULT_TOLERANCE, overrides=None ):
	"""Builds the HSV window of every legend type, `overrides` replacing
	legend colors as `{type: (r, g, b)}`."""
	overrides = overrides or {}
	res = collections.OrderedDict()
	for t in LEGEND_TYPES:
		res[t] = HsvRange.Around(overrides.get(t, LEGEND[t]), tolerance)
	return res

# -----------------------------------------------------------------------------
#
# SEGMENTATION
#
# -----------------------------------------------------------------------------

def segment_by_legend( img, ranges ):
	"""Returns one mask per legend type. Raises `AmbiguousLegend` with the
	first (raster order) pixel claimed by two ranges."""
	missing = [_ for _ in LEGEND_TYPES if _ not in ranges]
	if missing:
		raise InvalidConfig("Legend ranges missing for {0}".format(", ".join(_.value for _ in missing)))
	h, s, v = hsv_array(img.pixels)
	masks   = collections.OrderedDict()
	claims  = numpy.zeros(h.shape, dtype=numpy.int32)
	for t in LEGEND_TYPES:
		bits      = ranges[t].contains(h, s, v)
		claims   += bits
		masks[t]  = BinaryMask(bits)
	if claims.size and claims.max() > 1:
		i    = int(numpy.argmax(claims.ravel() > 1))
		y, x = divmod(i, img.width)
		raise AmbiguousLegend((x, y), [t for t in LEGEND_TYPES if masks[t].bits[y, x]])
	return masks

def label_components( mask ):
	"""Labels the 4-connected components of `mask`. Returns `(labels, n)`
	where labels `1…n` follow the raster-scan order of each component's
	first pixel and `0` is the background."""
	labels, n = ndimage.label(mask.bits, structure=CONNECTIVITY)
	if n == 0:
		return labels, 0
	values, first = numpy.unique(labels.ravel(), return_index=True)
	order   = [int(_) for _ in values[numpy.argsort(first)] if _ != 0]
	remap   = numpy.zeros(n + 1, dtype=labels.dtype)
	remap[order] = numpy.arange(1, n + 1, dtype=labels.dtype)
	return remap[labels], n

def extract_regions( mask, t, min_area=DEFAULT_MIN_AREA ):
	"""One region per 4-connected component of at least `min_area` pixels,
	with ids `<type>-<nnnnn>` numbered in raster-scan order."""
	if min_area < 1:
		raise InvalidConfig("Minimum area must be at least 1, got {0}".format(min_area))
	labels, n = label_components(mask)
	if n == 0:
		return []
	flat  = labels.ravel()
	ys, xs = numpy.indices(labels.shape)
	area  = numpy.bincount(flat, minlength=n + 1)
	sx    = numpy.bincount(flat, weights=xs.ravel().astype(numpy.float64), minlength=n + 1)
	sy    = numpy.bincount(flat, weights=ys.ravel().astype(numpy.float64), minlength=n + 1)
	res   = []
	for label in range(1, n + 1):
		a = int(area[label])
		if a < min_area:
			continue
		res.append(Region(
			id       = "{0}-{1:05d}".format(t.value, len(res) + 1),
			landUse  = t,
			areaPx   = a,
			centroid = (float(sx[label] / a), float(sy[label] / a)),
		))
	return res

def filter_by_mask( regions, mask, size=None ):
	"""Keeps the regions whose floored centroid lies inside the mask and on
	a white pixel, preserving order. `size` is the `(width, height)` of the
	source map the mask must align with."""
	if size is not None and tuple(size) != mask.size:
		raise MaskDimensionMismatch("Mask is {0}×{1}, map is {2}×{3}".format(mask.width, mask.height, size[0], size[1]))
	return [_ for _ in regions if mask.isSet(int(math.floor(_.centroid[0])), int(math.floor(_.centroid[1])))]

def ingest_map( img, ranges=None, min_area=DEFAULT_MIN_AREA, scale=None, mask=None ):
	"""Segments, labels and optionally filters `img` into the Stage 1
	layout, where every region holds its ingested type."""
	ranges  = ranges or legend_ranges()
	masks   = segment_by_legend(img, ranges)
	regions = []
	for t in LEGEND_TYPES:
		extracted = extract_regions(masks[t], t, min_area)
		if extracted:
			logging.info("Extracted {0} {1} regions".format(len(extracted), t.value))
		regions += extracted
	if mask is not None:
		kept = filter_by_mask(regions, mask, img.size)
		logging.info("Mask kept {0}/{1} regions".format(len(kept), len(regions)))
		regions = kept
	return CityLayout(regions, scale=scale or ScaleConfig())

# -----------------------------------------------------------------------------
#
# RENDERING
#
# -----------------------------------------------------------------------------

def disk_radius( areaPx ):
	return math.sqrt(areaPx / math.pi)

def disk_pixels( centroid, areaPx, canvas ):
	"""The `(height, width)` boolean array of the pixels `render_annotated`
	paints for a region."""
	width, height = canvas
	cx, cy = centroid
	r      = disk_radius(areaPx)
	ys, xs = numpy.ogrid[0:height, 0:width]
	return (xs - cx) ** 2 + (ys - cy) ** 2 <= r * r

def render_annotated( layout, canvas ):
	"""Draws every region as a disk of its current role's legend color on a
	white canvas of `(width, height)`, in ascending id order. Regions still
	holding the unassigned sentinel are not drawn."""
	width, height = canvas
	img = RasterImage.Blank(width, height)
	for region in layout.regions:
		x, y = region.centroid
		if not (0 <= x < width and 0 <= y < height):
			raise RenderOutOfBounds("Centroid {0} of {1} is outside the {2}×{3} canvas".format(region.centroid, region.id, width, height))
		role = layout.assignment[region.id]
		if not role.isLegend():
			continue
		img.pixels[disk_pixels(region.centroid, region.areaPx, canvas)] = legend_color(role)
	return img

# EOF - vim: ts=4 sw=4 noet
