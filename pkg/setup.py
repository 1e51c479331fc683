# encoding: utf-8
# SEE: https://packaging.python.org/en/latest/distributing.html#id23
# SEE: https://pythonhosted.org/setuptools/setuptools.html
# --
# Create source distribution: python setup.py sdist
# Upload using twine: twine upload dist/*
# Run the tests: python -m unittest discover -s test -p "test_*.py"
try:
	from setuptools import setup
except ImportError:
	from distutils.core import setup
import os

VERSION            = "0.4.0"
if os.path.exists("README.md"):
	LONG_DESCRIPTION = open("README.md").read()
else:
	LONG_DESCRIPTION = ""

setup(
	name             = "urbanforge",
	version          = VERSION,
	author           = "UrbanForge contributors",
	license          = 'BSD',
	description      = "Land-use layout optimization: map ingestion, greedy + genetic placement and multi-planner refinement",
	keywords         = "urban planning land use genetic algorithm accessibility",
	long_description = LONG_DESCRIPTION,
	long_description_content_type = "text/markdown",
	# See https://pypi.python.org/pypi?%3Aaction=list_classifiers
	classifiers=[
		'Development Status :: 4 - Beta',
		'Intended Audience :: Science/Research',
		'Topic :: Scientific/Engineering :: GIS',
		'License :: OSI Approved :: BSD License',
		'Programming Language :: Python :: 3',
		'Programming Language :: Python :: 3.8',
	],
	python_requires  = ">=3.8",
	packages         = ["urbanforge"],
	package_dir      = {"urbanforge":"src/python/urbanforge"},
	install_requires = [
		"numpy>=1.20",
		"scipy>=1.6",
		"Pillow>=8.0",
		"requests>=2.25",
		"PyYAML>=5.4",
		"jsonschema>=3.2",
	],
	entry_points     = {
		"console_scripts":["urbanforge=urbanforge.cli:main"],
	},
)

# EOF
