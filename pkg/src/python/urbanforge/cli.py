#!/usr/bin/env python
# encoding=utf8 ---------------------------------------------------------------
# Project           : UrbanForge
# -----------------------------------------------------------------------------
# Author            : UrbanForge contributors
# License           : BSD License
# -----------------------------------------------------------------------------
# Creation date     : 27-Mar-2025
# Last modification : 17-Oct-2026
# -----------------------------------------------------------------------------

import os, sys, argparse

from .         import logger, VERSION
from .errors   import UrbanForgeError, EXIT_INPUT
from .model    import LEGEND_TYPES, PLAYER_ROLES, CityLayout, save_inventory, load_inventory, save_layout, load_layout
from .ingest   import RasterImage, ingest_map, render_annotated
from .metrics  import format_table, write_reports_csv, write_reports_json
from .solver   import FitnessTrace, optimize, players_from_layout, prepare_initial_state, release_unassigned
from .planners import plan, write_decisions
from .config   import PipelineConfig, ON_ERRORS

__doc__ = """
Command-line front end: `ingest`, `optimize`, `plan`, `evaluate` run one stage
each and `pipeline` chains them, evaluating and rendering every stage.

Exit codes are 0 on success, 2 for input and configuration errors and 3 when
the remote planner service fails.
"""

logging = logger("cli")

INVENTORY         = "inventory.json"
STAGE2            = "stage2.json"
STAGE3            = "stage3.json"
TRACE             = "trace.csv"
METRICS           = "metrics.csv"
DECISIONS         = "decisions.jsonl"
PLAN_METRICS      = "plan_metrics.csv"
PLAN_METRICS_JSON = "plan_metrics.jsonl"

# -----------------------------------------------------------------------------
#
# HELPERS
#
# -----------------------------------------------------------------------------

def _output( config, name ):
	os.makedirs(config.output, exist_ok=True)
	return os.path.join(config.output, name)

def _map_size( config ):
	return RasterImage.Load(config.map).size if config.map else None

def _masks( config, size=None ):
	return config.loadMasks(size) if config.masks else None

def _render( config, layout, size, stage ):
	path = _output(config, "{0}.png".format(stage))
	render_annotated(layout, size).save(path)
	logging.info("Rendered {0} to {1}".format(stage, path))
	return path

def role_counts_table( layout ):
	counts = layout.roleCounts()
	return "\n".join("{0:<18}{1:>6}".format(_.value, counts.get(_, 0)) for _ in LEGEND_TYPES)

# -----------------------------------------------------------------------------
#
# COMMANDS
#
# -----------------------------------------------------------------------------

def cmd_ingest( config, image=None ):
	"""Segments the map into the region inventory (the Stage 1 layout)."""
	image  = image or config.loadMap()
	layout = ingest_map(image, config.ranges(), config.minArea, config.scale, config.loadFilterMask())
	path   = save_inventory(layout, _output(config, INVENTORY))
	logging.info("Wrote {0} regions to {1}".format(len(layout.ids), path))
	print(role_counts_table(layout))
	return layout

def cmd_optimize( config, inventory ):
	"""Runs the greedy and genetic phases from the inventory and writes the
	Stage 2 layout and its fitness trace."""
	layout  = inventory if isinstance(inventory, CityLayout) else load_inventory(inventory)
	players = players_from_layout(layout, PLAYER_ROLES, config.players)
	state0  = prepare_initial_state(layout, players)
	trace   = FitnessTrace()
	result  = release_unassigned(optimize(state0, players, config.ga, trace))
	save_layout(result, _output(config, STAGE2))
	trace.save(_output(config, TRACE))
	return result

def cmd_plan( config, layout, size=None ):
	"""Runs the regional planners and the master planner over the Stage 2
	layout. Returns the Stage 3 layout with the before and after reports."""
	config    = config.requireMasks()
	layout    = layout if isinstance(layout, CityLayout) else load_layout(layout)
	masks     = config.loadMasks(size or _map_size(config))
	evaluator = config.evaluator(masks)
	before    = evaluator.report(layout, "before")
	result, decisions = plan(
		layout, masks, config.roles(), config.planners(), config.policy, evaluator,
		rounds   = config.planner.rounds,
		fallback = config.fallback(),
	)
	after     = evaluator.report(result, "after")
	save_layout(result, _output(config, STAGE3))
	write_decisions(_output(config, DECISIONS), decisions)
	write_reports_csv(_output(config, PLAN_METRICS), [before, after], append=False)
	write_reports_json(_output(config, PLAN_METRICS_JSON), [before, after])
	logging.info("Accepted {0} of {1} proposed actions".format(len([_ for _ in decisions if _.accepted]), len(decisions)))
	print(format_table([before, after]))
	return result, before, after

def cmd_evaluate( config, layout, stage, masks=None ):
	"""Appends the metrics of `layout` under `stage` to the report CSV."""
	layout = layout if isinstance(layout, CityLayout) else load_layout(layout)
	if masks is None:
		masks = _masks(config, _map_size(config))
	report = config.evaluator(masks).report(layout, stage)
	write_reports_csv(_output(config, METRICS), [report])
	print(format_table([report]))
	return report

def cmd_pipeline( config, skipPlan=False ):
	"""Ingests, optimizes and plans, evaluating and rendering every stage.
	The report CSV is rewritten from scratch."""
	if not skipPlan:
		config.requireMasks()
	image  = config.loadMap()
	size   = image.size
	masks  = _masks(config, size)
	path   = _output(config, METRICS)
	if os.path.exists(path):
		os.unlink(path)
	reports = []
	stage1  = cmd_ingest(config, image)
	_render(config, stage1, size, "stage1")
	reports.append(cmd_evaluate(config, stage1, "stage1", masks))
	stage2  = cmd_optimize(config, stage1)
	_render(config, stage2, size, "stage2")
	reports.append(cmd_evaluate(config, stage2, "stage2", masks))
	if not skipPlan:
		stage3, _, _ = cmd_plan(config, stage2, size)
		_render(config, stage3, size, "stage3")
		reports.append(cmd_evaluate(config, stage3, "stage3", masks))
	print(format_table(reports))
	return reports

# -----------------------------------------------------------------------------
#
# ARGUMENTS
#
# -----------------------------------------------------------------------------

def _mask_argument( text ):
	if "=" not in text:
		raise argparse.ArgumentTypeError("expected NAME=PATH, got {0!r}".format(text))
	name, path = text.split("=", 1)
	return (name, path)

def _tolerance_argument( text ):
	parts = text.split(",")
	if len(parts) != 3:
		raise argparse.ArgumentTypeError("expected H,S,V, got {0!r}".format(text))
	try:
		return tuple(float(_) for _ in parts)
	except ValueError:
		raise argparse.ArgumentTypeError("expected three numbers, got {0!r}".format(text))

def build_parser():
	common = argparse.ArgumentParser(add_help=False)
	common.add_argument("--config", help="YAML pipeline configuration")
	common.add_argument("--seed", type=int, help="GA random seed")
	common.add_argument("--out", help="Output directory")
	common.add_argument("--min-area", type=int, dest="minArea", help="Minimum region area in pixels")
	common.add_argument("--hsv-tolerance", type=_tolerance_argument, metavar="H,S,V", dest="tolerance", help="Legend match tolerance")
	common.add_argument("--mask", metavar="PATH", dest="filterMask", help="Binary mask restricting the regions kept at ingest")
	common.add_argument("--subregion-mask", type=_mask_argument, action="append", metavar="NAME=PATH", dest="masks", help="Sub-region mask, repeatable")
	common.add_argument("--rounds", type=int, help="Planning rounds")
	common.add_argument("--on-llm-error", choices=ON_ERRORS, dest="onError", help="What to do when the remote planner fails")
	common.add_argument("-v", "--verbose", action="store_true")
	parser = argparse.ArgumentParser(prog="urbanforge", description="Land-use layout optimization in three stages")
	parser.add_argument("--version", action="version", version="%(prog)s " + VERSION)
	sub    = parser.add_subparsers(dest="command", required=True)
	p = sub.add_parser("ingest", parents=[common], help="Segment the map into a region inventory")
	p.set_defaults(func=_run_ingest)
	p = sub.add_parser("optimize", parents=[common], help="Run the greedy and genetic phases")
	p.add_argument("--inventory", help="Inventory JSON (defaults to the output directory's)")
	p.set_defaults(func=_run_optimize)
	p = sub.add_parser("plan", parents=[common], help="Run the regional and master planners")
	p.add_argument("--layout", help="Stage 2 layout JSON (defaults to the output directory's)")
	p.set_defaults(func=_run_plan)
	p = sub.add_parser("evaluate", parents=[common], help="Append a layout's metrics to the report")
	p.add_argument("--layout", required=True, help="Layout or inventory JSON")
	p.add_argument("--stage", default="stage1", help="Stage label of the report row")
	p.set_defaults(func=_run_evaluate)
	p = sub.add_parser("pipeline", parents=[common], help="Run every stage")
	p.add_argument("--skip-plan", action="store_true", dest="skipPlan", help="Stop after the solver")
	p.set_defaults(func=_run_pipeline)
	return parser

def load_config( args ):
	config = PipelineConfig.Load(args.config) if args.config else PipelineConfig()
	return config.override(
		seed       = args.seed,
		output     = args.out,
		minArea    = args.minArea,
		tolerance  = args.tolerance,
		masks      = args.masks,
		filterMask = args.filterMask,
		rounds     = args.rounds,
		onError    = args.onError,
	).checkPaths()

def _run_ingest( args ):
	cmd_ingest(load_config(args))

def _run_optimize( args ):
	config = load_config(args)
	cmd_optimize(config, args.inventory or os.path.join(config.output, INVENTORY))

def _run_plan( args ):
	config = load_config(args)
	cmd_plan(config, args.layout or os.path.join(config.output, STAGE2))

def _run_evaluate( args ):
	cmd_evaluate(load_config(args), args.layout, args.stage)

def _run_pipeline( args ):
	cmd_pipeline(load_config(args), args.skipPlan)

def main( argv=None ):
	args = build_parser().parse_args(argv)
	if args.verbose:
		import logging as std_logging
		std_logging.basicConfig(level=std_logging.INFO, format="%(name)s: %(message)s")
	try:
		args.func(args)
	except UrbanForgeError as e:
		logging.error(str(e))
		sys.stderr.write("urbanforge: {0}: {1}\n".format(e.__class__.__name__, e))
		return getattr(e, "EXIT_CODE", EXIT_INPUT)
	return 0

if __name__ == "__main__":
	sys.exit(main())

# EOF - vim: ts=4 sw=4 noet
