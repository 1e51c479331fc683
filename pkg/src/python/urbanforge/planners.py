#!/usr/bin/env python
# encoding=utf8 ---------------------------------------------------------------
# Project           : UrbanForge
# -----------------------------------------------------------------------------
# Author            : UrbanForge contributors
# License           : BSD License
# -----------------------------------------------------------------------------
# Creation date     : 18-Mar-2025
# Last modification : 17-Oct-2026
# -----------------------------------------------------------------------------

import os, json, threading, warnings, collections
from   concurrent.futures import ThreadPoolExecutor
from   dataclasses        import dataclass, field, replace
from   typing             import Dict, Optional, Tuple
import jsonschema
import requests

from .        import logger
from .errors  import ParseError, UnknownRegion, BudgetExceeded, PlannerFailed, CompletionError, InvalidConfig, NoResidents, NoFacilityOfType, EmptySubRegion
from .model   import LandUseType, LEGEND_TYPES, ChangePolicy, LayoutAction, ActionKind, DemographicRole, Demographic, DEMOGRAPHIC_ORDER, RejectionReason, validate_action, apply_action, land_use
from .ingest  import filter_by_mask
from .metrics import Evaluator, MetricsReport, min_distance, satisfaction

__doc__ = """
Regional planners and the master planner. Each sub-region of the city has a
regional planner advocating for one demographic role: it sees the regions of
its sub-region, the needs its residents lack and the city-wide metrics, and
proposes a short list of edits. The master planner replays the proposals in
a fixed order and keeps an edit only when it passes the minimal-change policy
and improves satisfaction without degrading service or ecology.

Planners are either the deterministic `HeuristicPlanner` or a `ModelPlanner`
asking a completion service, whose JSON replies are decoded and validated
before anything reaches the master planner.
"""

logging = logger("planners")

ENV_ENDPOINT = "URBANFORGE_LLM_ENDPOINT"
ENV_KEY      = "URBANFORGE_LLM_KEY"
ENV_MODEL    = "URBANFORGE_LLM_MODEL"

PROPOSAL_SCHEMA = {
	"type"       : "object",
	"properties" : {
		"actions"   : {
			"type"  : "array",
			"items" : {
				"type"       : "object",
				"properties" : {
					"kind"     : {"type":"string", "enum":[_.value for _ in ActionKind]},
					"target"   : {"type":"string"},
					"new_type" : {"type":"string", "enum":[_.value for _ in LEGEND_TYPES]},
					"other"    : {"type":"string"},
				},
				"required"   : ["kind", "target"],
				"allOf"      : [
					{"if":{"properties":{"kind":{"const":"reassign"}}}, "then":{"required":["new_type"]}},
					{"if":{"properties":{"kind":{"const":"swap"}}},     "then":{"required":["other"]}},
				],
			},
		},
		"rationale" : {"type":"string"},
	},
	"required"   : ["actions"],
}

PROPOSAL_VALIDATOR = jsonschema.Draft7Validator(PROPOSAL_SCHEMA)

# -----------------------------------------------------------------------------
#
# TYPES
#
# -----------------------------------------------------------------------------

@dataclass(frozen=True)
class IntegrationPolicy(ChangePolicy):
	"""The minimal-change policy plus the master planner's metric guard."""

	minSatisfactionDelta : float = 0.0
	maxServiceDrop       : float = 0.0
	maxEcologyDrop       : float = 0.0

	def __post_init__( self ):
		super(IntegrationPolicy, self).__post_init__()
		if self.maxServiceDrop < 0 or self.maxEcologyDrop < 0:
			raise InvalidConfig("Allowed metric drops must be non-negative")

RegionView = collections.namedtuple("RegionView", "id role centroid")

@dataclass(frozen=True)
class PlannerContext:

	subRegion    : str
	role         : DemographicRole
	regions      : Tuple[RegionView, ...]
	metrics      : MetricsReport
	satisfaction : Optional[float]
	budget       : int
	protected    : Tuple[LandUseType, ...]
	# Resident id → needs with no facility within the satisfaction radius
	unmet        : Dict[str, Tuple[LandUseType, ...]] = field(default_factory=dict)
	radius       : float = 800.0
	metersPerPixel : float = 1.0

	def ids( self ):
		return [_.id for _ in self.regions]

@dataclass(frozen=True)
class Proposal:

	subRegion  : str
	actions    : Tuple[LayoutAction, ...] = ()
	rationale  : str = ""
	demographic: Optional[Demographic] = None
	retries    : int = 0

	def asDict( self ):
		return collections.OrderedDict((
			("actions",   [_.asDict() for _ in self.actions]),
			("rationale", self.rationale),
		))

@dataclass(frozen=True)
class Decision:

	subRegion : str
	index     : int
	action    : LayoutAction
	accepted  : bool
	reason    : str
	deltas    : Optional[Dict[str, float]] = None

	def asDict( self ):
		return collections.OrderedDict((
			("sub_region", self.subRegion),
			("index",      self.index),
			("action",     self.action.asDict()),
			("accepted",   self.accepted),
			("reason",     self.reason),
			("deltas",     self.deltas),
		))

# -----------------------------------------------------------------------------
#
# CONTEXT
#
# -----------------------------------------------------------------------------

def unmet_needs( layout, residentID, needs ):
	"""The needs of a resident with no facility strictly within the
	satisfaction radius."""
	location = layout.region(residentID).centroid
	res      = []
	for t in needs:
		facilities = [layout.region(_).centroid for _ in layout.idsWithRole(t)]
		try:
			d = min_distance(location, facilities, layout.scale)
		except NoFacilityOfType:
			d = float("inf")
		if not d < layout.scale.satisfactionRadius:
			res.append(t)
	return tuple(res)

def build_regional_context( layout, mask, role, policy, evaluator=None, subRegion=None ):
	"""The view a regional planner gets of its sub-region."""
	subRegion = subRegion or role.kind.value
	evaluator = evaluator or Evaluator()
	regions   = filter_by_mask(list(layout.regions), mask)
	if not regions:
		message = "Sub-region {0} contains no region".format(subRegion)
		logging.warning(message)
		warnings.warn(message, EmptySubRegion)
	views     = tuple(RegionView(_.id, layout.assignment[_.id], _.centroid) for _ in regions)
	residents = [_.id for _ in views if _.role is LandUseType.Residential]
	try:
		local = satisfaction(layout, {subRegion:role}, {subRegion:mask}, evaluator.sampling, warnOrphans=False) if residents else None
	except NoResidents:
		local = None
	return PlannerContext(
		subRegion      = subRegion,
		role           = role,
		regions        = views,
		metrics        = evaluator.report(layout, "current"),
		satisfaction   = local,
		budget         = policy.budget,
		protected      = policy.protected,
		unmet          = collections.OrderedDict((_, unmet_needs(layout, _, role.needs)) for _ in residents),
		radius         = layout.scale.satisfactionRadius,
		metersPerPixel = layout.scale.metersPerPixel,
	)

# -----------------------------------------------------------------------------
#
# HEURISTIC PLANNER
#
# -----------------------------------------------------------------------------

def heuristic_planner( ctx ):
	"""For each need in priority order that some resident lacks, reassigns
	the vacant region nearest to the first such resident. Protected roles
	are skipped as they cannot be created."""
	vacant    = [_ for _ in ctx.regions if _.role.isOpen()]
	locations = dict((_.id, _.centroid) for _ in ctx.regions)
	actions   = []
	for need in ctx.role.needs:
		if len(actions) >= ctx.budget or not vacant:
			break
		if need in ctx.protected:
			continue
		lacking = [r for r, unmet in ctx.unmet.items() if need in unmet]
		if not lacking:
			continue
		x, y = locations[lacking[0]]
		site = min(vacant, key=lambda _:((_.centroid[0] - x) ** 2 + (_.centroid[1] - y) ** 2, _.id))
		vacant.remove(site)
		actions.append(LayoutAction.Reassign(site.id, need))
	rationale = "; ".join("{0} for residents lacking it".format(_) for _ in actions) or "All reachable needs are met"
	return Proposal(ctx.subRegion, tuple(actions), rationale, ctx.role.kind)

# -----------------------------------------------------------------------------
#
# WIRE FORMAT
#
# -----------------------------------------------------------------------------

class ProposalProcessor:
	"""Turns a decoded proposal document into actions, dispatching each
	action to the `on<Kind>` handler bound to its kind."""

	def __init__( self ):
		self.handlerByKind = {}
		self._bindHandlers()

	def _bindHandlers( self ):
		kinds = dict((_.name, _) for _ in ActionKind)
		for k in dir(self):
			if not k.startswith("on"): continue
			name = k[2:]
			assert name in kinds, "Handler does not match any action kind: {0}, kinds are {1}".format(k, ", ".join(kinds))
			self.handlerByKind[kinds[name].value] = getattr(self, k)

	def process( self, data ):
		return tuple(self.processAction(_) for _ in data.get("actions", ()))

	def processAction( self, item ):
		handler = self.handlerByKind.get(item.get("kind"))
		if not handler:
			raise ParseError("Unsupported action kind: {0!r}".format(item.get("kind")))
		return handler(item)

	def onReassign( self, item ):
		return LayoutAction.Reassign(item["target"], land_use(item["new_type"]))

	def onSwap( self, item ):
		return LayoutAction.Swap(item["target"], item["other"])

def _strip_fences( text ):
	t = text.strip()
	if t.startswith("```"):
		t = t.split("\n", 1)[1] if "\n" in t else ""
		if t.rstrip().endswith("```"):
			t = t.rstrip()[:-3]
	return t

def parse_proposal( raw, ctx ):
	"""Decodes a planner reply into a `Proposal` for `ctx`, rejecting
	malformed documents, unknown action kinds, regions outside the
	sub-region and proposals over budget."""
	text = _strip_fences(raw or "")
	try:
		data = json.loads(text)
	except ValueError as e:
		raise ParseError("Malformed planner reply: {0}".format(getattr(e, "msg", e)), text, getattr(e, "pos", None))
	errors = sorted(PROPOSAL_VALIDATOR.iter_errors(data), key=lambda _:list(_.absolute_path))
	if errors:
		e = errors[0]
		raise ParseError("Planner reply does not match the proposal schema at /{0}: {1}".format(
			"/".join(str(_) for _ in e.absolute_path), e.message
		))
	actions = ProposalProcessor().process(data)
	known   = set(ctx.ids())
	for a in actions:
		for r in a.regions():
			if r not in known:
				raise UnknownRegion(r, "Region {0} is not part of sub-region {1}".format(r, ctx.subRegion))
	if len(actions) > ctx.budget:
		raise BudgetExceeded("{0} actions proposed for a budget of {1}".format(len(actions), ctx.budget))
	return Proposal(ctx.subRegion, actions, data.get("rationale", ""), ctx.role.kind)

# -----------------------------------------------------------------------------
#
# COMPLETION CLIENTS
#
# -----------------------------------------------------------------------------

class CompletionClient:
	"""A text completion service: takes a list of `{role, content}`
	messages and returns the reply text."""

	def __init__( self, endpoint=None, model=None, timeout=30.0, retries=2 ):
		self.endpoint = endpoint
		self.model    = model
		self.timeout  = timeout
		self.retries  = retries

	def complete( self, messages ):
		raise NotImplementedError

class HttpCompletionClient(CompletionClient):
	"""Posts chat-completion requests with `requests`. A `requests.Session`
	is not shared between threads, so create one client per planner."""

	def __init__( self, endpoint, model, key=None, timeout=30.0, retries=2 ):
		super(HttpCompletionClient, self).__init__(endpoint, model, timeout, retries)
		self.key     = key
		self.session = requests.Session()

	@classmethod
	def FromEnvironment( cls, timeout=30.0, retries=2, environ=None ):
		environ  = os.environ if environ is None else environ
		endpoint = environ.get(ENV_ENDPOINT)
		model    = environ.get(ENV_MODEL)
		if not endpoint or not model:
			raise InvalidConfig("The remote planner needs {0} and {1} to be set".format(ENV_ENDPOINT, ENV_MODEL))
		return cls(endpoint, model, environ.get(ENV_KEY), timeout, retries)

	def complete( self, messages ):
		headers = {"Content-Type":"application/json"}
		if self.key:
			headers["Authorization"] = "Bearer {0}".format(self.key)
		payload = {"model":self.model, "messages":list(messages), "temperature":0}
		try:
			r = self.session.post(self.endpoint, json=payload, headers=headers, timeout=self.timeout)
			r.raise_for_status()
			data = r.json()
		except requests.RequestException as e:
			raise CompletionError("Completion request to {0} failed: {1}".format(self.endpoint, e))
		except ValueError as e:
			raise CompletionError("Completion service returned invalid JSON: {0}".format(e))
		try:
			if "choices" in data:
				choice = data["choices"][0]
				return choice["message"]["content"] if "message" in choice else choice["text"]
			return data["text"]
		except (KeyError, IndexError, TypeError):
			raise CompletionError("Unexpected completion response: {0}".format(json.dumps(data)[:200]))

class ScriptedCompletionClient(CompletionClient):
	"""Replies with canned texts in order, recording the requests. Used for
	offline runs and tests."""

	def __init__( self, replies, retries=2 ):
		super(ScriptedCompletionClient, self).__init__("scripted", "scripted", 0, retries)
		self.replies  = list(replies)
		self.requests = []
		self._lock    = threading.Lock()

	def complete( self, messages ):
		with self._lock:
			self.requests.append(list(messages))
			if not self.replies:
				raise CompletionError("No scripted reply left")
			reply = self.replies.pop(0)
		if isinstance(reply, Exception):
			raise reply
		return reply

def render_prompt( ctx ):
	"""The messages sent to the completion service for `ctx`."""
	system = (
		"You are the regional planner of sub-region {0}, advocating for its {1} demographic. "
		"Propose at most {2} layout edits to a master planner that accepts an edit only if it "
		"raises resident satisfaction without lowering service accessibility or ecological coverage. "
		"You may reassign vacant land to a facility type or swap the roles of two regions. "
		"Regions holding {3} cannot be changed or created. "
		"Answer with a single JSON document matching this schema and nothing else:\n{4}"
	).format(
		ctx.subRegion, ctx.role.kind.value, ctx.budget,
		", ".join(_.value for _ in ctx.protected),
		json.dumps(PROPOSAL_SCHEMA, indent=1),
	)
	lines = [
		"Sub-region: {0}".format(ctx.subRegion),
		"Demographic: {0}".format(ctx.role.kind.value),
		"Needs (by priority): {0}".format(", ".join(_.value for _ in ctx.role.needs)),
		"Needs are met within {0:.0f} m; one pixel is {1} m.".format(ctx.radius, ctx.metersPerPixel),
		"City metrics: service={0:.3f} ecology={1:.3f} satisfaction={2:.3f}".format(ctx.metrics.service, ctx.metrics.ecology, ctx.metrics.satisfaction),
		"Sub-region satisfaction: {0}".format("n/a" if ctx.satisfaction is None else "{0:.3f}".format(ctx.satisfaction)),
		"Regions (id, role, x, y):",
	]
	lines += ["- {0} {1} {2:.1f} {3:.1f}".format(_.id, _.role.value, _.centroid[0], _.centroid[1]) for _ in ctx.regions]
	lines.append("Residents with unmet needs:")
	lines += ["- {0}: {1}".format(k, ", ".join(_.value for _ in v)) for k, v in ctx.unmet.items() if v] or ["- none"]
	return [
		{"role":"system", "content":system},
		{"role":"user",   "content":"\n".join(lines)},
	]

# -----------------------------------------------------------------------------
#
# PLANNERS
#
# -----------------------------------------------------------------------------

class RegionalPlanner:

	def propose( self, ctx ):
		raise NotImplementedError

class HeuristicPlanner(RegionalPlanner):

	def propose( self, ctx ):
		return heuristic_planner(ctx)

class ModelPlanner(RegionalPlanner):
	"""Asks a completion client, re-asking up to `retries` times when the
	reply cannot be decoded into a valid proposal."""

	def __init__( self, client, retries=None ):
		self.client  = client
		self.retries = client.retries if retries is None else retries

	def propose( self, ctx ):
		messages = render_prompt(ctx)
		for attempt in range(self.retries + 1):
			raw = self.client.complete(messages)
			try:
				return replace(parse_proposal(raw, ctx), retries=attempt)
			except (ParseError, UnknownRegion, BudgetExceeded) as e:
				detail = e.describe() if isinstance(e, ParseError) else str(e)
				logging.warning("Planner {0} reply #{1} rejected: {2}".format(ctx.subRegion, attempt + 1, detail))
				messages = messages + [
					{"role":"assistant", "content":raw or ""},
					{"role":"user",      "content":"Your reply was rejected: {0}. Answer again with the JSON document only.".format(e)},
				]
		raise PlannerFailed(ctx.subRegion, "Planner {0} gave no valid proposal in {1} attempts".format(ctx.subRegion, self.retries + 1))

def propose( planner, ctx ):
	"""Runs `planner`, which is a `RegionalPlanner` or a bare
	`CompletionClient`."""
	if isinstance(planner, CompletionClient):
		planner = ModelPlanner(planner)
	return planner.propose(ctx)

def propose_all( planners, contexts, fallback=None, workers=4 ):
	"""Runs the planner of every context concurrently. `planners` maps
	sub-region ids to planners. A planner that fails yields an empty
	proposal; a completion service failure goes to `fallback` when given
	and propagates otherwise. Proposals come back in context order."""
	def run( ctx ):
		try:
			return propose(planners[ctx.subRegion], ctx)
		except PlannerFailed as e:
			logging.warning("{0}, continuing with an empty proposal".format(e))
			return Proposal(ctx.subRegion, (), "planner failed", ctx.role.kind)
		except CompletionError as e:
			if fallback is None:
				raise
			logging.warning("Completion service failed for {0} ({1}), falling back".format(ctx.subRegion, e))
			return fallback.propose(ctx)
	with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
		return list(pool.map(run, contexts))

# -----------------------------------------------------------------------------
#
# MASTER PLANNER
#
# -----------------------------------------------------------------------------

def _proposal_order( proposal ):
	return DEMOGRAPHIC_ORDER.index(proposal.demographic) if proposal.demographic in DEMOGRAPHIC_ORDER else len(DEMOGRAPHIC_ORDER)

def integrate( layout, proposals, policy, evaluator=None ):
	"""Applies the acceptable actions of `proposals`, sub-regions in
	Industrial, Educational, Commercial, Residential order and actions in
	listed order, each accepted action being visible to the next. Returns
	the integrated layout and the decision log."""
	seen = [_.subRegion for _ in proposals]
	if len(set(seen)) != len(seen):
		raise InvalidConfig("Proposals must come from distinct sub-regions: {0}".format(", ".join(seen)))
	evaluator = evaluator or Evaluator()
	log       = []
	if not any(_.actions for _ in proposals):
		return layout, log
	baseline  = evaluator.report(layout)
	current   = baseline
	ordered   = [p for _, p in sorted(enumerate(proposals), key=lambda _:(_proposal_order(_[1]), _[0]))]
	for proposal in ordered:
		for i, action in enumerate(proposal.actions):
			rejection = validate_action(layout, action, policy, position=i)
			if rejection:
				log.append(Decision(proposal.subRegion, i, action, False, rejection.reason.value))
				continue
			candidate = apply_action(layout, action)
			after     = evaluator.report(candidate)
			deltas    = collections.OrderedDict((
				("service",      after.service      - current.service),
				("ecology",      after.ecology      - current.ecology),
				("satisfaction", after.satisfaction - current.satisfaction),
			))
			if not deltas["satisfaction"] > policy.minSatisfactionDelta:
				reason = "{0}: satisfaction does not improve".format(RejectionReason.MetricGuard.value)
			elif -deltas["service"] > policy.maxServiceDrop or baseline.service - after.service > policy.maxServiceDrop:
				reason = "{0}: service drops".format(RejectionReason.MetricGuard.value)
			elif -deltas["ecology"] > policy.maxEcologyDrop or baseline.ecology - after.ecology > policy.maxEcologyDrop:
				reason = "{0}: ecology drops".format(RejectionReason.MetricGuard.value)
			else:
				reason = None
			if reason:
				log.append(Decision(proposal.subRegion, i, action, False, reason, deltas))
			else:
				layout, current = candidate, after
				log.append(Decision(proposal.subRegion, i, action, True, "accepted", deltas))
				logging.info("Accepted {0} from {1}, satisfaction {2:+.4f}".format(action, proposal.subRegion, deltas["satisfaction"]))
	return layout, log

def plan( layout, masks, roles, planners, policy, evaluator, rounds=1, fallback=None ):
	"""Runs `rounds` propose/integrate rounds over the sub-regions of
	`masks` (a mapping of sub-region id to mask, `roles` mapping the same
	ids to demographic roles). Returns the layout and the decision log."""
	if rounds < 1:
		raise InvalidConfig("At least one planning round is needed, got {0}".format(rounds))
	decisions = []
	for n in range(rounds):
		contexts  = [build_regional_context(layout, masks[k], roles[k], policy, evaluator, subRegion=str(getattr(k, "value", k))) for k in masks]
		named     = dict((str(getattr(k, "value", k)), v) for k, v in planners.items())
		proposals = propose_all(named, contexts, fallback)
		layout, log = integrate(layout, proposals, policy, evaluator)
		decisions += log
		logging.info("Planning round {0}: {1}/{2} actions accepted".format(n + 1, len([_ for _ in log if _.accepted]), len(log)))
		if not any(_.accepted for _ in log):
			break
	return layout, decisions

def write_decisions( path, decisions ):
	with open(path, "w") as f:
		for _ in decisions:
			f.write(json.dumps(_.asDict()))
			f.write("\n")
	return path

# EOF - vim: ts=4 sw=4 noet
