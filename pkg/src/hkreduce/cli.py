"""Scenario files in, reports out.

Usage::

    hkreduce run <scenario.json> [--format json|text] [--seed N] [--boost v ...] [--out FILE]
    hkreduce validate <scenario.json>
    hkreduce examples

A scenario argument that is not an existing path is looked up among the
bundled scenarios.  Exit codes: 0 success, 1 scenario error, 2 engine
error, 3 statistical test failure.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Any, Optional, Sequence

from . import __version__, hilbert, nondemolition, nosignal
from .collapse import Observation, consistency_check, effective_state, region_of
from .hilbert import Basis, Projector, StateVector, SubsystemLabel
from .spacetime import Boost, CausalRelation, Event, boost, relation

SCENARIO_VERSION = 1
MODES = ("regions", "effective-state", "cycles", "classify", "nosignal")
DEFAULT_SEED = 0
DEFAULT_TRIALS = 10_000
FLOAT_DIGITS = 12

EXIT_OK, EXIT_SCENARIO, EXIT_ENGINE, EXIT_STATISTICS = 0, 1, 2, 3

_OUTCOME_WORDS = {"up": 0, "down": 1, "0": 0, "1": 1, "+": 0, "-": 1, "plus": 0, "minus": 1}
_OUTCOME_NAMES = {Basis.Z: ("up", "down"), Basis.X: ("+", "-")}
_DETECTORS = "detectors"


class ScenarioError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


class EngineError(RuntimeError):
    pass


@dataclass(frozen=True)
class ObservationSpec:
    event: str
    subsystem: str  # "P1", "P2", ... or "detectors" in cycles mode
    basis: str = "Z"
    outcome: Any = "sample"  # 0/1, or [b1, b2] for detectors, or "sample"


@dataclass(frozen=True)
class Scenario:
    mode: str
    events: tuple[Event, ...]
    initial_state: str = "singlet"
    interactions: tuple[tuple[str, int], ...] = ()
    observations: tuple[ObservationSpec, ...] = ()
    queries: tuple[Event, ...] = ()
    boosts: tuple[float, ...] = ()
    pairs: tuple[tuple[int, int], ...] = ()
    preparation: str = "standard"
    trials: int = DEFAULT_TRIALS
    seed: int = DEFAULT_SEED
    name: str = ""
    description: str = ""

    def event(self, label: str) -> Event:
        for e in self.events:
            if e.label == label:
                return e
        raise KeyError(label)

    def to_dict(self) -> dict:
        return {
            "version": SCENARIO_VERSION,
            "name": self.name,
            "description": self.description,
            "mode": self.mode,
            "initial_state": self.initial_state,
            "events": [_event_dict(e) for e in self.events],
            "interactions": [{"event": ev, "detector": d} for ev, d in self.interactions],
            "observations": [
                {"event": o.event, "subsystem": o.subsystem, "basis": o.basis, "outcome": _jsonable(o.outcome)}
                for o in self.observations
            ],
            "queries": [_event_dict(q) for q in self.queries],
            "boosts": list(self.boosts),
            "pairs": [list(p) for p in self.pairs],
            "preparation": self.preparation,
            "trials": self.trials,
            "seed": self.seed,
        }


def _jsonable(value: Any) -> Any:
    return list(value) if isinstance(value, tuple) else value


def _event_dict(e: Event) -> dict:
    d = {"t": _num(e.t), "x": _num(e.x)}
    if e.label is not None:
        d["label"] = e.label
    return d


# ---------------------------------------------------------------- parsing


def _line_of(text: str, *needles: str) -> Optional[int]:
    """1-based line of the first line containing every needle, if any."""
    for i, line in enumerate(text.splitlines(), start=1):
        if all(n in line for n in needles):
            return i
    return None


def _line_of_value(text: str, key: str, value: Any) -> Optional[int]:
    pattern = re.compile(rf'"{re.escape(key)}"\s*:\s*{re.escape(json.dumps(value))}')
    for i, line in enumerate(text.splitlines(), start=1):
        if pattern.search(line):
            return i
    return _line_of(text, f'"{key}"')


def _require(doc: dict, key: str, kind: type | tuple, text: str, default: Any = ...) -> Any:
    if key not in doc:
        if default is ...:
            raise ScenarioError(f"missing required field {key!r}")
        return default
    value = doc[key]
    if not isinstance(value, kind) or isinstance(value, bool) and kind in (int, float, (int, float)):
        raise ScenarioError(f"field {key!r} has the wrong type ({type(value).__name__})", _line_of(text, f'"{key}"'))
    return value


def _parse_event(item: Any, text: str, where: str, need_label: bool) -> Event:
    if not isinstance(item, dict):
        raise ScenarioError(f"{where} entries must be objects", _line_of(text, f'"{where}"'))
    label = item.get("label")
    line = _line_of_value(text, "label", label) if label is not None else _line_of(text, '"t"')
    if need_label and not isinstance(label, str):
        raise ScenarioError(f"{where} entry without a string label", line)
    try:
        t, x = item["t"], item["x"]
    except KeyError as exc:
        raise ScenarioError(f"{where} entry {label!r} is missing coordinate {exc.args[0]!r}", line) from None
    if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in (t, x)):
        raise ScenarioError(f"{where} entry {label!r} has non-numeric coordinates", line)
    try:
        return Event(t, x, label)
    except ValueError as exc:
        raise ScenarioError(f"{where} entry {label!r}: {exc}", line) from None


def _parse_outcome(raw: Any, subsystem: str, line: Optional[int]) -> Any:
    if raw == "sample":
        return "sample"
    if subsystem == _DETECTORS:
        if isinstance(raw, list) and len(raw) == 2 and all(b in (0, 1) and not isinstance(b, bool) for b in raw):
            return (raw[0], raw[1])
        raise ScenarioError("detector outcomes must be 'sample' or a pair of bits like [0, 1]", line)
    if isinstance(raw, bool):
        raise ScenarioError(f"bad outcome {raw!r}", line)
    key = str(raw).lower()
    if key not in _OUTCOME_WORDS:
        raise ScenarioError(f"bad outcome {raw!r}; use up/down, +/-, 0/1 or 'sample'", line)
    return _OUTCOME_WORDS[key]


def parse_scenario(text: str) -> Scenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"syntax error: {exc.msg} (column {exc.colno})", exc.lineno) from None
    if not isinstance(doc, dict):
        raise ScenarioError("scenario must be a JSON object", 1)

    version = doc.get("version")
    if version != SCENARIO_VERSION:
        raise ScenarioError(f"unsupported scenario version {version!r}; expected {SCENARIO_VERSION}", _line_of(text, '"version"'))
    mode = _require(doc, "mode", str, text)
    if mode not in MODES:
        raise ScenarioError(f"unknown mode {mode!r}; expected one of {', '.join(MODES)}", _line_of(text, '"mode"'))
    initial = _require(doc, "initial_state", str, text, "singlet")
    if initial != "singlet":
        raise ScenarioError(f"unknown initial_state {initial!r}; only 'singlet' is supported", _line_of(text, '"initial_state"'))

    events = tuple(_parse_event(e, text, "events", True) for e in _require(doc, "events", list, text, []))
    labels = [e.label for e in events]
    for lab in labels:
        if labels.count(lab) > 1:
            raise ScenarioError(f"duplicate event label {lab!r}", _line_of_value(text, "label", lab))
    by_label = {e.label: e for e in events}

    def resolve(label: Any, context: str) -> Event:
        if label not in by_label:
            raise ScenarioError(f"{context} refers to unknown event {label!r}", _line_of_value(text, "event", label))
        return by_label[label]

    interactions = []
    for item in _require(doc, "interactions", list, text, []):
        if not isinstance(item, dict):
            raise ScenarioError("interactions entries must be objects", _line_of(text, '"interactions"'))
        ev = item.get("event")
        resolve(ev, "interaction")
        det = item.get("detector")
        if det not in (1, 2) or isinstance(det, bool):
            raise ScenarioError(f"interaction at {ev!r} names detector {det!r}; expected 1 or 2", _line_of_value(text, "event", ev))
        interactions.append((ev, det))
    for det in (1, 2):
        mine = [by_label[ev] for ev, d in interactions if d == det]
        if len(mine) > nondemolition.MAX_INTERACTIONS:
            raise ScenarioError(f"detector {det} has more than {nondemolition.MAX_INTERACTIONS} interactions")
        for a, b in zip(mine, mine[1:]):
            if not b.t > a.t:
                raise ScenarioError(
                    f"interactions of detector {det} are not time-ordered: {a.label!r} then {b.label!r}",
                    _line_of_value(text, "event", b.label),
                )

    observations = []
    for item in _require(doc, "observations", list, text, []):
        if not isinstance(item, dict):
            raise ScenarioError("observations entries must be objects", _line_of(text, '"observations"'))
        ev = item.get("event")
        resolve(ev, "observation")
        line = _line_of_value(text, "event", ev)
        sub = str(item.get("subsystem", ""))
        if sub != _DETECTORS:
            try:
                SubsystemLabel.parse(sub)
            except ValueError as exc:
                raise ScenarioError(f"observation at {ev!r}: {exc}", line) from None
        basis = str(item.get("basis", "Z")).upper()
        if basis not in ("Z", "X"):
            raise ScenarioError(f"observation at {ev!r} has unknown basis {basis!r}", line)
        outcome = _parse_outcome(item.get("outcome", "sample"), sub, line)
        observations.append(ObservationSpec(ev, sub if sub == _DETECTORS else str(SubsystemLabel.parse(sub)), basis, outcome))

    queries = tuple(_parse_event(q, text, "queries", False) for q in _require(doc, "queries", list, text, []))

    boosts = []
    for v in _require(doc, "boosts", list, text, []):
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not abs(v) < 1:
            raise ScenarioError(f"boost velocity {v!r} must be a number with |v| < 1", _line_of(text, '"boosts"'))
        boosts.append(float(v))

    pairs = []
    for p in _require(doc, "pairs", list, text, []):
        if not (isinstance(p, list) and len(p) == 2 and all(isinstance(k, int) and not isinstance(k, bool) and 0 <= k <= 2 for k in p)):
            raise ScenarioError(f"pair {p!r} must be two interaction counts in 0..2", _line_of(text, '"pairs"'))
        pairs.append((p[0], p[1]))

    preparation = _require(doc, "preparation", str, text, "standard")
    if preparation not in ("standard", "alternative"):
        raise ScenarioError(f"unknown preparation {preparation!r}", _line_of(text, '"preparation"'))
    trials = _require(doc, "trials", int, text, DEFAULT_TRIALS)
    seed = _require(doc, "seed", int, text, DEFAULT_SEED)
    if trials < 1 or seed < 0:
        raise ScenarioError("trials must be positive and seed non-negative", _line_of(text, '"trials"') or _line_of(text, '"seed"'))

    scenario = Scenario(
        mode=mode,
        events=events,
        initial_state=initial,
        interactions=tuple(interactions),
        observations=tuple(observations),
        queries=queries,
        boosts=tuple(boosts),
        pairs=tuple(pairs),
        preparation=preparation,
        trials=trials,
        seed=seed,
        name=str(doc.get("name", "")),
        description=str(doc.get("description", "")),
    )
    _validate_mode(scenario, text)
    return scenario


def _validate_mode(s: Scenario, text: str) -> None:
    particle_obs = [o for o in s.observations if o.subsystem != _DETECTORS]
    det_obs = [o for o in s.observations if o.subsystem == _DETECTORS]
    if s.mode in ("regions", "effective-state"):
        if det_obs:
            raise ScenarioError(f"{s.mode} mode observes particles, not {_DETECTORS!r}", _line_of_value(text, "subsystem", _DETECTORS))
        seen = set()
        for o in particle_obs:
            if o.subsystem not in ("P1", "P2"):
                raise ScenarioError(f"the singlet has particles P1 and P2 only, got {o.subsystem!r}", _line_of_value(text, "subsystem", o.subsystem))
            if o.subsystem in seen:
                raise ScenarioError(f"subsystem {o.subsystem} observed twice", _line_of_value(text, "subsystem", o.subsystem))
            seen.add(o.subsystem)
        for i, o1 in enumerate(particle_obs):
            for o2 in particle_obs[i + 1 :]:
                if relation(s.event(o1.event), s.event(o2.event)) is CausalRelation.COINCIDENT:
                    raise ScenarioError(f"observations at {o1.event!r} and {o2.event!r} are coincident", _line_of_value(text, "event", o2.event))
    if s.mode == "regions":
        if len(particle_obs) != 2:
            raise ScenarioError("regions mode needs exactly two observations (A and B)", _line_of(text, '"observations"'))
        a, b = (s.event(o.event) for o in particle_obs)
        rel = relation(a, b)
        if rel is not CausalRelation.SPACELIKE:
            raise ScenarioError(
                f"observation events {a.label!r} and {b.label!r} must be spacelike separated, got {rel.value}",
                _line_of_value(text, "label", b.label),
            )
    if s.mode == "classify":
        geometry = {e.label: e for e in s.events}
        missing = [k for k in ("1", "2", "3", "4") if k not in geometry]
        if missing:
            raise ScenarioError(f"classify mode needs interaction events 1-4; missing {missing}", _line_of(text, '"events"'))
        try:
            nondemolition.validate_geometry(geometry)
        except ValueError as exc:
            offending = re.findall(r"events (\S+) and (\S+)", str(exc))
            line = _line_of_value(text, "label", offending[0][1]) if offending else None
            raise ScenarioError(f"geometry error: {exc}", line) from None
    if s.mode == "cycles":
        if particle_obs:
            raise ScenarioError(f"cycles mode only observes the {_DETECTORS!r}", _line_of_value(text, "subsystem", particle_obs[0].subsystem))


def load_text(name_or_path: str) -> str:
    path = Path(name_or_path)
    if path.exists():
        return path.read_text(encoding="utf-8")
    bundled = resources.files("hkreduce") / "scenarios" / Path(name_or_path).name
    if bundled.is_file():
        return bundled.read_text(encoding="utf-8")
    raise ScenarioError(f"no such scenario file {name_or_path!r}")


def bundled_scenarios() -> list[str]:
    root = resources.files("hkreduce") / "scenarios"
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".json"))


# ---------------------------------------------------------------- running


def _num(v: float) -> float:
    v = round(float(v), FLOAT_DIGITS)
    return 0.0 if v == 0 else v


def _ket_dict(psi: StateVector) -> dict:
    return {
        "labels": [str(l) for l in psi.labels],
        "amplitudes": [[_num(a.real), _num(a.imag)] for a in psi.amplitudes],
    }


def _dist_dict(dist: dict, names: Sequence[str]) -> dict:
    return {names[k]: _num(v) for k, v in dist.items()}


def _projector(o: ObservationSpec, outcome: int) -> Projector:
    return Projector(SubsystemLabel.parse(o.subsystem), outcome, Basis(o.basis))


def _resolve_particle_observations(s: Scenario, initial: StateVector, seed: int) -> list[Observation]:
    """Fix every sampled outcome by drawing from the conditional distribution, in file order."""
    resolved: list[Observation] = []
    state = initial
    for i, o in enumerate(s.observations):
        outcome = o.outcome
        if outcome == "sample":
            p0 = hilbert.project(state, _projector(o, 0)).norm_squared()
            p1 = hilbert.project(state, _projector(o, 1)).norm_squared()
            u = nosignal.trial_generator(seed, i).random()
            outcome = 0 if u * (p0 + p1) < p0 else 1
        proj = _projector(o, outcome)
        state = hilbert.project(state, proj)
        resolved.append(Observation(s.event(o.event), proj))
    return resolved


def _observation_dict(o: Observation) -> dict:
    return {
        "event": o.event.label,
        "subsystem": str(o.projector.target),
        "basis": o.projector.basis.value,
        "outcome": _OUTCOME_NAMES[o.projector.basis][o.outcome],
    }


def _run_reduction(s: Scenario, seed: int, boosts: Sequence[float]) -> tuple[dict, int]:
    initial = hilbert.singlet()
    obs = _resolve_particle_observations(s, initial, seed)
    rows = []
    for q in s.queries:
        rep = effective_state(initial, q, obs)
        rows.append(
            {
                "query": _event_dict(q),
                "region": rep.region.value if rep.region else None,
                "applied": [o.event.label for o in rep.applied],
                "effective_ket": _ket_dict(rep.effective_ket),
                "probability_weight": _num(rep.probability_weight),
            }
        )
    body: dict = {
        "observations": [_observation_dict(o) for o in obs],
        "consistent": consistency_check(initial, obs),
        "queries": rows,
    }
    if s.mode == "regions":
        a, b = obs[0].event, obs[1].event
        base = [region_of(q, a, b) for q in s.queries]
        frames = []
        for v in boosts:
            bst = Boost(v)
            labels = [region_of(boost(q, bst), boost(a, bst), boost(b, bst)) for q in s.queries]
            frames.append({"v": _num(v), "regions": [r.value for r in labels], "unchanged": labels == base})
        body["frames"] = frames
        body["frame_invariant"] = all(f["unchanged"] for f in frames)
    return body, EXIT_OK


def _preparation(s: Scenario) -> StateVector | None:
    return nondemolition.alternative_preparation() if s.preparation == "alternative" else None


def _cycle_row(state: nondemolition.CycleState, event: str, detector: Optional[int]) -> dict:
    dist = nondemolition.outcome_probabilities(state)
    return {
        "event": event,
        "detector": detector,
        "epoch": list(state.epoch),
        "comparison": nondemolition.compare(state).value,
        "singlet_fidelity": _num(nondemolition.singlet_fidelity(state)),
        "detector_outcomes": {f"{k[0]}{k[1]}": _num(v) for k, v in sorted(dist.items())},
    }


def _run_cycles(s: Scenario, seed: int, boosts: Sequence[float]) -> tuple[dict, int]:
    prep = _preparation(s)
    steps = [(s.event(ev).t, 0, ev, det) for ev, det in s.interactions]
    steps += [(s.event(o.event).t, 1, o.event, o) for o in s.observations]
    steps.sort(key=lambda st: (st[0], st[1]))
    state = nondemolition.prepare(prep)
    rows = [_cycle_row(state, "start", None)]
    observations = []
    for i, (_, kind, ev, item) in enumerate(steps):
        if kind == 0:
            state = nondemolition.interact(state, item)
            rows.append(_cycle_row(state, ev, item))
            continue
        outcome = item.outcome
        if outcome == "sample":
            outcome = nondemolition.sampler_from_rng(nosignal.trial_generator(seed, i))
        before = nondemolition.compare(state).value
        bits, state = nondemolition.observe(state, outcome)
        observations.append(
            {
                "event": ev,
                "epoch": list(state.epoch),
                "comparison_before": before,
                "outcome": list(bits),
                "parity": nondemolition.parity(bits),
                "singlet_fidelity_after": _num(nondemolition.singlet_fidelity(state)),
            }
        )
        rows.append(_cycle_row(state, ev, None))
    frames = []
    order_events = [(s.event(ev), det) for ev, det in s.interactions]
    reference = nondemolition.at_epoch(
        (sum(d == 1 for _, d in s.interactions), sum(d == 2 for _, d in s.interactions)), prep
    ).global_state
    for v in boosts:
        bst = Boost(v)
        ordered = sorted(order_events, key=lambda ed: boost(ed[0], bst).t)
        st = nondemolition.prepare(prep)
        for _, det in ordered:
            st = nondemolition.interact(st, det)
        frames.append(
            {
                "v": _num(v),
                "order": [e.label for e, _ in ordered],
                "state_matches": st.global_state.allclose(reference),
            }
        )
    return {"trajectory": rows, "observations": observations, "frames": frames}, EXIT_OK


def _run_classify(s: Scenario, seed: int, boosts: Sequence[float]) -> tuple[dict, int]:
    prep = _preparation(s)
    geometry = {e.label: e for e in s.events}
    pairs = s.pairs or ((1, 1), (2, 2), (2, 1), (1, 2))
    verdicts = {}
    sweep = {}
    for p in pairs:
        name = nondemolition.pair_name(p)
        verdicts[name] = nondemolition.classify_pair(p, prep).verdict.value
        detail = nondemolition.frame_sweep_detail(p, boosts, geometry, prep)
        sweep[name] = {
            "pass": nondemolition.frame_sweep(p, boosts, geometry, prep),
            "frames": [
                {"v": _num(r.v), "order": list(r.order), "verdict": r.verdict.value, "state_matches": r.state_matches}
                for r in detail
            ],
        }
    body = {
        "pairs": [{"pair": list(p), "name": nondemolition.pair_name(p)} for p in pairs],
        "verdicts": verdicts,
        "frame_sweep": sweep,
    }
    return body, EXIT_OK


def _run_nosignal(s: Scenario, seed: int, boosts: Sequence[float]) -> tuple[dict, int]:
    strategies = [nosignal.Strategy(True, Basis.Z), nosignal.Strategy(False, Basis.Z), nosignal.Strategy(True, Basis.X)]
    marginals = {st.describe(): nosignal.exact_marginal_B(st) for st in strategies}
    values = list(marginals.values())
    max_diff = max(abs(m[b] - values[0][b]) for m in values for b in (0, 1))
    marg = nosignal.exact_marginal_B(nosignal.Strategy())
    conditional = {a: nosignal.exact_conditional_B(a) for a in (0, 1)}
    report = nosignal.signaling_test(s.trials, seed)
    run = report.details["looking"]
    joint_freq = run.joint_frequency(0, 1)
    tolerance = 3.0 * math.sqrt(0.25 / s.trials)
    joint_pass = abs(joint_freq - 0.5) <= tolerance
    names = ("up", "down")
    body = {
        "exact": {
            "b_marginals": {k: _dist_dict(v, names) for k, v in marginals.items()},
            "max_marginal_difference": _num(max_diff),
            "b_conditional_on_a": {names[a]: _dist_dict(c, names) for a, c in conditional.items()},
            "outcome_dependence_tv": _num(nosignal.total_variation(conditional[0], marg)),
        },
        "monte_carlo": {
            **{k: (_num(v) if isinstance(v, float) else v) for k, v in report.as_dict().items()},
            "joint_frequency_up_down": _num(joint_freq),
            "joint_tolerance": _num(tolerance),
            "joint_pass": joint_pass,
        },
    }
    ok = report.passed and joint_pass and max_diff <= nosignal.EXACT_ATOL and report.exact_difference <= nosignal.EXACT_ATOL
    body["pass"] = ok
    return body, EXIT_OK if ok else EXIT_STATISTICS


_RUNNERS = {
    "regions": _run_reduction,
    "effective-state": _run_reduction,
    "cycles": _run_cycles,
    "classify": _run_classify,
    "nosignal": _run_nosignal,
}


@dataclass
class Report:
    body: dict
    exit_code: int = EXIT_OK
    scenario: Optional[Scenario] = field(default=None, repr=False)


def run(scenario: Scenario, seed: Optional[int] = None, extra_boosts: Sequence[float] = ()) -> Report:
    seed = scenario.seed if seed is None else seed
    boosts = list(scenario.boosts) + [float(v) for v in extra_boosts]
    try:
        body, code = _RUNNERS[scenario.mode](scenario, seed, boosts)
    except (ValueError, KeyError, RuntimeError, OverflowError) as exc:
        raise EngineError(f"{scenario.name or scenario.mode}: {exc}") from exc
    echo = replace(scenario, seed=seed, boosts=tuple(boosts))
    body.update({"mode": scenario.mode, "scenario": echo.to_dict(), "engine_version": __version__, "seed": seed})
    return Report(body, code, echo)


# ---------------------------------------------------------------- output


def emit(report: Report, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(report.body, sort_keys=True, indent=2) + "\n"
    if fmt == "text":
        return _emit_text(report.body)
    raise ValueError(f"unknown format {fmt!r}")


def _fmt_event(e: dict) -> str:
    return f"{e.get('label', '')}({e['t']:g}, {e['x']:g})"


def _fmt_ket(k: dict) -> str:
    if not k["labels"]:
        re_, im = k["amplitudes"][0]
        return f"{re_:+.6f}" + (f"{im:+.6f}i" if im else "")
    n = len(k["labels"])
    terms = []
    for i, (re_, im) in enumerate(k["amplitudes"]):
        if abs(re_) < 1e-12 and abs(im) < 1e-12:
            continue
        bits = format(i, f"0{n}b")
        coef = f"{re_:+.6f}" + (f"{im:+.6f}i" if im else "")
        terms.append(f"{coef}|{bits}>")
    return " ".join(terms) + f" on {','.join(k['labels'])}" if terms else "0"


def _emit_text(b: dict) -> str:
    lines = [f"mode: {b['mode']}   engine {b['engine_version']}   seed {b['seed']}"]
    name = b["scenario"].get("name")
    if name:
        lines.append(f"scenario: {name}")
    mode = b["mode"]
    if mode in ("regions", "effective-state"):
        for o in b["observations"]:
            lines.append(f"observation {o['event']}: {o['subsystem']} {o['basis']} -> {o['outcome']}")
        lines.append(f"consistent: {b['consistent']}")
        lines.append(f"{'query':<24} {'region':<15} {'applied':<10} {'weight':>10}  effective ket")
        for r in b["queries"]:
            lines.append(
                f"{_fmt_event(r['query']):<24} {str(r['region'] or '-'):<15} {','.join(r['applied']) or '-':<10} "
                f"{r['probability_weight']:>10.6f}  {_fmt_ket(r['effective_ket'])}"
            )
        for f in b.get("frames", []):
            lines.append(f"boost v={f['v']:+.3f}: {'unchanged' if f['unchanged'] else 'CHANGED'}")
    elif mode == "cycles":
        lines.append(f"{'event':<8} {'epoch':<7} {'comparison':<11} {'fidelity':>9}  P(00) P(01) P(10) P(11)")
        for r in b["trajectory"]:
            probs = " ".join(f"{r['detector_outcomes'][k]:.3f}" for k in ("00", "01", "10", "11"))
            lines.append(f"{r['event']:<8} {str(tuple(r['epoch'])):<7} {r['comparison']:<11} {r['singlet_fidelity']:>9.6f}  {probs}")
        for o in b["observations"]:
            lines.append(
                f"observed at {o['event']}: outcome {o['outcome']} parity {o['parity']} "
                f"(was {o['comparison_before']}), singlet fidelity after {o['singlet_fidelity_after']:.6f}"
            )
        for f in b["frames"]:
            lines.append(f"boost v={f['v']:+.3f}: order {'-'.join(f['order'])} state matches {f['state_matches']}")
    elif mode == "classify":
        lines.append(f"{'pair':<6} {'epoch':<7} {'verdict':<16} frame sweep")
        for p in b["pairs"]:
            name = p["name"]
            sweep = b["frame_sweep"][name]
            lines.append(f"{name:<6} {str(tuple(p['pair'])):<7} {b['verdicts'][name]:<16} {'pass' if sweep['pass'] else 'FAIL'}")
    elif mode == "nosignal":
        ex, mc = b["exact"], b["monte_carlo"]
        for k, v in ex["b_marginals"].items():
            lines.append(f"exact P_B {k:<18} up {v['up']:.6f}  down {v['down']:.6f}")
        lines.append(f"max exact marginal difference {ex['max_marginal_difference']:.3g}")
        lines.append(f"outcome dependence (TV distance) {ex['outcome_dependence_tv']:.6f}")
        lines.append(
            f"monte carlo n={mc['n']}: P(down_B | A looks) {mc['p_down_b_when_a_observes']:.4f}, "
            f"P(down_B | A ignores) {mc['p_down_b_when_a_ignores']:.4f}, z {mc['z']:+.3f} -> {'pass' if mc['pass'] else 'FAIL'}"
        )
        lines.append(
            f"joint frequency (up_A, down_B) {mc['joint_frequency_up_down']:.4f} "
            f"+/- {mc['joint_tolerance']:.4f} -> {'pass' if mc['joint_pass'] else 'FAIL'}"
        )
        lines.append(f"overall: {'pass' if b['pass'] else 'FAIL'}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hkreduce", description="Light-cone state reduction scenarios.")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run a scenario and print its report")
    p_run.add_argument("scenario", help="path to a scenario file or the name of a bundled one")
    p_run.add_argument("--format", choices=("json", "text"), default="json")
    p_run.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    p_run.add_argument("--boost", type=float, nargs="+", default=[], metavar="V", help="extra frame velocities to check")
    p_run.add_argument("--out", type=Path, default=None, help="write the report here instead of stdout")
    p_val = sub.add_parser("validate", help="check a scenario file without running it")
    p_val.add_argument("scenario", help="path to a scenario file or the name of a bundled one")
    sub.add_parser("examples", help="list the bundled scenarios")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "examples":
        for name in bundled_scenarios():
            s = parse_scenario(load_text(name))
            print(f"{name:<20} {s.mode:<16} {s.description}")
        return EXIT_OK
    try:
        scenario = parse_scenario(load_text(args.scenario))
    except ScenarioError as exc:
        print(f"{args.scenario}: {exc}", file=sys.stderr)
        return EXIT_SCENARIO
    if args.command == "validate":
        print(f"ok: {args.scenario} ({scenario.mode})")
        return EXIT_OK
    try:
        for v in args.boost:
            Boost(v)
    except ValueError as exc:
        print(f"--boost: {exc}", file=sys.stderr)
        return EXIT_SCENARIO
    try:
        report = run(scenario, args.seed, args.boost)
    except EngineError as exc:
        print(f"engine error: {exc}", file=sys.stderr)
        return EXIT_ENGINE
    out = emit(report, args.format)
    if args.out is not None:
        args.out.write_text(out, encoding="utf-8")
    else:
        sys.stdout.write(out)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
