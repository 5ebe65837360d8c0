"""Scenario files: schema, YAML (de)serialization and validation.

The on-disk format is a single YAML document of nested key/value sections;
see README.md for the full grammar. Serialization is canonical (sorted keys)
so dump -> parse -> dump is the identity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import yaml

from . import vls as vls_mod
from .engine import AP_ID, PhyParams

CHANNEL_MODES = ("perfect", "bernoulli", "markov")
CAPTURE_CLASSES = ("normal", "strong")
VLS_METRICS = ("packets", "bits", "air_time")
VLS_VARIANTS = ("distributed", "ap")
CONTROLLER_MODES = ("fixed", "adaptive")


@dataclass
class StationCfg:
    id: int
    weight: str = "1"
    cw_min: int = 32
    cw_max: int = 1024
    channel_mode: str = "perfect"
    channel_p: float = 0.0               # bernoulli only
    channel_lambda_g: float = 0.0        # markov only, exits/s from good
    channel_lambda_b: float = 0.0        # markov only, exits/s from bad
    capture_class: str = "normal"
    vls_enabled: bool = False
    vls_c: Optional[str] = None          # clock-speed broadcast, decimal string
    vls_burst_cap: Optional[int] = None
    vls_metric: str = "packets"
    vls_variant: str = "distributed"
    win_prob_estimate: Optional[float] = None   # advisory, for stability warning


@dataclass
class ControllerCfg:
    mode: str = "fixed"
    b_init_ms: float = 1.0
    alpha: float = 0.1
    update_period_ms: float = 4.0
    averaging_window_ms: float = 40.0
    b_max_ms: float = 10.0


@dataclass
class TopologyCfg:
    edges: List[Tuple[int, int]] = field(default_factory=list)
    flows: Dict[int, int] = field(default_factory=dict)
    controller: ControllerCfg = field(default_factory=ControllerCfg)


@dataclass
class ScenarioConfig:
    duration_s: float = 20.0
    seed: int = 1
    capture: bool = False
    sample_period_ms: float = 100.0
    phy: PhyParams = field(default_factory=PhyParams)
    stations: List[StationCfg] = field(default_factory=list)
    topology: Optional[TopologyCfg] = None


# ---------------------------------------------------------------------------
# dict <-> dataclass
# ---------------------------------------------------------------------------

def _station_to_dict(s: StationCfg) -> dict:
    d = {"id": s.id, "weight": str(s.weight), "cw_min": s.cw_min,
         "cw_max": s.cw_max, "channel": {"mode": s.channel_mode},
         "capture_class": s.capture_class}
    if s.channel_mode == "bernoulli":
        d["channel"]["p"] = s.channel_p
    elif s.channel_mode == "markov":
        d["channel"]["lambda_g"] = s.channel_lambda_g
        d["channel"]["lambda_b"] = s.channel_lambda_b
    if s.vls_enabled:
        d["vls"] = {"enabled": True, "c": str(s.vls_c if s.vls_c is not None else "1"),
                    "metric": s.vls_metric, "variant": s.vls_variant}
        if s.vls_burst_cap is not None:
            d["vls"]["burst_cap"] = s.vls_burst_cap
    if s.win_prob_estimate is not None:
        d["win_prob_estimate"] = s.win_prob_estimate
    return d


def _station_from_dict(d: dict) -> StationCfg:
    ch = d.get("channel", {"mode": "perfect"})
    v = d.get("vls", {})
    return StationCfg(
        id=int(d["id"]),
        weight=str(d.get("weight", "1")),
        cw_min=int(d.get("cw_min", 32)),
        cw_max=int(d.get("cw_max", 1024)),
        channel_mode=ch.get("mode", "perfect"),
        channel_p=float(ch.get("p", 0.0)),
        channel_lambda_g=float(ch.get("lambda_g", 0.0)),
        channel_lambda_b=float(ch.get("lambda_b", 0.0)),
        capture_class=d.get("capture_class", "normal"),
        vls_enabled=bool(v.get("enabled", False)),
        vls_c=str(v["c"]) if "c" in v else None,
        vls_burst_cap=int(v["burst_cap"]) if v.get("burst_cap") is not None else None,
        vls_metric=v.get("metric", "packets"),
        vls_variant=v.get("variant", "distributed"),
        win_prob_estimate=(float(d["win_prob_estimate"])
                           if d.get("win_prob_estimate") is not None else None),
    )


def to_dict(cfg: ScenarioConfig) -> dict:
    d = {
        "duration_s": cfg.duration_s,
        "seed": cfg.seed,
        "capture": cfg.capture,
        "sample_period_ms": cfg.sample_period_ms,
        "phy": {
            "slot_time": cfg.phy.slot_time,
            "sifs": cfg.phy.sifs,
            "difs": cfg.phy.difs,
            "data_rate": cfg.phy.data_rate,
            "packet_payload": cfg.phy.packet_payload,
            "ack_duration": cfg.phy.ack_duration,
            "header_overhead": cfg.phy.header_overhead,
        },
        "stations": [_station_to_dict(s) for s in cfg.stations],
    }
    if cfg.topology is not None:
        t = cfg.topology
        d["topology"] = {
            "edges": [list(e) for e in t.edges],
            "flows": {int(k): int(v) for k, v in t.flows.items()},
            "controller": {
                "mode": t.controller.mode,
                "b_init_ms": t.controller.b_init_ms,
                "alpha": t.controller.alpha,
                "update_period_ms": t.controller.update_period_ms,
                "averaging_window_ms": t.controller.averaging_window_ms,
                "b_max_ms": t.controller.b_max_ms,
            },
        }
    return d


def from_dict(d: dict) -> ScenarioConfig:
    if not isinstance(d, dict):
        raise ValueError("scenario document must be a key/value mapping")
    phy_d = d.get("phy", {})
    phy = PhyParams(
        slot_time=int(phy_d.get("slot_time", 20)),
        sifs=int(phy_d.get("sifs", 10)),
        difs=int(phy_d.get("difs", 50)),
        data_rate=int(phy_d.get("data_rate", 11_000_000)),
        packet_payload=int(phy_d.get("packet_payload", 1000)),
        ack_duration=int(phy_d.get("ack_duration", 112)),
        header_overhead=int(phy_d.get("header_overhead", 192)),
    )
    topology = None
    if "topology" in d and d["topology"] is not None:
        t = d["topology"]
        c = t.get("controller", {})
        topology = TopologyCfg(
            edges=[tuple(int(x) for x in e) for e in t.get("edges", [])],
            flows={int(k): int(v) for k, v in t.get("flows", {}).items()},
            controller=ControllerCfg(
                mode=c.get("mode", "fixed"),
                b_init_ms=float(c.get("b_init_ms", 1.0)),
                alpha=float(c.get("alpha", 0.1)),
                update_period_ms=float(c.get("update_period_ms", 4.0)),
                averaging_window_ms=float(c.get("averaging_window_ms", 40.0)),
                b_max_ms=float(c.get("b_max_ms", 10.0)),
            ),
        )
    return ScenarioConfig(
        duration_s=float(d.get("duration_s", 20.0)),
        seed=int(d.get("seed", 1)),
        capture=bool(d.get("capture", False)),
        sample_period_ms=float(d.get("sample_period_ms", 100.0)),
        phy=phy,
        stations=[_station_from_dict(s) for s in d.get("stations", [])],
        topology=topology,
    )


def dumps(cfg: ScenarioConfig) -> str:
    return yaml.safe_dump(to_dict(cfg), sort_keys=True, default_flow_style=False)


def loads(text: str) -> ScenarioConfig:
    return from_dict(yaml.safe_load(text))


def load_file(path) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return from_dict(yaml.safe_load(fh))


def dump_file(cfg: ScenarioConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(cfg))


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

def validate(cfg: ScenarioConfig) -> Tuple[List[str], List[str]]:
    """Returns (fatal errors, advisory warnings)."""
    errors: List[str] = []
    warnings: List[str] = []

    if cfg.duration_s < 0:
        errors.append("duration_s must be non-negative")
    if cfg.sample_period_ms <= 0:
        errors.append("sample_period_ms must be positive")
    try:
        PhyParams(**{f: getattr(cfg.phy, f) for f in
                     ("slot_time", "sifs", "difs", "data_rate",
                      "packet_payload", "ack_duration", "header_overhead")})
    except ValueError as exc:
        errors.append(f"phy: {exc}")

    ids = [s.id for s in cfg.stations]
    if not ids:
        errors.append("at least one station required")
    if len(set(ids)) != len(ids):
        errors.append("station ids must be unique")
    if AP_ID in ids:
        errors.append(f"station id {AP_ID} is reserved for the AP")

    ap_variant_count = 0
    for s in cfg.stations:
        tag = f"station {s.id}"
        try:
            w = vls_mod.parse_ratio(s.weight, f"{tag} weight")
            if w <= 0:
                errors.append(f"{tag}: weight must be positive")
        except ValueError as exc:
            errors.append(str(exc))
            w = None
        if s.cw_min < 1 or s.cw_max < s.cw_min:
            errors.append(f"{tag}: need 1 <= cw_min <= cw_max")
        if s.channel_mode not in CHANNEL_MODES:
            errors.append(f"{tag}: unknown channel mode {s.channel_mode!r}")
        elif s.channel_mode == "bernoulli" and not 0.0 <= s.channel_p <= 1.0:
            errors.append(f"{tag}: loss probability must be in [0,1]")
        elif s.channel_mode == "markov" and (s.channel_lambda_g <= 0
                                             or s.channel_lambda_b <= 0):
            errors.append(f"{tag}: markov rates must be positive")
        if s.capture_class not in CAPTURE_CLASSES:
            errors.append(f"{tag}: unknown capture class {s.capture_class!r}")
        if s.vls_enabled:
            if s.vls_metric not in VLS_METRICS:
                errors.append(f"{tag}: unknown fairness metric {s.vls_metric!r}")
            if s.vls_variant not in VLS_VARIANTS:
                errors.append(f"{tag}: unknown vls variant {s.vls_variant!r}")
            if s.vls_variant == "ap":
                ap_variant_count += 1
                if w is not None and w.denominator != 1:
                    errors.append(f"{tag}: ap variant needs an integer weight")
            if cfg.topology is not None:
                errors.append(f"{tag}: per-slot scheduling requires a single "
                              "collision domain (drop vls or the topology)")
            try:
                c = (vls_mod.parse_ratio(s.vls_c, f"{tag} c")
                     if s.vls_c is not None else None)
                if c is not None and c <= 0:
                    errors.append(f"{tag}: clock speed c must be positive")
            except ValueError as exc:
                errors.append(str(exc))
                c = None
            if s.vls_burst_cap is not None:
                if s.vls_burst_cap < 1:
                    errors.append(f"{tag}: burst cap must be >= 1")
                elif (s.win_prob_estimate is not None and w is not None
                      and c is not None):
                    if s.win_prob_estimate == 0:
                        warnings.append(
                            f"{tag}: potential credit instability, zero "
                            "win-probability estimate means credit never drains")
                    elif (vls_mod.stability_check(
                            s.vls_burst_cap, w, c, s.win_prob_estimate)
                            is vls_mod.Stability.UNSTABLE):
                        warnings.append(
                            f"{tag}: potential credit instability, burst cap "
                            f"{s.vls_burst_cap} <= W*c/p = "
                            f"{vls_mod.stability_threshold(w, c, s.win_prob_estimate):.3f}")

    if ap_variant_count and cfg.topology is not None:
        errors.append("ap variant needs the implicit single-domain AP")

    if cfg.topology is not None:
        known = set(ids)
        t = cfg.topology
        for a, b in t.edges:
            if a not in known or b not in known:
                errors.append(f"topology edge ({a},{b}) names unknown stations")
            if a == b:
                errors.append(f"topology edge ({a},{b}) is a self-loop")
        adj = {i: set() for i in known}
        for a, b in t.edges:
            if a in known and b in known:
                adj[a].add(b)
                adj[b].add(a)
        for src, dst in t.flows.items():
            if src not in known or dst not in known:
                errors.append(f"flow {src}->{dst} names unknown stations")
            elif dst not in adj[src]:
                errors.append(f"flow {src}->{dst} must follow a sensing edge")
        if t.controller.mode not in CONTROLLER_MODES:
            errors.append(f"unknown controller mode {t.controller.mode!r}")
        if t.controller.b_init_ms <= 0 or t.controller.b_max_ms <= 0:
            errors.append("controller burst lengths must be positive")
        if t.controller.update_period_ms <= 0:
            errors.append("controller update period must be positive")
        if t.controller.averaging_window_ms <= 0:
            errors.append("controller averaging window must be positive")
        if t.controller.alpha <= 0:
            errors.append("controller step size must be positive")

    return errors, warnings
