"""HTTP service wrapping the simulator: validate, synth, run, curve.

Request and response bodies are pydantic models mirroring the CLI
subcommands one-to-one, so the CLI can stay a thin client (in-process ASGI
by default, remote base URL otherwise).  Configuration problems surface as
HTTP 400/422; an eavesdropping verdict is part of a successful response,
with ``exit_hint`` carrying the process exit code the CLI should use.
"""

from __future__ import annotations

import datetime as _dt

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__
from .adversary import ControlledRotationFamily, parse_attack
from .analysis import (
    AnalysisError,
    detection_from_sift,
    entropy_bits,
    eve_tradeoff_curve,
    exact_detection,
    confidentiality as confidentiality_analysis,
)
from .network import NetworkError, NetworkSpec, validate as validate_network
from .protocol import (
    PrepBasis,
    SessionConfig,
    derive_keys,
    detect_eavesdropping,
    layer_rule,
    run_session,
    run_sqkd07,
    sift,
    sift_sqkd07,
)
from .qudit import QuditError
from .reports import amplitude_listing, curve_csv, render_report
from .synthesis import ProtocolKind, schmidt_vector, synthesize


class ParticipantModel(BaseModel):
    id: str
    role: str = "CP"
    honesty: str = "honest"


class LayerModel(BaseModel):
    id: int
    members: list[str]


class NetworkModel(BaseModel):
    participants: list[ParticipantModel]
    layers: list[LayerModel]
    qp_is_member: bool

    def to_spec(self) -> NetworkSpec:
        return NetworkSpec.from_document(self.model_dump())


class ValidateRequest(BaseModel):
    network: NetworkModel


class ValidateResponse(BaseModel):
    ok: bool
    violations: list[str]
    warnings: list[str]
    participant_dimensions: dict[str, int]


class SynthRequest(BaseModel):
    network: NetworkModel
    protocol: str


class SynthResponse(BaseModel):
    protocol: str
    owners: list[str]
    dims: list[int]
    schmidt: list[int]
    amplitudes: list[str]


class RunRequest(BaseModel):
    protocol: str
    network: NetworkModel | None = None
    rounds: int = Field(default=1000, ge=1)
    seed: int
    attack: str | None = None
    attack_unitaries: dict | None = None
    decoy_rate: float | None = None
    tolerance: float = 0.0
    analyses: list[str] = Field(default_factory=lambda: ["detection", "rates"])
    network_label: str = "inline"
    include_exact: bool = True
    workers: int = 1


class RunResponse(BaseModel):
    verdict: str
    exit_hint: int
    report: str
    generated_utc: str


class CurveRequest(BaseModel):
    protocol: str
    network: NetworkModel
    targets: list[str]
    legs: str = "fb"
    phi_scale: float = 1.0
    grid: list[float]
    rounds: int = 0
    seed: int = 0
    layer: int | None = None


class CurveResponse(BaseModel):
    csv: str
    generated_utc: str


app = FastAPI(title="semiqnet", version=__version__)


def _bad_request(message: str) -> HTTPException:
    return HTTPException(status_code=400, detail=message)


def _spec_or_400(model: NetworkModel) -> NetworkSpec:
    try:
        spec = model.to_spec()
    except NetworkError as exc:
        raise _bad_request(str(exc)) from exc
    violations, _ = validate_network(spec)
    if violations:
        raise _bad_request("invalid network: " + "; ".join(violations))
    return spec


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/validate", response_model=ValidateResponse)
def validate_endpoint(request: ValidateRequest) -> ValidateResponse:
    try:
        spec = request.network.to_spec()
    except NetworkError as exc:
        raise _bad_request(str(exc)) from exc
    violations, warnings = validate_network(spec)
    dims: dict[str, int] = {}
    if not violations:
        for p in spec.participants:
            if spec.membership_count(p.id):
                dims[p.id] = spec.participant_dimension(p.id)
    return ValidateResponse(
        ok=not violations, violations=violations, warnings=warnings,
        participant_dimensions=dims,
    )


@app.post("/synth", response_model=SynthResponse)
def synth_endpoint(request: SynthRequest) -> SynthResponse:
    spec = _spec_or_400(request.network)
    try:
        resource = synthesize(spec, request.protocol)
    except (ValueError, QuditError) as exc:
        raise _bad_request(str(exc)) from exc
    return SynthResponse(
        protocol=request.protocol,
        owners=list(resource.owners),
        dims=list(resource.state.dims),
        schmidt=list(schmidt_vector(resource.state)),
        amplitudes=amplitude_listing(resource.state, resource.owners),
    )


def _run_sqkd07(request: RunRequest) -> RunResponse:
    if request.attack and not request.attack.startswith("intercept"):
        raise _bad_request("the two-party baseline only models interception")
    eve = bool(request.attack)
    transcript = run_sqkd07(request.rounds, eve=eve, seed=request.seed)
    sifted = sift_sqkd07(transcript)
    error_z = sifted.error_rate(PrepBasis.Z)
    error_x = sifted.error_rate(PrepBasis.X)
    passed = max(error_z, error_x) <= request.tolerance
    meta = {
        "protocol": "sqkd07",
        "rounds": request.rounds,
        "seed": request.seed,
        "attack": request.attack or "-",
        "verdict": "pass" if passed else "fail",
    }
    keys_section = []
    if passed:
        stream = sifted.key_bob
        keys_section.append(
            {
                "key": "two-party",
                "symbols": len(stream),
                "entropy_bits": entropy_bits(stream) if stream else 0.0,
                "agree": sifted.key_alice == sifted.key_bob,
            }
        )
    detection = [
        {
            "class": "reflect_error_z",
            "source": "sampled",
            "p": error_z,
            "events": sifted.reflect_errors[PrepBasis.Z],
            "rounds": sifted.reflect_tests[PrepBasis.Z],
        },
        {
            "class": "reflect_error_x",
            "source": "sampled",
            "p": error_x,
            "events": sifted.reflect_errors[PrepBasis.X],
            "rounds": sifted.reflect_tests[PrepBasis.X],
        },
    ]
    report = render_report(meta, keys_section, detection, [])
    return RunResponse(
        verdict="pass" if passed else "fail",
        exit_hint=0 if passed else 2,
        report=report,
        generated_utc=_dt.datetime.now(_dt.timezone.utc).isoformat(),
    )


def _confidentiality_rows(protocol: ProtocolKind, spec: NetworkSpec) -> list[dict]:
    """Default survey: every single outsider vs every layer, plus lone share
    holders of xor layers."""
    rows = []
    owners = synthesize(spec, protocol).owners
    for layer in sorted(spec.layers, key=lambda l: l.id):
        rule, holders = layer_rule(spec, protocol, layer.id)
        candidates = [pid for pid in owners if pid not in layer.members]
        if rule == "xor":
            candidates += [pid for pid in holders]
        for pid in candidates:
            rep = confidentiality_analysis(protocol, spec, (pid,), layer.id)
            rows.append(
                {
                    "layer": layer.id,
                    "outsiders": pid,
                    "mi_bits": rep.mutual_information_bits,
                    "symbol_entropy_bits": rep.symbol_entropy_bits,
                    "source": "exact",
                }
            )
    return rows


@app.post("/run", response_model=RunResponse)
def run_endpoint(request: RunRequest) -> RunResponse:
    try:
        protocol = ProtocolKind(request.protocol)
    except ValueError as exc:
        raise _bad_request(f"unknown protocol {request.protocol!r}") from exc
    if protocol is ProtocolKind.SQKD07:
        return _run_sqkd07(request)
    if request.network is None:
        raise _bad_request("multiparty protocols need a network")
    spec = _spec_or_400(request.network)

    strategy = None
    if request.attack:
        try:
            strategy = parse_attack(request.attack, spec, request.attack_unitaries)
        except ValueError as exc:
            raise _bad_request(str(exc)) from exc

    try:
        config = SessionConfig(
            protocol=protocol,
            network=spec,
            rounds=request.rounds,
            seed=request.seed,
            eve=strategy,
            decoy_rate=request.decoy_rate,
        )
        transcript = run_session(config)
    except ValueError as exc:
        raise _bad_request(str(exc)) from exc
    sifted = sift(transcript)
    verdict = detect_eavesdropping(sifted, request.tolerance)

    meta = {
        "protocol": protocol.value,
        "network": request.network_label,
        "rounds": request.rounds,
        "seed": request.seed,
        "attack": request.attack or "-",
        "decoy_rate": config.resolved_decoy_rate(),
        "tolerance": request.tolerance,
        "verdict": "pass" if verdict.passed else "fail",
        "test_rounds": sifted.projective_tests + sifted.support_tests,
        "decoy_rounds": sifted.decoy_rounds,
        "discarded_rounds": sifted.discarded,
    }

    keys_section: list[dict] = []
    if verdict.passed:
        material = derive_keys(sifted, spec, protocol)
        for lid in sorted(material.layers):
            layer_km = material.layer(lid)
            stream = layer_km.key_stream()
            keys_section.append(
                {
                    "layer": lid,
                    "rule": layer_km.rule,
                    "members": ",".join(layer_km.members),
                    "symbols": len(stream),
                    "entropy_bits": entropy_bits(stream) if stream else 0.0,
                }
            )
    else:
        keys_section.append({"withheld": True, "reason": "eavesdropping-detected"})

    detection_rows: list[dict] = []
    if "detection" in request.analyses:
        sampled = detection_from_sift(protocol, strategy, sifted)
        for name in sorted(sampled.classes):
            stat = sampled.classes[name]
            detection_rows.append(
                {
                    "class": name,
                    "source": "sampled",
                    "p": stat.probability,
                    "events": stat.events,
                    "rounds": stat.rounds,
                    "se": stat.stderr,
                }
            )
        for pid in sorted(sampled.decoy_ctrl_mismatch):
            detection_rows.append(
                {
                    "class": "decoy_ctrl_mismatch",
                    "source": "sampled",
                    "target": pid,
                    "p": sampled.decoy_ctrl_mismatch[pid],
                }
            )
        if request.include_exact and strategy is not None:
            try:
                exact = exact_detection(protocol, spec, strategy, workers=request.workers)
                for name in sorted(exact.classes):
                    detection_rows.append(
                        {
                            "class": name,
                            "source": "exact",
                            "p": exact.classes[name].probability,
                        }
                    )
                detection_rows.append(
                    {"class": "overall", "source": "exact", "p": exact.overall}
                )
            except AnalysisError:
                detection_rows.append({"class": "exact", "skipped": "register-too-large"})

    confidentiality_rows: list[dict] = []
    if "confidentiality" in request.analyses:
        confidentiality_rows = _confidentiality_rows(protocol, spec)

    extra = None
    if "transcript" in request.analyses:
        extra = {"transcript": transcript.compact_rows()}

    report = render_report(meta, keys_section, detection_rows, confidentiality_rows, extra)
    return RunResponse(
        verdict="pass" if verdict.passed else "fail",
        exit_hint=0 if verdict.passed else 2,
        report=report,
        generated_utc=_dt.datetime.now(_dt.timezone.utc).isoformat(),
    )


@app.post("/curve", response_model=CurveResponse)
def curve_endpoint(request: CurveRequest) -> CurveResponse:
    if not request.grid:
        raise _bad_request("parameter grid is empty")
    spec = _spec_or_400(request.network)
    family = ControlledRotationFamily(
        targets=tuple(request.targets),
        forward="f" in request.legs,
        backward="b" in request.legs,
        phi_scale=request.phi_scale,
    )
    try:
        points = eve_tradeoff_curve(
            request.protocol,
            spec,
            family,
            request.grid,
            layer_id=request.layer,
            sampled_rounds=request.rounds,
            seed=request.seed,
        )
    except (AnalysisError, ValueError) as exc:
        raise _bad_request(str(exc)) from exc
    return CurveResponse(
        csv=curve_csv(points),
        generated_utc=_dt.datetime.now(_dt.timezone.utc).isoformat(),
    )
