"""Command-line client.

Every command builds the same request models the HTTP API uses and runs
them either in-process (default) or against a running service
(``--server http://host:port``).  Exit codes are a stable contract for CI:

    0   success / verdict positive
    1   analyzed, verdict negative (validation failed, claim not valid or
        below the requested SIL target)
    2   unusable input or usage error
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import httpx
from pydantic import ValidationError

from . import __version__
from .evidence import FleetLogError
from .service import ops
from .service import schemas as sc
from .timeline import TimelineFormatError, read_timeline_csv, write_timeline_csv

_ENDPOINTS = {
    "simulate": (ops.simulate, sc.SimulateResponse),
    "validate": (ops.validate, sc.ValidateResponse),
    "claim": (ops.claim, sc.ClaimResponse),
    "convergence": (ops.convergence, sc.ConvergenceResponse),
}


class InputError(click.ClickException):
    exit_code = 2


def _dispatch(server: str | None, endpoint: str, request):
    local_fn, response_cls = _ENDPOINTS[endpoint]
    if server is None:
        try:
            return local_fn(request)
        except (FleetLogError, ValueError) as exc:
            raise InputError(str(exc))
    url = server.rstrip("/") + "/" + endpoint
    try:
        resp = httpx.post(url, json=request.model_dump(), timeout=600.0)
    except httpx.HTTPError as exc:
        raise InputError(f"cannot reach service at {url}: {exc}")
    if resp.status_code != 200:
        raise InputError(f"service rejected the request ({resp.status_code}): {resp.text}")
    return response_cls.model_validate(resp.json())


def _load_json(path: Path, what: str) -> dict:
    try:
        return json.loads(path.read_text())
    except FileNotFoundError:
        raise InputError(f"{what} file not found: {path}")
    except json.JSONDecodeError as exc:
        raise InputError(f"{what} file {path} is not valid JSON: {exc}")


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2) + "\n")


@click.group()
@click.version_option(__version__)
@click.option("--server", default=None, metavar="URL", help="Run against a remote service instead of in-process.")
@click.pass_context
def main(ctx: click.Context, server: str | None) -> None:
    """Simulate failure processes, validate Poisson assumptions, and evaluate proven-in-use claims."""
    ctx.obj = server


@main.command()
@click.argument("spec_file", type=click.Path(path_type=Path))
@click.option("--seed", type=int, default=0, show_default=True, help="Root seed; all randomness derives from it.")
@click.option("--stream-id", type=int, default=0, show_default=True)
@click.option("--horizon", type=float, default=None, help="Override the horizon from the spec file.")
@click.option("--out", type=click.Path(path_type=Path), required=True, help="Output base path; writes <out>.csv and <out>.json.")
@click.pass_obj
def simulate(server, spec_file: Path, seed: int, stream_id: int, horizon: float | None, out: Path):
    """Simulate a process described by SPEC_FILE (JSON).

    SPEC_FILE is either a tagged spec ({"kind": "renewal" | "nhpp" |
    "superposition" | "modular" | "rare_event", ...}) or a bare modular
    model file (states/P/sojourn/module_rate/transfer_fail), in which case
    --horizon is required.
    """
    payload = _load_json(spec_file, "spec")
    if "kind" not in payload and "states" in payload:
        if horizon is None:
            raise InputError("bare modular model file needs --horizon")
        payload = {"kind": "modular", "model": payload, "horizon": horizon}
    elif horizon is not None:
        if "horizon" not in payload:
            raise InputError(f"spec kind {payload.get('kind')!r} does not take a horizon")
        payload = {**payload, "horizon": horizon}
    try:
        request = sc.SimulateRequest(spec=payload, seed=seed, stream_id=stream_id)
    except ValidationError as exc:
        raise InputError(f"invalid spec file {spec_file}:\n{exc}")
    response = _dispatch(server, "simulate", request)

    csv_path = out.with_suffix(".csv")
    write_timeline_csv(response.timeline.to_core(), csv_path)
    metadata = dict(response.metadata)
    metadata["run_config"] = {
        "command": "simulate",
        "spec_file": str(spec_file),
        "seed": seed,
        "stream_id": stream_id,
        "horizon_override": horizon,
        "out": str(csv_path),
    }
    _write_json(out.with_suffix(".json"), metadata)
    for warning in metadata.get("rarity_warnings") or ():
        click.echo(f"warning: {warning}", err=True)
    click.echo(f"wrote {csv_path} ({len(response.timeline.events)} events) and {out.with_suffix('.json')}")


@main.command()
@click.argument("timeline_csv", type=click.Path(path_type=Path))
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--significance", type=float, default=0.05, show_default=True)
@click.option("--bins", type=int, default=20, show_default=True)
@click.option("--epsilon", type=float, default=0.0, show_default=True)
@click.option("--resamples", type=int, default=1000, show_default=True)
@click.option("--familywise-correction", is_flag=True, default=False)
@click.option("--out", type=click.Path(path_type=Path), required=True, help="Output base path; writes <out>.json and <out>.txt.")
@click.pass_obj
def validate(server, timeline_csv: Path, seed, significance, bins, epsilon, resamples,
             familywise_correction, out: Path):
    """Test TIMELINE_CSV against the four Poisson assumptions.

    Exits 0 only when the overall verdict is a pass, so the command can
    gate pipelines.
    """
    try:
        timeline = read_timeline_csv(timeline_csv)
    except FileNotFoundError:
        raise InputError(f"timeline file not found: {timeline_csv}")
    except TimelineFormatError as exc:
        raise InputError(f"malformed timeline CSV {timeline_csv}: {exc}")
    try:
        request = sc.ValidateRequest(
            timeline=sc.TimelineModel.from_core(timeline),
            seed=seed,
            significance=significance,
            bins=bins,
            epsilon=epsilon,
            resamples=resamples,
            familywise_correction=familywise_correction,
        )
    except ValidationError as exc:
        raise InputError(str(exc))
    response = _dispatch(server, "validate", request)

    payload = response.model_dump()
    payload["run_config"] = {
        "command": "validate",
        "timeline": str(timeline_csv),
        "seed": seed,
        "significance": significance,
        "bins": bins,
        "epsilon": epsilon,
        "resamples": resamples,
        "familywise_correction": familywise_correction,
    }
    _write_json(out.with_suffix(".json"), payload)
    text = ops.validate_summary(response)
    out.with_suffix(".txt").write_text(text + "\n")
    click.echo(text)
    sys.exit(0 if response.overall else 1)


@main.command()
@click.argument("fleet_jsonl", type=click.Path(path_type=Path))
@click.option("--checklist", "checklist_file", type=click.Path(path_type=Path), required=True)
@click.option("--confidence", type=float, default=0.95, show_default=True)
@click.option("--version-filter", default=None, help="Only count intervals of this component version.")
@click.option("--target-sil", type=click.IntRange(1, 4), default=None, help="Exit 0 only if the claim is valid and reaches this SIL.")
@click.option("--sil-bands", "bands_file", type=click.Path(path_type=Path), default=None, help="Custom SIL band table (JSON).")
@click.option("--out", type=click.Path(path_type=Path), required=True, help="Output base path; writes <out>.json and <out>.txt.")
@click.pass_obj
def claim(server, fleet_jsonl: Path, checklist_file: Path, confidence, version_filter,
          target_sil, bands_file, out: Path):
    """Evaluate a proven-in-use claim from a fleet log (JSON Lines)."""
    records = _read_fleet_records(fleet_jsonl)
    checklist = _load_json(checklist_file, "checklist")
    bands = (
        _load_json(bands_file, "SIL band table") if bands_file is not None else None
    )
    try:
        request = sc.ClaimRequest(
            records=records,
            checklist=checklist,
            confidence=confidence,
            version_filter=version_filter,
            **({"sil_bands": bands} if bands is not None else {}),
        )
    except ValidationError as exc:
        raise InputError(str(exc))
    response = _dispatch(server, "claim", request)

    payload = response.model_dump(exclude={"summary"})
    payload["run_config"] = {
        "command": "claim",
        "fleet": str(fleet_jsonl),
        "checklist": str(checklist_file),
        "confidence": confidence,
        "version_filter": version_filter,
        "target_sil": target_sil,
        "sil_bands": str(bands_file) if bands_file else "builtin",
    }
    _write_json(out.with_suffix(".json"), payload)
    out.with_suffix(".txt").write_text(response.summary + "\n")
    click.echo(response.summary)
    ok = response.valid and (target_sil is None or (response.sil or 0) >= target_sil)
    sys.exit(0 if ok else 1)


def _read_fleet_records(path: Path) -> list[dict]:
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise InputError(f"fleet log not found: {path}")
    records = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            data = json.loads(line)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path} line {line_no}: invalid JSON ({exc.msg})")
        try:
            records.append(sc.ServiceRecordModel.model_validate(data).model_dump())
        except ValidationError as exc:
            raise InputError(f"{path} line {line_no}: bad service record: {exc}")
    return records


@main.command()
@click.argument("template_file", type=click.Path(path_type=Path))
@click.option("--n", "n_list", required=True, help="Comma-separated component counts, e.g. 1,10,500.")
@click.option("--replications", type=int, default=100, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--significance", type=float, default=0.05, show_default=True)
@click.option("--bins", type=int, default=20, show_default=True)
@click.option("--epsilon", type=float, default=0.0, show_default=True)
@click.option("--resamples", type=int, default=1000, show_default=True)
@click.option("--out", type=click.Path(path_type=Path), required=True, help="Output CSV path; a .json sidecar records the run config.")
@click.pass_obj
def convergence(server, template_file: Path, n_list: str, replications, seed,
                significance, bins, epsilon, resamples, out: Path):
    """Run a Poisson-limit convergence study over component counts.

    TEMPLATE_FILE holds the component family, e.g.
    {"family": "weibull", "shape_params": {"shape": 3}, "total_rate": 1.0,
    "horizon": 2000.0}.
    """
    try:
        n_values = [int(part) for part in n_list.split(",") if part.strip()]
    except ValueError:
        raise InputError(f"--n must be comma-separated integers, got {n_list!r}")
    if not n_values:
        raise InputError("--n list is empty")
    template = _load_json(template_file, "template")
    try:
        request = sc.ConvergenceRequest(
            **template,
            n_values=n_values,
            replications=replications,
            seed=seed,
            significance=significance,
            bins=bins,
            epsilon=epsilon,
            resamples=resamples,
        )
    except (ValidationError, TypeError) as exc:
        raise InputError(f"invalid template {template_file}: {exc}")
    response = _dispatch(server, "convergence", request)

    from .superposition import ConvergenceRow, write_convergence_csv

    rows = [
        ConvergenceRow(r.n, r.replications, r.pass_fraction, r.empirical_rate_mean, r.theoretical_rate)
        for r in response.rows
    ]
    write_convergence_csv(rows, out)
    _write_json(
        out.with_suffix(".json"),
        {"run_config": {"command": "convergence", "template": str(template_file),
                        "n_values": n_values, "replications": replications, "seed": seed,
                        "significance": significance, "bins": bins, "epsilon": epsilon,
                        "resamples": resamples, "out": str(out)}},
    )
    click.echo(f"wrote {out} ({len(rows)} rows)")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host: str, port: int):
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run("provenuse.service.app:app", host=host, port=port)


if __name__ == "__main__":
    main()
