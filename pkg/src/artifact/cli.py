"""Command-line verifier with JSON reports.

Exit codes: 0 verified, 1 refuted, 2 unknown or needs witness, 64 usage.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
import sys
import time
from pathlib import Path

import click

from . import __version__
from . import matrices as mx
from .fibration import (
    allowable_check,
    build_k3_split_model,
    check_gamma_polarisation,
    disc_fibration,
    make_config,
    split_from_json,
    SplitError,
)
from .lattice_core import IntLattice, disc_group, standard_lattice
from .mirror import (
    DHT_INSTANCES,
    MirrorWitness,
    check_mirror_pair,
    degeneration_side,
    dht_degeneration,
    dht_fibration,
    dht_suite,
    fibration_side,
    named_pair,
    parse_class,
)
from .pseudolattice import PseudoHom, classify_qdp, glue, is_quasi_del_pezzo, twist, z_chain
from .tyurin import (
    GlueError,
    as_qdp,
    build_glued,
    check_stable_polarisation,
    lattice_polarisation,
    lift_polarisation,
    lifted_polarisation,
)

SCHEMA = 1
EXIT = {"verified": 0, "refuted": 1, "unknown": 2, "needs_witness": 2, "out_of_scope": 2}
USAGE = 64


class UsageError(Exception):
    pass


def _load_json(path: str):
    p = Path(path)
    try:
        raw = p.read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    ctx = click.get_current_context(silent=True)
    if ctx is not None and ctx.obj is not None:
        ctx.obj.setdefault("digests", {})[str(path)] = hashlib.sha256(raw).hexdigest()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise UsageError(f"{path} is not UTF-8 text (byte {exc.start})") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON in {path} at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    # an emitted report is accepted wherever its result is
    if isinstance(data, dict) and data.get("schema") == SCHEMA and "result" in data:
        data = data["result"]
    return data


def load_pair(data) -> PseudoHom:
    """A quasi del Pezzo input: ``{"surface": "P2"}``, ``{"word": [...]}``, a pair or a homomorphism."""
    if isinstance(data, str):
        return as_qdp(named_pair(data))
    if "surface" in data:
        return as_qdp(named_pair(data["surface"]))
    if "word" in data:
        return z_chain(data["word"])[1]
    return as_qdp(data)


def _text(obj, prefix: str = "") -> list[str]:
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            key = f"{prefix}.{k}" if prefix else str(k)
            if isinstance(v, (dict, list)) and v and not _is_matrix(v):
                lines += _text(v, key)
            else:
                lines.append(f"{key}: {json.dumps(v)}")
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            lines += _text(v, f"{prefix}[{i}]")
    else:
        lines.append(f"{prefix}: {json.dumps(obj)}")
    return lines


def _is_matrix(v) -> bool:
    return isinstance(v, list) and all(isinstance(x, (int, list)) for x in v) and not any(isinstance(x, dict) for x in v)


def emit(ctx, command: str, status: str, result: dict, inputs: tuple = ()) -> None:
    opts = ctx.obj
    report = {
        "schema": SCHEMA,
        "tool": "artifact",
        "version": __version__,
        "command": command,
        "status": status,
        "result": result,
    }
    seen = opts.get("digests", {})
    digests = {str(p): seen[str(p)] for p in inputs if p and str(p) in seen}
    if digests:
        report["input_digests"] = digests
    if opts.get("timing"):
        report["timing_s"] = round(time.perf_counter() - opts["start"], 6)
    if opts["format"] == "text":
        out = "\n".join(_text(report)) + "\n"
    else:
        out = json.dumps(report, indent=2, sort_keys=False) + "\n"
    if opts.get("out"):
        Path(opts["out"]).write_text(out)
    else:
        click.echo(out, nl=False)
    ctx.exit(EXIT.get(status, 2))


def _run(ctx, fn):
    try:
        return fn()
    except UsageError as exc:
        click.echo(f"error: {exc}", err=True)
        ctx.exit(USAGE)
    except (KeyError, TypeError, IndexError, ValueError) as exc:
        click.echo(f"error: invalid input ({type(exc).__name__}: {exc})", err=True)
        ctx.exit(USAGE)


@click.group()
@click.option("--format", "fmt", type=click.Choice(["json", "text"]), default="json", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write the report to a file.")
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for the selftest subcommand.")
@click.option("--timing/--no-timing", default=False, help="Include wall-clock timing (makes reports non-deterministic).")
@click.version_option(__version__)
@click.pass_context
def cli(ctx, fmt, out, seed, timing):
    """Exact verifier for lattice and pseudolattice constructions of K3 surfaces."""
    ctx.ensure_object(dict)
    ctx.obj.update(format=fmt, out=out, seed=seed, timing=timing, start=time.perf_counter())


# ---------------------------------------------------------------------------
# lattice


@cli.group()
def lattice():
    """Integral lattices."""


@lattice.command("info")
@click.option("--name", required=True, help='Lattice name such as "H+E8+E8" or a Gram literal.')
@click.pass_context
def lattice_info(ctx, name):
    """Rank, signature, parity and discriminant group of a named lattice."""

    def go():
        try:
            lat = standard_lattice(name)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        res = {
            "name": name,
            "rank": lat.rank,
            "signature": list(lat.signature),
            "even": lat.is_even,
            "unimodular": lat.is_unimodular,
            "det": lat.det,
        }
        if lat.det != 0:
            res["discriminant_group"] = disc_group(lat).to_json()
        emit(ctx, "lattice info", "verified", res)

    _run(ctx, go)


# ---------------------------------------------------------------------------
# pseudo


@cli.group()
def pseudo():
    """Pseudolattices and quasi del Pezzo homomorphisms."""


@pseudo.command("classify")
@click.option("--file", "path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.pass_context
def pseudo_classify(ctx, path):
    """Canonical model of a quasi del Pezzo homomorphism."""

    def go():
        f = load_pair(_load_json(path))
        cert = is_quasi_del_pezzo(f)
        if not cert:
            emit(ctx, "pseudo classify", "refuted", {"quasi_del_pezzo": False, "reason": cert.reason}, (path,))
        res = dict(classify_qdp(f))
        res["basis"] = {"a": list(cert.basis.a), "b": list(cert.basis.b)}
        emit(ctx, "pseudo classify", "verified", res, (path,))

    _run(ctx, go)


# ---------------------------------------------------------------------------
# tyurin


@cli.group()
def tyurin():
    """Glued models of Tyurin degenerations."""


def _model_from_json(data):
    inputs = data.get("inputs", data)
    return build_glued(load_pair(inputs["pair1"]), load_pair(inputs["pair2"]))


@tyurin.command("build")
@click.option("--pair1", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--pair2", required=True, type=click.Path(exists=True, dir_okay=False))
@click.pass_context
def tyurin_build(ctx, pair1, pair2):
    """Glue two anticanonical pairs of opposite degree."""

    def go():
        d1, d2 = _load_json(pair1), _load_json(pair2)
        try:
            model = build_glued(load_pair(d1), load_pair(d2))
        except (GlueError, ValueError) as exc:
            emit(ctx, "tyurin build", "refuted", {"error": str(exc)}, (pair1, pair2))
        res = model.to_json()
        res["inputs"] = {"pair1": d1, "pair2": d2}
        emit(ctx, "tyurin build", "verified", res, (pair1, pair2))

    _run(ctx, go)


@tyurin.command("check-polarisation")
@click.option("--model", "model_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--lhat", required=True, type=click.Path(exists=True, dir_okay=False), help='{"lifted": [...]} or {"L": [...]}')
@click.option("--effective", type=click.Path(exists=True, dir_okay=False), default=None)
@click.pass_context
def tyurin_check(ctx, model_path, lhat, effective):
    """Stable Type II polarisation conditions for a lifted polarisation."""

    def go():
        model = _model_from_json(_load_json(model_path))
        pdata = _load_json(lhat)
        try:
            if "lifted" in pdata:
                pol = lifted_polarisation(model, pdata["lifted"])
            else:
                pol = lift_polarisation(model, lattice_polarisation(model, pdata["L"]))
        except ValueError as exc:
            emit(ctx, "tyurin check-polarisation", "refuted", {"error": str(exc)}, (model_path, lhat))
        eff = _load_json(effective) if effective else []
        if isinstance(eff, dict):
            eff = eff.get("effective", [])
        verdict = check_stable_polarisation(model, pol, eff, roots=pdata.get("roots"), nef_class=pdata.get("nef"))
        emit(ctx, "tyurin check-polarisation", verdict.status, verdict.to_json(), (model_path, lhat, effective))

    _run(ctx, go)


# ---------------------------------------------------------------------------
# fibration


@cli.group()
def fibration():
    """Elliptic fibrations and allowable loops."""


@fibration.command("build")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.pass_context
def fibration_build(ctx, config_path):
    """Build the glued model of a split fibration."""

    def go():
        data = _load_json(config_path)
        split = split_from_json(data)
        try:
            model = build_k3_split_model(split)
        except SplitError as exc:
            emit(ctx, "fibration build", "refuted", {"error": str(exc)}, (config_path,))
        emit(ctx, "fibration build", "verified", model.to_json(), (config_path,))

    _run(ctx, go)


@fibration.command("check-allowable")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.pass_context
def fibration_allowable(ctx, config_path):
    """Search for a basis of E certifying an allowable loop."""

    def go():
        split = split_from_json(_load_json(config_path))
        verdict = allowable_check(split)
        emit(ctx, "fibration check-allowable", "verified" if verdict else "refuted", verdict.to_json(), (config_path,))

    _run(ctx, go)


@fibration.command("check-polarisation")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True, dir_okay=False), help="Disc configuration or split.")
@click.option("--gamma", "gamma_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--side", type=click.IntRange(1, 2), default=1, show_default=True)
@click.pass_context
def fibration_polarisation(ctx, config_path, gamma_path, side):
    """Check a polarising lattice on one disc (Euler number below 12)."""

    def go():
        data = _load_json(config_path)
        if "fibres" in data and "side1" not in data:
            disc = disc_fibration(make_config(data))
        else:
            disc = build_k3_split_model(split_from_json(data)).disc(side)
        if gamma_path:
            g = _load_json(gamma_path)
            gamma = g["gamma"] if isinstance(g, dict) else g
        else:
            gamma = [v for comps in disc.component_classes() for v in comps]
        try:
            verdict = check_gamma_polarisation(disc, gamma)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        emit(ctx, "fibration check-polarisation", verdict.status, verdict.to_json(), (config_path, gamma_path))

    _run(ctx, go)


# ---------------------------------------------------------------------------
# mirror


@cli.group()
def mirror():
    """Mirror-pair verification."""


def _raw_pair(data):
    """``(q, k)`` or a homomorphism, plus the Néron-Severi rank and the naming scheme for classes."""
    name = data if isinstance(data, str) else data.get("surface") if isinstance(data, dict) else None
    if name is not None:
        q, k = named_pair(name)
        return (q, k), q.rank, ("quadric" if name == "P1xP1" else "chain")
    if "ns" in data:
        q = IntLattice.from_json(data["ns"])
        return (q, list(data["K"])), q.rank, data.get("classes", "chain")
    return load_pair(data), None, "chain"


def _degeneration_from_json(data):
    if "instance" in data:
        return dht_degeneration(data["instance"])
    (p1, r1, k1), (p2, r2, k2) = _raw_pair(data["pair1"]), _raw_pair(data["pair2"])
    roots = None
    if "roots" in data:
        roots = {}
        for side, items in data["roots"].items():
            size, kind = (r1, k1) if int(side) == 1 else (r2, k2)
            vecs = []
            for t in items:
                if isinstance(t, str):
                    if size is None:
                        raise UsageError("named root classes need a surface name or an explicit ns lattice")
                    t = parse_class(t, size, kind)
                vecs.append(t)
            roots[int(side)] = vecs
    return degeneration_side(p1, p2, roots=roots, L=data.get("L"))


def _fibration_from_json(data):
    if "instance" in data:
        return dht_fibration(data["instance"], data.get("gamma", "components"))
    split = split_from_json(data)
    return fibration_side(split, data.get("gamma", "components"))


@mirror.command("check")
@click.option("--degeneration", "deg_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--fibration", "fib_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--witness", "wit_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--auto/--no-auto", default=True, show_default=True, help="Construct the isometries when no witness is given.")
@click.pass_context
def mirror_check(ctx, deg_path, fib_path, wit_path, auto):
    """Check whether a Tyurin degeneration and a split fibration form a mirror pair."""

    def go():
        deg = _degeneration_from_json(_load_json(deg_path))
        fib = _fibration_from_json(_load_json(fib_path))
        if wit_path:
            witness = MirrorWitness.from_json(_load_json(wit_path))
        elif auto:
            witness = "auto"
        else:
            emit(ctx, "mirror check", "needs_witness", {"notes": ["no witness supplied and --no-auto given"]})
        rep = check_mirror_pair(deg, fib, witness)
        status = rep.status
        if status == "unknown":
            status = "needs_witness"
        res = rep.to_json()
        res["degeneration"] = deg.to_json()
        res["fibration"] = fib.to_json()
        emit(ctx, "mirror check", status, res, (deg_path, fib_path, wit_path))

    _run(ctx, go)


@mirror.command("dht-suite")
@click.option("--instance", "names", multiple=True, type=click.Choice(sorted(DHT_INSTANCES)))
@click.pass_context
def mirror_dht(ctx, names):
    """Run the four degree-two instances."""
    table = dht_suite(list(names) or None)
    ok = sum(1 for r in table.values() if r["status"] == "verified" and r["mirror_lattice_matches"])
    res = {"summary": f"{ok}/{len(table)} instances verified", "instances": table}
    if ctx.obj["format"] == "text":
        lines = [f"{'instance':<8} {'degree':<6} {'status':<9} mirror_lattice"]
        for name, r in table.items():
            lines.append(f"{name:<8} {str(r['degree']):<6} {r['status']:<9} {r['mirror_lattice_matches']}")
        lines.append(res["summary"])
        click.echo("\n".join(lines))
        ctx.exit(0 if ok == len(table) else 1)
    emit(ctx, "mirror dht-suite", "verified" if ok == len(table) else "refuted", res)


# ---------------------------------------------------------------------------
# golden files


def _run_case(case_path: Path) -> tuple[int, dict | None]:
    from click.testing import CliRunner

    case = json.loads(case_path.read_text())
    argv = [str((case_path.parent / a[1:]).resolve()) if isinstance(a, str) and a.startswith("@") else a for a in case["argv"]]
    res = CliRunner().invoke(cli, argv)
    try:
        report = json.loads(res.stdout)
    except ValueError:
        report = None
    if report is not None:
        report.pop("input_digests", None)
    return res.exit_code, report


@cli.command("golden")
@click.option("--dir", "directory", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--update", is_flag=True, help="Rewrite the expected reports from the current output.")
@click.pass_context
def golden(ctx, directory, update):
    """Re-run recorded cases (``*.case.json``) and compare their reports.

    A case holds ``argv`` (arguments starting with ``@`` are paths relative to
    the case file), the expected ``exit_code`` and the expected ``report``
    without input digests.
    """
    results = {}
    for path in sorted(Path(directory).glob("*.case.json")):
        code, report = _run_case(path)
        case = json.loads(path.read_text())
        if update:
            case["exit_code"], case["report"] = code, report
            path.write_text(json.dumps(case, indent=2) + "\n")
            results[path.name] = "updated"
        else:
            same = code == case.get("exit_code") and report == case.get("report")
            results[path.name] = "match" if same else "differs"
    failed = [k for k, v in results.items() if v == "differs"]
    emit(ctx, "golden", "refuted" if failed else "verified", {"cases": results, "failed": failed})


# ---------------------------------------------------------------------------
# selftest


@cli.command("selftest")
@click.option("--cases", type=click.IntRange(1, 10_000), default=50, show_default=True)
@click.pass_context
def selftest(ctx, cases):
    """Randomised identities (seeded by --seed): twist multiplicativity and Smith form round-trips."""
    rng = random.Random(ctx.obj["seed"])

    def primitive():
        while True:
            v = (rng.randint(-3, 3), rng.randint(-3, 3))
            if math.gcd(*v) == 1:
                return v

    failures = []
    for i in range(cases):
        w1 = [primitive() for _ in range(rng.randint(1, 4))]
        w2 = [primitive() for _ in range(rng.randint(1, 4))]
        f1, f2 = z_chain(w1)[1], z_chain(w2)[1]
        _, f = glue(f1, f2, 1)
        if twist(f) != mx.matmul(twist(f1), twist(f2)):
            failures.append({"case": i, "identity": "twist", "words": [w1, w2]})
        a = [[rng.randint(-5, 5) for _ in range(3)] for _ in range(3)]
        u, d, v = mx.smith_normal_form(a)
        if mx.matmul(mx.matmul(u, a), v) != d:
            failures.append({"case": i, "identity": "snf", "matrix": a})
    status = "verified" if not failures else "refuted"
    emit(ctx, "selftest", status, {"seed": ctx.obj["seed"], "cases": cases, "failures": failures})


def main(argv=None) -> int:
    """Console entry point; returns the exit code."""
    try:
        rv = cli.main(args=argv, prog_name="artifact", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        exc.show()
        return USAGE
    except click.Abort:
        return USAGE
    return rv if isinstance(rv, int) else 0


def run(argv) -> int:
    return main(list(argv))


if __name__ == "__main__":
    sys.exit(main())
