"""Command line: ``o2dplan <command> [--config run.json] [flags]``.

Flags override values from the config file. Every command that writes an
output directory also writes ``config.json`` with the resolved settings.
Exit codes: 0 success, 1 domain error (no solution, failed verification,
unsolvable or mismatching plan, bad input), 2 resource cap.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

import click

from . import FORMAT_VERSIONS, __version__

EXIT_OK, EXIT_DOMAIN, EXIT_CAP = 0, 1, 2


@dataclass
class RunConfig:
    domain: str | None = None
    registry: str | None = None
    data: str | None = None
    instances: list[str] = field(default_factory=list)
    m: int = 2
    max_arity: int = 3
    num_predicates: int = 12
    max_iterations: int = 100
    seed: int = 0
    out: str | None = None
    time_limit: float | None = None
    search_cap: int = 1_000_000
    jobs: int = 1

    @classmethod
    def load(cls, path: str | None, **overrides) -> "RunConfig":
        raw = json.loads(Path(path).read_text()) if path else {}
        unknown = set(raw) - {f.name for f in dataclasses.fields(cls)}
        if unknown:
            raise click.UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        raw.update({k: v for k, v in overrides.items() if v is not None and v != ()})
        if isinstance(raw.get("instances"), str):
            raw["instances"] = [x for x in raw["instances"].split(",") if x]
        return cls(**raw)

    def save(self, outdir: Path) -> None:
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / "config.json").write_text(json.dumps(dataclasses.asdict(self), indent=1) + "\n")

    def beta(self):
        from .learner import Hyperparams
        return Hyperparams(self.max_arity, self.num_predicates, self.time_limit)


class _Fail(click.ClickException):
    def __init__(self, message: str, code: int = EXIT_DOMAIN):
        super().__init__(message)
        self.exit_code = code


def _out_dir(cfg: RunConfig) -> Path:
    if not cfg.out:
        raise click.UsageError("an output directory is required (--out or config 'out')")
    return Path(cfg.out)


def _load_data(cfg: RunConfig):
    """(dataset, signature, rendered-or-None) from --data or a bundled domain."""
    from .datagen import generate, load_dataset, load_registry
    if cfg.data:
        ds, sig = load_dataset(cfg.data)
        rd = None
    elif cfg.domain:
        reg = load_registry(cfg.registry) if cfg.registry else None
        rd = generate(cfg.domain, reg)
        ds, sig = rd.dataset, rd.signature
    else:
        raise click.UsageError("give --data DIR or --domain NAME")
    if cfg.instances:
        missing = set(cfg.instances) - set(ds.instance_order)
        if missing:
            raise _Fail(f"unknown instances: {', '.join(sorted(missing))}")
        ds = ds.restrict(cfg.instances)
    return ds, sig, rd


def _pool(cfg: RunConfig, ds, sig):
    from .predicate_pool import build_pool
    return build_pool(list(ds.states.values()), sig, cfg.m, jobs=cfg.jobs)


def _read_domain(path: str):
    from .grounding import parse_domain
    return parse_domain(Path(path).read_text())


_common = [
    click.option("--config", "config", type=click.Path(exists=True, dir_okay=False), help="JSON run config."),
    click.option("--domain", help="Bundled hidden domain name."),
    click.option("--registry", type=click.Path(exists=True, dir_okay=False), help="Rendering registry JSON."),
    click.option("--data", type=click.Path(exists=True, file_okay=False), help="Dataset directory."),
    click.option("--instances", help="Comma-separated instance ids."),
    click.option("-m", "m", type=int, help="Pool complexity bound."),
    click.option("--jobs", type=int, help="Worker processes."),
    click.option("--out", type=click.Path(file_okay=False), help="Output directory."),
]


def common(f):
    for opt in reversed(_common):
        f = opt(f)
    return f


def _version(ctx, _param, value):
    if not value or ctx.resilient_parsing:
        return
    click.echo(f"o2dplan {__version__}")
    for k, v in FORMAT_VERSIONS.items():
        click.echo(f"  {k} format v{v}")
    ctx.exit()


@click.group()
@click.option("--version", is_flag=True, callback=_version, expose_value=False, is_eager=True,
              help="Print package and file format versions.")
@click.option("-v", "--verbose", count=True)
def main(verbose: int):
    """Learn grounded STRIPS domains from O2D scene data and plan with them."""
    level = logging.WARNING - 10 * min(verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


@main.command("gen-data")
@common
def gen_data(config, **kw):
    """Enumerate, render and dump a bundled domain's data pool."""
    from .datagen import RenderError, dump_dataset
    cfg = RunConfig.load(config, **kw)
    out = _out_dir(cfg)
    try:
        ds, sig, rd = _load_data(cfg)
    except RenderError as exc:
        raise _Fail(str(exc)) from None
    if not ds.instance_order:
        raise _Fail("empty instance list")
    dump_dataset(ds, out, sig)
    cfg.save(out)
    n_edges = sum(1 for _ in ds.edges())
    click.echo(f"{len(ds.instance_order)} instances, {len(ds.states)} states, {n_edges} edges -> {out}")


@main.command("build-pool")
@common
def build_pool_cmd(config, **kw):
    """Build the predicate pool P_m and list its entries."""
    cfg = RunConfig.load(config, **kw)
    ds, sig, _ = _load_data(cfg)
    pool = _pool(cfg, ds, sig)
    from .predicate_pool import detect_constants
    consts = detect_constants(pool).names
    if cfg.out:
        out = Path(cfg.out)
        cfg.save(out)
        (out / "pool.txt").write_text(pool.dump())
    click.echo(f"|P_{cfg.m}| = {len(pool.entries)}; constants: {', '.join(consts) or '-'}")
    if not cfg.out:
        click.echo(pool.dump(), nl=False)


@main.command("learn")
@common
@click.option("--max-arity", type=int)
@click.option("--num-predicates", type=int)
@click.option("--max-iterations", type=int)
@click.option("--time-limit", type=float)
def learn_cmd(config, **kw):
    """Incremental learning; writes domain.txt, trace.tsv and config.json."""
    from .grounding import format_domain
    from .learner import LearnerCap, NoSolution
    from .verifier import BudgetExhausted, incremental_learn
    cfg = RunConfig.load(config, **kw)
    out = _out_dir(cfg)
    cfg.save(out)
    ds, sig, _ = _load_data(cfg)
    pool = _pool(cfg, ds, sig)
    try:
        res = incremental_learn(ds, pool, cfg.beta(), cfg.max_iterations)
    except NoSolution as exc:
        raise _Fail(f"no solution: {exc}") from None
    except (LearnerCap, BudgetExhausted) as exc:
        raise _Fail(f"resource cap: {exc}", EXIT_CAP) from None
    except ValueError as exc:
        raise _Fail(str(exc)) from None
    text = format_domain(res.grounded)
    (out / "domain.txt").write_text(text)
    (out / "trace.tsv").write_text(res.trace.to_tsv())
    click.echo(text, nl=False)
    click.echo(f"cost {res.cost} after {len(res.trace.records)} iteration(s) -> {out}")


@main.command("verify")
@common
@click.option("--domain-file", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--marked-only", is_flag=True, help="Check C1 over marked states only.")
def verify_cmd(config, domain_file, marked_only, **kw):
    """Check a learned domain file against a dataset."""
    from .verifier import verify
    cfg = RunConfig.load(config, **kw)
    ds, _, _ = _load_data(cfg)
    v = verify(_read_domain(domain_file), ds, c1_all=not marked_only)
    click.echo(v.status)
    if not v.ok:
        click.echo(f"{v.failing_instance}: {v.detail}")
        for k in v.delta:
            click.echo(f"  {k[0]} {k[1]}")
        sys.exit(EXIT_DOMAIN)


@main.command("plan")
@click.option("--domain-file", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--s0", "s0_file", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--sg", "sg_file", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--optimal/--greedy", default=True, help="BFS (default) or GBFS with h_add.")
@click.option("--replay", "hidden", help="Replay through the simulator of this bundled domain.")
@click.option("--search-cap", type=int, default=1_000_000)
@click.option("--out", type=click.Path(file_okay=False))
def plan_cmd(domain_file, s0_file, sg_file, optimal, hidden, search_cap, out):
    """Plan between two O2D states with a learned domain."""
    from .grounding import GroundingError, build_instance
    from .o2d_core import O2DError, parse_state, serialize_state
    from .planner import PlanError, Simulator, plan_bfs, plan_gbfs_hadd
    from .planner import replay as do_replay
    from .strips_core import CapExceeded
    gd = _read_domain(domain_file)
    sig = None
    sim = None
    if hidden:
        from .datagen import generate
        rd = generate(hidden)
        sig = rd.signature
        sim = Simulator.from_rendered(rd)
    try:
        s0 = parse_state(Path(s0_file).read_text(), sig)
        sg = parse_state(Path(sg_file).read_text(), sig)
        inst = build_instance(gd, s0, sg)
    except (O2DError, GroundingError) as exc:
        raise _Fail(str(exc)) from None
    try:
        plan = (plan_bfs if optimal else plan_gbfs_hadd)(gd.domain, inst, search_cap)
    except CapExceeded as exc:
        raise _Fail(str(exc), EXIT_CAP) from None
    if plan is None:
        raise _Fail("unsolvable: the goal is unreachable in the learned domain")
    click.echo(plan.to_text(), nl=False)
    click.echo(f"; {len(plan)} step(s)")
    outdir = Path(out) if out else None
    if outdir:
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / "plan.txt").write_text(plan.to_text())
    if sim is not None:
        try:
            traj = do_replay(plan, gd, sim, s0)
        except PlanError as exc:
            raise _Fail(f"replay mismatch: {exc}") from None
        click.echo(f"; replay ok, trajectory of {len(traj)} state(s) ends at the goal: {traj[-1] == sg}")
        if outdir:
            tdir = outdir / "trajectory"
            tdir.mkdir(exist_ok=True)
            for i, s in enumerate(traj):
                (tdir / f"{i:04d}.o2d").write_text(serialize_state(s))


@main.command("export-pddl")
@click.option("--domain-file", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--s0", "s0_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--sg", "sg_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(dir_okay=False), help="Output file (default stdout).")
def export_pddl_cmd(domain_file, s0_file, sg_file, out):
    """PDDL for a learned domain, with a problem when --s0 and --sg are given."""
    from .grounding import build_instance
    from .o2d_core import parse_state
    from .strips_core import export_pddl
    gd = _read_domain(domain_file)
    inst = None
    if bool(s0_file) != bool(sg_file):
        raise click.UsageError("--s0 and --sg go together")
    if s0_file:
        inst = build_instance(gd, parse_state(Path(s0_file).read_text()), parse_state(Path(sg_file).read_text()))
    text = export_pddl(gd.domain, inst, comments={p: gd.display(p) for p in gd.sigma})
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)


@main.command("emit-asp")
@common
@click.option("--max-arity", type=int)
@click.option("--num-predicates", type=int)
def emit_asp_cmd(config, **kw):
    """Write the ASP program and the facts for the marked part of a dataset."""
    from .asp import emit_asp
    cfg = RunConfig.load(config, **kw)
    out = _out_dir(cfg)
    ds, sig, _ = _load_data(cfg)
    enc = emit_asp(ds, _pool(cfg, ds, sig), cfg.beta())
    cfg.save(out)
    (out / "program.lp").write_text(enc.program)
    (out / "facts.lp").write_text(enc.facts)
    click.echo(f"{len(enc.features)} feature(s), {len(enc.instances)} instance(s) -> {out}")


if __name__ == "__main__":
    main()
