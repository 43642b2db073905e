"""Command-line front end.

Exit codes: 0 success, 1 bad input, 2 start vertex outside the winning
region, 3 a check ran and failed (rejected strategy, oracle mismatch).
"""

from __future__ import annotations

import json
import sys
import time
from fractions import Fraction
from pathlib import Path

import click

from . import instances
from .combined import (combined_window_bound, sas_bwmp, sas_fwmp, sls_bwmp,
                       sls_fwmp, sure_dirfwmp_as_buchi, sure_dirfwmp_pos_reach)
from .io import MdpSyntaxError, parse_rational, read_mdp
from .mdp import MdpError
from .oracle import (Claim, oracle_regions, random_case, simulate,
                     validate_strategy)
from .probabilistic import almost_sure_bwmp, almost_sure_buchi, almost_sure_fwmp
from .strategy import (MealyStrategy, StartNotWinning, synth_almost_sure_buchi,
                       synth_almost_sure_fwmp, synth_sas, synth_sas_bwmp,
                       synth_sdab, synth_sdpr, synth_sls, synth_sure_fwmp)
from .sure import (bwmp_window_bound, sure_bwmp, sure_dir_bwmp, sure_dir_fwmp,
                   sure_fwmp, sure_good_win)

SOLVE_OBJECTIVES = ("gw", "dir-fwmp", "fwmp", "as-fwmp", "dir-bwmp", "bwmp", "as-bwmp",
                    "as-buchi", "sdpr", "sdab", "sas-fwmp", "sls-fwmp", "sas-bwmp", "sls-bwmp")
SYNTH_OBJECTIVES = ("fwmp", "as-fwmp", "as-buchi", "sdpr", "sdab", "sas-fwmp", "sas-bwmp",
                    "sls-fwmp")
CLAIMS = ("sure-dirfwmp", "sure-fwmp", "as-fwmp", "prob-fwmp", "as-buchi", "pos-reach-within")


class Failure(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _rational(ctx, param, value):
    if value is None:
        return None
    try:
        return parse_rational(value)
    except MdpSyntaxError:
        raise click.BadParameter(f"{value!r} is not an integer or a/b rational")


def load_input(path: str):
    """A file path, or the name of a bundled instance."""
    p = Path(path)
    if p.exists():
        return read_mdp(p)
    stem = p.name[:-4] if p.name.endswith(".mdp") else p.name
    if stem in instances.NAMES:
        return instances.load(stem)
    raise Failure(1, f"no such file or bundled instance: {path}")


def _need(**kw):
    missing = [k for k, v in kw.items() if v is None]
    if missing:
        raise Failure(1, "missing option(s): " + ", ".join("--" + k for k in missing))


def _targets(m, names):
    try:
        return m.ids(n.strip() for n in ",".join(names).split(",") if n.strip())
    except (KeyError, MdpError) as exc:
        raise Failure(1, f"unknown target vertex: {exc}")


def _start(m, name):
    if name is None:
        return None
    try:
        return m.vertex(name)
    except (KeyError, MdpError):
        raise Failure(1, f"unknown start vertex {name!r}")


def run_solve(m, obj, length, lam, alpha, beta, target):
    """Region and trace for one objective, as JSON-ready values."""
    trace = None
    params = {}
    if obj in ("gw", "dir-fwmp", "fwmp", "as-fwmp"):
        _need(l=length, lam=lam)
        params = {"length": length, "threshold": str(lam)}
        fn = {"gw": sure_good_win, "dir-fwmp": sure_dir_fwmp, "fwmp": sure_fwmp,
              "as-fwmp": almost_sure_fwmp}[obj]
        res = fn(m, length, lam)
        region = res.region
        if obj != "as-fwmp":
            trace = [m.names_of(x) for x in res.trace]
    elif obj in ("dir-bwmp", "bwmp", "as-bwmp"):
        _need(lam=lam)
        params = {"threshold": str(lam), "windowBound": bwmp_window_bound(m, lam)}
        fn = {"dir-bwmp": sure_dir_bwmp, "bwmp": sure_bwmp, "as-bwmp": almost_sure_bwmp}[obj]
        region = fn(m, lam).region
    elif obj == "as-buchi":
        params = {"target": sorted(m.names_of(target))}
        region = almost_sure_buchi(m, target)
    elif obj in ("sdpr", "sdab"):
        _need(l=length, alpha=alpha)
        params = {"length": length, "alpha": str(alpha), "target": sorted(m.names_of(target))}
        if obj == "sdpr":
            res = sure_dirfwmp_pos_reach(m, length, alpha, target)
            region = res.region
            trace = [{"edge": [m.name(m.edge(e).src), m.name(m.edge(e).dst)], "good": ok}
                     for e, ok in res.verdicts]
        else:
            res = sure_dirfwmp_as_buchi(m, length, alpha, target)
            region = res.region
            trace = [sorted(m.names_of(lv.region)) for lv in res.levels]
    elif obj in ("sas-fwmp", "sls-fwmp"):
        _need(l=length, alpha=alpha, beta=beta)
        params = {"length": length, "alpha": str(alpha), "beta": str(beta)}
        if obj == "sas-fwmp":
            region, tr = sas_fwmp(m, length, alpha, beta)
            trace = tr.to_json(m)
        else:
            region = sls_fwmp(m, length, alpha, beta)
    else:
        _need(alpha=alpha, beta=beta)
        params = {"alpha": str(alpha), "beta": str(beta),
                  "windowBound": combined_window_bound(m, alpha, beta)}
        if obj == "sas-bwmp":
            region, tr = sas_bwmp(m, alpha, beta)
            trace = tr.to_json(m)
        else:
            region = sls_bwmp(m, alpha, beta)
    return region, params, trace


def _emit(report: dict, fmt: str):
    if fmt == "json":
        click.echo(json.dumps(report, indent=2, sort_keys=True))
        return
    for key in sorted(report):
        value = report[key]
        if isinstance(value, (dict, list)):
            value = json.dumps(value, sort_keys=True)
        click.echo(f"{key}: {value}")


@click.group()
def main():
    """Window mean-payoff objectives on MDPs: solve, synthesize, verify."""


def _guard(fn):
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except Failure as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(exc.code)
        except StartNotWinning as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
        except (MdpError, KeyError, ValueError, OSError, json.JSONDecodeError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


_common = [
    click.option("--l", "length", type=int, help="window length (decimal)"),
    click.option("--lam", callback=_rational, help="threshold for single objectives"),
    click.option("--alpha", callback=_rational, help="sure threshold"),
    click.option("--beta", callback=_rational, help="almost-sure / limit-sure threshold"),
    click.option("--target", multiple=True, help="target vertex names (comma separated)"),
    click.option("--format", "fmt", type=click.Choice(["json", "text"]), default="json"),
]


def common(fn):
    for opt in reversed(_common):
        fn = opt(fn)
    return fn


@main.command()
@click.argument("mdp")
@click.option("--obj", type=click.Choice(SOLVE_OBJECTIVES), required=True)
@common
@click.option("--start", help="fail with exit code 2 unless this vertex wins")
@click.option("--timings", is_flag=True, help="include wall-clock timings (not byte-stable)")
@_guard
def solve(mdp, obj, length, lam, alpha, beta, target, fmt, start, timings):
    """Compute a winning region."""
    m = load_input(mdp)
    tgt = _targets(m, target)
    t0 = time.perf_counter()
    region, params, trace = run_solve(m, obj, length, lam, alpha, beta, tgt)
    report = {"objective": obj, "params": params, "region": sorted(m.names_of(region))}
    if trace is not None:
        report["trace"] = trace
    if timings:
        report["timings"] = {"solveSeconds": round(time.perf_counter() - t0, 6)}
    _emit(report, fmt)
    s = _start(m, start)
    if s is not None and s not in region:
        raise StartNotWinning(f"start vertex {start} is not in the winning region")


@main.command()
@click.argument("mdp")
@click.option("--obj", type=click.Choice(SYNTH_OBJECTIVES), required=True)
@common
@click.option("--eps", callback=_rational, help="error bound for sls-fwmp")
@click.option("--start", help="start vertex (default: the whole region)")
@click.option("--out", type=click.Path(dir_okay=False), help="also write the strategy here")
@_guard
def synthesize(mdp, obj, length, lam, alpha, beta, target, fmt, eps, start, out):
    """Build a Mealy-machine witness strategy."""
    m = load_input(mdp)
    tgt = _targets(m, target)
    s = _start(m, start)
    if obj == "fwmp":
        _need(l=length, lam=lam)
        sigma = synth_sure_fwmp(m, length, lam, s)
    elif obj == "as-fwmp":
        _need(l=length, lam=lam)
        sigma = synth_almost_sure_fwmp(m, length, lam, s)
    elif obj == "as-buchi":
        sigma = synth_almost_sure_buchi(m, tgt, s)
    elif obj == "sdpr":
        _need(l=length, alpha=alpha)
        sigma = synth_sdpr(m, length, alpha, tgt, s)
    elif obj == "sdab":
        _need(l=length, alpha=alpha)
        sigma = synth_sdab(m, length, alpha, tgt, s)
    elif obj == "sas-fwmp":
        _need(l=length, alpha=alpha, beta=beta)
        sigma = synth_sas(m, length, alpha, beta, s)
    elif obj == "sas-bwmp":
        _need(alpha=alpha, beta=beta)
        sigma = synth_sas_bwmp(m, alpha, beta, s)
    else:
        _need(l=length, alpha=alpha, beta=beta, eps=eps)
        sigma = synth_sls(m, length, alpha, beta, eps, s)
    data = sigma.to_json(m)
    if out:
        Path(out).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    _emit({"objective": obj, "memory": sigma.memory, "strategy": data}, fmt)


def _load_strategy(m, path):
    data = json.loads(Path(path).read_text())
    if "strategy" in data:
        data = data["strategy"]
    return MealyStrategy.from_json(m, data)


@main.command()
@click.argument("mdp")
@click.argument("strategy", type=click.Path(exists=True, dir_okay=False))
@click.option("--claim", type=click.Choice(CLAIMS), required=True)
@common
@click.option("--bound", callback=_rational, help="probability bound")
@click.option("--steps", type=int, default=0, help="step budget for pos-reach-within")
@click.option("--start", help="check from this vertex only")
@_guard
def validate(mdp, strategy, claim, length, lam, alpha, beta, target, fmt, bound, steps, start):
    """Check a strategy exactly on its induced Markov chain."""
    m = load_input(mdp)
    sigma = _load_strategy(m, strategy)
    thr = lam if lam is not None else (alpha if alpha is not None else Fraction(0))
    c = Claim(claim, length or 1, thr, _targets(m, target),
              bound if bound is not None else Fraction(1), steps)
    s = _start(m, start)
    verdict = validate_strategy(m, sigma, c, None if s is None else [s])
    _emit(verdict.to_json(m), fmt)
    if not verdict.ok:
        sys.exit(3)


@main.command("oracle-check")
@click.option("--seed", type=int, default=7)
@click.option("--count", type=int, default=200)
@click.option("--verbose", is_flag=True)
@_guard
def oracle_check(seed, count, verbose):
    """Compare the solvers with the product-game oracle on random MDPs."""
    matched = 0
    for i in range(count):
        m, length, lam, target = random_case(seed, i)
        want = oracle_regions(m, length, lam, target)
        got = {
            "sure_dir_fwmp": sure_dir_fwmp(m, length, lam).region,
            "sure_fwmp": sure_fwmp(m, length, lam).region,
            "almost_sure_fwmp": almost_sure_fwmp(m, length, lam).region,
            "almost_sure_buchi": almost_sure_buchi(m, target),
        }
        bad = [k for k in want if want[k] != got[k]]
        if bad:
            click.echo(f"instance {i}: mismatch in {', '.join(bad)}")
        else:
            matched += 1
            if verbose:
                click.echo(f"instance {i}: ok ({len(m)} vertices, l={length})")
    click.echo(f"{matched}/{count} regions matched")
    if matched != count:
        sys.exit(3)


@main.command("simulate")
@click.argument("mdp")
@click.argument("strategy", type=click.Path(exists=True, dir_okay=False))
@click.option("--start", required=True)
@click.option("--steps", type=int, default=1000)
@click.option("--runs", type=int, default=100)
@click.option("--seed", type=int, default=0)
@click.option("--window", "windows", multiple=True, help="LENGTH:THRESHOLD, repeatable")
@_guard
def simulate_cmd(mdp, strategy, start, steps, runs, seed, windows):
    """Monte-Carlo runs of a strategy (smoke evidence only)."""
    m = load_input(mdp)
    sigma = _load_strategy(m, strategy)
    parsed = []
    for w in windows:
        l, _, t = w.partition(":")
        if not l.isdigit() or not t:
            raise Failure(1, f"bad --window {w!r}; expected LENGTH:THRESHOLD")
        parsed.append((int(l), parse_rational(t)))
    report = simulate(m, sigma, _start(m, start), steps, runs, seed, parsed)
    click.echo(json.dumps(report, indent=2, sort_keys=True))


@main.command()
@click.option("--sizes", default="2,3,4,5", help="chain lengths to try")
@click.option("--lengths", default="2,4,8", help="window lengths to try")
@_guard
def bench(sizes, lengths):
    """Time the sure-almost-sure solver on the coin-toss chain family."""
    rows = []
    for k in (int(x) for x in sizes.split(",")):
        m = instances.chain_m_p(k, Fraction(1, 2), 0, 1)
        for length in (int(x) for x in lengths.split(",")):
            t0 = time.perf_counter()
            region, _ = sas_fwmp(m, length, 0, 1)
            rows.append({"vertices": len(m), "length": length, "region": len(region),
                         "seconds": round(time.perf_counter() - t0, 4)})
    for r in rows:
        click.echo(f"|V|={r['vertices']:3d}  l={r['length']:3d}  |W|={r['region']:3d}  "
                   f"{r['seconds']:.4f}s")


@main.command("instances")
@click.argument("name", required=False)
def instances_cmd(name):
    """List bundled instances, or print one."""
    if name is None:
        for n in instances.NAMES:
            click.echo(n)
        return
    if name not in instances.NAMES:
        click.echo(f"error: unknown instance {name!r}", err=True)
        sys.exit(1)
    click.echo(instances.source(name), nl=False)


if __name__ == "__main__":
    main()
