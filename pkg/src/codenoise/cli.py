"""Command-line driver: ``codenoise <command> [options]``.

Every command first builds an :class:`ExperimentSpec`, then executes it; the
spec is embedded in the output so ``codenoise run --spec`` reproduces a file
byte for byte.  Exit codes: 0 success, 2 bad input, 3 a checked inequality
or cross-check failed.
"""
from __future__ import annotations

import csv
import io
import json
import math
import sys
from collections.abc import Callable, Sequence
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import click

from . import __version__
from .census import (CENSUS_COLUMNS, ENSEMBLE_COLUMNS, census, census_oracle, containment_frequency,
                     ensemble_expectation, fixed_tuple, ordered_map)
from .erasure import erasure_profile, has_exact_route, m_lambda_exact
from .errors import CapacityError, ContractViolation, InconsistencyError
from .gf2 import LinearCode, full_space, read_matrix, reed_muller, repetition_pair, sample_random_code
from .psi import PSI_COLUMNS, psi_moment, psi_variational
from .renyi import lambda_of, p_ue, prop13_actual, prop13_lower, prop13_upper, theorem12_sides
from . import cube

EXIT_INPUT = 2
EXIT_CONTRACT = 3
CHECK_TOL = 1e-9


class InputError(ValueError):
    pass


@dataclass
class ExperimentSpec:
    command: str
    params: dict = field(default_factory=dict)
    code: dict | None = None
    output: str | None = None
    format: str = "csv"

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> ExperimentSpec:
        data = json.loads(text)
        unknown = set(data) - {"command", "params", "code", "output", "format"}
        if unknown:
            raise InputError(f"unknown spec fields {sorted(unknown)}")
        if "command" not in data:
            raise InputError("spec has no command")
        return cls(**data)


# -- parsing helpers -------------------------------------------------------------

def parse_number(text: str) -> float:
    text = text.strip()
    if text.lower() in ("inf", "infinity"):
        return math.inf
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"not a number: {text!r}") from exc


def parse_grid(text: str) -> list[float]:
    """``start:stop:step`` (stop included), or a comma-separated list."""
    text = str(text).strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise InputError(f"grid must be start:stop:step, got {text!r}")
        start, stop, step = (Fraction(p.strip()) for p in parts)
        if step <= 0 or stop < start:
            raise InputError(f"invalid grid {text!r}")
        count = int((stop - start) / step + Fraction(1, 10**9)) + 1
        return [round(float(start + t * step), 12) for t in range(count)]
    values = [parse_number(p) for p in text.split(",") if p.strip()]
    if not values:
        raise InputError("empty grid")
    return values


def _fmt(v):
    if isinstance(v, float):
        return "inf" if v == math.inf else repr(v)
    return "" if v is None else v


# -- code sources -----------------------------------------------------------------

def code_source(code_file, rm, random_, seed, rep_pair, full) -> dict | None:
    given = [x for x in (code_file, rm, random_, rep_pair, full) if x]
    if len(given) > 1:
        raise InputError("give at most one code source")
    if code_file:
        return {"kind": "file", "path": str(code_file)}
    if rm:
        return {"kind": "rm", "r": int(rm[0]), "m": int(rm[1])}
    if random_:
        return {"kind": "random", "n": int(random_[0]), "lambda": str(Fraction(random_[1])), "seed": seed}
    if rep_pair:
        return {"kind": "repetition-pair", "n": rep_pair}
    if full:
        return {"kind": "full", "n": full}
    return None


def build_code(src: dict | None) -> LinearCode:
    if not src:
        raise InputError("a code source is required")
    kind = src.get("kind")
    if kind == "file":
        return read_matrix(src["path"])
    if kind == "rm":
        return reed_muller(src["r"], src["m"])
    if kind == "random":
        return sample_random_code(src["n"], Fraction(src["lambda"]), src["seed"])
    if kind == "repetition-pair":
        return repetition_pair(src["n"])
    if kind == "full":
        return full_space(src["n"])
    raise InputError(f"unknown code source {kind!r}")


# -- commands ------------------------------------------------------------------------

@dataclass
class Result:
    columns: Sequence[str]
    rows: list[dict]
    ok: bool = True
    summary: dict = field(default_factory=dict)


def exec_capacity(spec: ExperimentSpec) -> Result:
    code = build_code(spec.code)
    p = spec.params
    method = p.get("method", "auto")
    if method == "auto":
        method = "exact" if has_exact_route(code) else "mc"
    prof = erasure_profile(code, parse_grid(p.get("lambda_grid", "0:1:0.05")), method,
                           p.get("samples", 200_000), p.get("seed", 0))
    return Result(("code_id", "lambda", "m_over_n", "stderr", "method", "seed"),
                  [{"code_id": code.label, **r} for r in prof.rows()])


RENYI_COLUMNS = ("code_id", "q", "eps", "lambda", "lhs", "rhs", "bound_type", "holds", "seed")


def exec_renyi(spec: ExperimentSpec) -> Result:
    code = build_code(spec.code)
    p = spec.params
    qs = parse_grid(p.get("q", "2,3,4,inf"))
    for q in qs:
        if not (q == math.inf or (q == int(q) and 2 <= q <= 16)):
            raise InputError(f"q must be an integer in 2..16 or inf, got {q}")
    epss = parse_grid(p.get("eps_grid", "0.05:0.45:0.05"))
    bound = p.get("bound", "all")
    seed = (spec.code or {}).get("seed")
    n = code.n
    R = float(code.rate)
    f = cube.scaled_indicator(code)

    def point(qe):
        q, eps = qe
        lam = lambda_of(q, eps)
        rows = []
        if bound in ("all", "theorem12"):
            lhs, rhs = theorem12_sides(f, q, eps, code)
            rows.append((lhs / n, rhs / n, "theorem12"))
        if bound in ("all", "prop13_upper") and lam >= R:
            rows.append((prop13_actual(code, q, eps), prop13_upper(code, q, eps), "prop13_upper"))
        if bound in ("all", "prop13_lower"):
            # lower bound: bound in lhs, actual value in rhs
            rows.append((prop13_lower(f, q, eps), prop13_actual(code, q, eps), "prop13_lower"))
        return [{"code_id": code.label, "q": q, "eps": eps, "lambda": lam, "lhs": a, "rhs": b,
                 "bound_type": t, "holds": int(a <= b + CHECK_TOL), "seed": seed} for a, b, t in rows]

    out = [r for chunk in ordered_map(point, [(q, e) for q in qs for e in epss]) for r in chunk]
    return Result(RENYI_COLUMNS, out, all(r["holds"] for r in out))


def exec_psi(spec: ExperimentSpec) -> Result:
    p = spec.params
    qs = parse_grid(p.get("q", "4"))
    gammas = parse_grid(p.get("gamma_grid", "0.05:0.5:0.05"))
    method = p.get("method", "variational")
    n = p.get("n", 512)

    def point(qg):
        q, g = qg
        vals = []
        if method in ("variational", "both"):
            vals.append(psi_variational(q, g))
        if method in ("moment", "both"):
            vals.append(psi_moment(q, g, n))
        return [v.row() for v in vals]

    rows = [r for chunk in ordered_map(point, [(q, g) for q in qs for g in gammas]) for r in chunk]
    return Result(PSI_COLUMNS, rows)


PUE_COLUMNS = ("code_id", "n", "k", "eps", "p_ue", "exponent", "certified", "holds")


def exec_pue(spec: ExperimentSpec) -> Result:
    code = build_code(spec.code)
    epss = parse_grid(spec.params.get("eps_grid", "0.05:0.5:0.05"))
    R = float(code.rate)
    exact = has_exact_route(code)
    certified = (1 - R) - m_lambda_exact(code, code.rate) / code.n if exact else None
    rows = []
    for eps in epss:
        p = p_ue(code, eps)
        exponent = -math.log2(p) / code.n if p > 0 else math.inf
        admissible = eps < 0.5 and 1 + math.log2(1 - eps) <= R + 1e-15 and certified is not None
        holds = (exponent >= certified - CHECK_TOL) if admissible else None
        rows.append({"code_id": code.label, "n": code.n, "k": code.k, "eps": eps, "p_ue": p,
                     "exponent": exponent, "certified": certified if admissible else None,
                     "holds": None if holds is None else int(holds)})
    return Result(PUE_COLUMNS, rows, all(r["holds"] != 0 for r in rows))


ORACLE_COLUMNS = CENSUS_COLUMNS + ("oracle_total", "oracle_trivial", "oracle_rank3", "agree")


def exec_tuples(spec: ExperimentSpec) -> Result:
    code = build_code(spec.code)
    p = spec.params
    ws = p.get("weights")
    weights = list(range(code.n + 1)) if ws in (None, "all") else [int(w) for w in parse_grid(ws)]
    oracle = bool(p.get("oracle", False))

    def point(i):
        c = census(code, i)
        row = c.row()
        if oracle:
            o = census_oracle(code, i)
            agree = o.total == c.total and o.trivial == c.trivial and o.rank3 == c.nontrivial and o.other == 0
            row.update(oracle_total=o.total, oracle_trivial=o.trivial, oracle_rank3=o.rank3, agree=int(agree))
        return row

    rows = ordered_map(point, weights)
    return Result(ORACLE_COLUMNS if oracle else CENSUS_COLUMNS, rows, all(r.get("agree", 1) for r in rows))


def exec_ensemble(spec: ExperimentSpec) -> Result:
    p = spec.params
    n = int(p["n"])
    lam = Fraction(str(p.get("lambda", "1/4")))
    gamma = float(Fraction(str(p.get("gamma", "1/2"))))
    seed = int(p.get("seed", 0))
    st = ensemble_expectation(n, lam, gamma, int(p.get("trials", 200)), seed)
    summary = {"mean_log_nontrivial": st.mean, "std": st.std, "formula": st.formula,
               "formula_max": st.formula_max, "exact_log_expectation": st.exact_log_mean,
               "quantiles": {str(k): v for k, v in st.quantiles().items()}}
    ct = p.get("containment_trials")
    if ct and n % 4 == 0:
        c = containment_frequency(fixed_tuple(n), n, lam, int(ct), seed)
        summary["containment"] = {"hits": c.hits, "trials": c.trials, "probability": c.probability,
                                  "z_score": c.z_score}
    return Result(ENSEMBLE_COLUMNS, st.rows(), True, summary)


COMMANDS: dict[str, Callable[[ExperimentSpec], Result]] = {
    "capacity": exec_capacity, "renyi": exec_renyi, "psi": exec_psi, "pue": exec_pue,
    "tuples": exec_tuples, "ensemble": exec_ensemble,
}


def execute(spec: ExperimentSpec) -> Result:
    if spec.command not in COMMANDS:
        raise InputError(f"unknown command {spec.command!r}")
    if spec.format not in ("csv", "json"):
        raise InputError(f"unknown format {spec.format!r}")
    return COMMANDS[spec.command](spec)


def render(spec: ExperimentSpec, result: Result) -> str:
    if spec.format == "json":
        doc = {"_meta": {"tool": "codenoise", "version": __version__, "spec": json.loads(spec.to_json()),
                         "ok": result.ok, "summary": result.summary},
               "columns": list(result.columns), "rows": result.rows}
        return json.dumps(doc, sort_keys=True, indent=1, default=_json_default) + "\n"
    buf = io.StringIO()
    buf.write(f"# codenoise {__version__} spec={spec.to_json()}\n")
    if result.summary:
        buf.write(f"# summary={json.dumps(result.summary, sort_keys=True, default=_json_default)}\n")
    w = csv.DictWriter(buf, fieldnames=list(result.columns), lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for r in result.rows:
        w.writerow({k: _fmt(v) for k, v in r.items()})
    return buf.getvalue()


def _json_default(v):
    if isinstance(v, Fraction):
        return str(v)
    raise TypeError(f"cannot serialise {type(v).__name__}")


def run_spec(spec: ExperimentSpec) -> int:
    """Execute, write output and return the exit code."""
    try:
        result = execute(spec)
        text = render(spec, result)
    except ContractViolation as exc:
        click.echo(f"contract violation: {exc}", err=True)
        return EXIT_CONTRACT
    except (InputError, InconsistencyError, CapacityError, ValueError, KeyError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_INPUT
    if spec.output:
        Path(spec.output).write_text(text)
    else:
        click.echo(text, nl=False)
    if not result.ok:
        click.echo("contract violation: at least one checked row failed", err=True)
        return EXIT_CONTRACT
    return 0


# -- click front end --------------------------------------------------------------

def code_options(fn):
    opts = [
        click.option("--code-file", type=click.Path(dir_okay=False), help="Generator matrix file."),
        click.option("--rm", nargs=2, type=int, default=None, metavar="R M", help="Reed-Muller RM(R, M)."),
        click.option("--random", "random_", nargs=2, type=str, default=None, metavar="N LAMBDA",
                     help="Kernel of a random (LAMBDA*N) x N matrix."),
        click.option("--repetition-pair", type=int, default=None, metavar="N"),
        click.option("--full", type=int, default=None, metavar="N", help="The full space (f = 1)."),
    ]
    for o in reversed(opts):
        fn = o(fn)
    return fn


def output_options(fn):
    fn = click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv")(fn)
    fn = click.option("--output", type=click.Path(dir_okay=False), default=None)(fn)
    fn = click.option("--seed", type=int, default=0, show_default=True)(fn)
    return fn


def _finish(command: str, params: dict, code, output, fmt) -> None:
    try:
        spec = ExperimentSpec(command, params, code, output, fmt)
    except InputError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INPUT)
    sys.exit(run_spec(spec))


def _source(ctx_kwargs) -> dict | None:
    try:
        return code_source(ctx_kwargs["code_file"], ctx_kwargs["rm"], ctx_kwargs["random_"],
                           ctx_kwargs["seed"], ctx_kwargs["repetition_pair"], ctx_kwargs["full"])
    except (InputError, ValueError, ZeroDivisionError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INPUT)


@click.group()
@click.version_option(__version__, prog_name="codenoise")
def main():
    """Noise, erasure and tuple-count experiments on binary linear codes."""


@main.command()
@code_options
@output_options
@click.option("--lambda-grid", default="0:1:0.05", show_default=True)
@click.option("--method", type=click.Choice(["auto", "exact", "mc"]), default="auto")
@click.option("--samples", type=int, default=200_000, show_default=True)
def capacity(**kw):
    """m(lambda)/n over a grid of erasure rates."""
    params = {"lambda_grid": kw["lambda_grid"], "method": kw["method"], "samples": kw["samples"], "seed": kw["seed"]}
    _finish("capacity", params, _source(kw), kw["output"], kw["fmt"])


@main.command()
@code_options
@output_options
@click.option("--q", "q", default="2,3,4,inf", show_default=True)
@click.option("--eps-grid", default="0.05:0.45:0.05", show_default=True)
@click.option("--bound", type=click.Choice(["all", "theorem12", "prop13_upper", "prop13_lower"]), default="all")
def renyi(**kw):
    """Norm of the noisy code density against the erasure bounds."""
    params = {"q": kw["q"], "eps_grid": kw["eps_grid"], "bound": kw["bound"]}
    _finish("renyi", params, _source(kw), kw["output"], kw["fmt"])


@main.command()
@output_options
@click.option("--q", "q", default="4", show_default=True)
@click.option("--gamma-grid", default="0.05:0.5:0.05", show_default=True)
@click.option("--method", type=click.Choice(["variational", "moment", "both"]), default="variational")
@click.option("--n", type=int, default=512, show_default=True, help="Length for the moment route.")
def psi(**kw):
    """psi(q, gamma) on a grid."""
    params = {"q": kw["q"], "gamma_grid": kw["gamma_grid"], "method": kw["method"], "n": kw["n"]}
    _finish("psi", params, None, kw["output"], kw["fmt"])


@main.command()
@code_options
@output_options
@click.option("--eps-grid", default="0.05:0.5:0.05", show_default=True)
def pue(**kw):
    """Undetected-error probability and its certified exponent."""
    _finish("pue", {"eps_grid": kw["eps_grid"]}, _source(kw), kw["output"], kw["fmt"])


@main.command()
@code_options
@output_options
@click.option("--weights", default="all", show_default=True, help="Grid of weights or 'all'.")
@click.option("--oracle", is_flag=True, help="Also run the cubic rank oracle and compare.")
def tuples(**kw):
    """Census of sum-zero 4-tuples per weight level."""
    _finish("tuples", {"weights": kw["weights"], "oracle": kw["oracle"]}, _source(kw), kw["output"], kw["fmt"])


@main.command()
@output_options
@click.option("--n", type=int, required=True)
@click.option("--lambda", "lam", default="1/4", show_default=True)
@click.option("--gamma", default="1/2", show_default=True)
@click.option("--trials", type=int, default=200, show_default=True)
@click.option("--containment-trials", type=int, default=0, help="Also test a fixed tuple's containment rate.")
def ensemble(**kw):
    """Census statistics over the random-kernel ensemble."""
    params = {"n": kw["n"], "lambda": kw["lam"], "gamma": kw["gamma"], "trials": kw["trials"],
              "seed": kw["seed"], "containment_trials": kw["containment_trials"]}
    _finish("ensemble", params, None, kw["output"], kw["fmt"])


@main.command()
@click.option("--spec", "spec_file", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--output", type=click.Path(dir_okay=False), default=None, help="Overrides the spec's output.")
def run(spec_file, output):
    """Execute a JSON experiment spec."""
    try:
        spec = ExperimentSpec.from_json(Path(spec_file).read_text())
    except (InputError, json.JSONDecodeError, TypeError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INPUT)
    if output:
        spec.output = output
    sys.exit(run_spec(spec))


if __name__ == "__main__":
    main()
