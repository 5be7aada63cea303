"""Flat key = value configuration files with dotted section prefixes, and
the merge of CLI overrides into a run specification."""

from dataclasses import dataclass

from .driver import BASIC_SMOOTHERS, FIM_VARIANTS, SolverConfig
from .errors import ConfigError
from .multigrid import CycleConfig
from .problems import build_problem

SOLVER_NAMES = BASIC_SMOOTHERS + FIM_VARIANTS + ("nmg",)


def parse_config(path):
    """Read a config file into a flat string dict.  Lines are
    'section.key = value'; '#' starts a comment."""
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', "
                                  f"got {raw.strip()!r}")
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def _get(cfg, key, default=None, required=False, cast=str):
    if key not in cfg:
        if required:
            raise ConfigError(f"missing config key {key}")
        return default
    raw = cfg[key]
    try:
        if cast is bool:
            low = raw.lower()
            if low in ("on", "true", "yes", "1"):
                return True
            if low in ("off", "false", "no", "0"):
                return False
            raise ValueError(raw)
        return cast(raw)
    except ValueError:
        raise ConfigError(f"config key {key}: cannot parse {raw!r} as "
                          f"{cast.__name__}") from None


def _parse_grid(raw):
    parts = raw.lower().replace("x", " ").split()
    try:
        shape = tuple(int(p) for p in parts)
    except ValueError:
        raise ConfigError(f"config key problem.grid: bad value {raw!r}") \
            from None
    if len(shape) not in (1, 2) or any(n < 2 for n in shape):
        raise ConfigError(f"config key problem.grid: bad value {raw!r}")
    return shape


@dataclass
class RunSpec:
    problem: object
    solver: SolverConfig
    outdir: str
    plots: bool
    snapshot: bool
    label: str


def build_run(cfg, overrides=None):
    """Assemble the problem and solver from a parsed config dict; values in
    ``overrides`` (CLI flags) win over file values."""
    cfg = dict(cfg)
    for key, value in (overrides or {}).items():
        if value is not None:
            cfg[key] = str(value)

    kind = _get(cfg, "problem.kind", required=True)
    M = _get(cfg, "problem.order", required=True, cast=int)
    shape = _parse_grid(_get(cfg, "problem.grid", required=True))
    kn = _get(cfg, "problem.kn", cast=float)
    mach = _get(cfg, "problem.mach", cast=float)
    problem = build_problem(kind, kn=kn, mach=mach, M=M, shape=shape)

    variant = _get(cfg, "solver.variant")
    smoother = _get(cfg, "solver.smoother")
    if variant is None:
        variant = smoother if smoother is not None else "sisgs"
    if variant not in SOLVER_NAMES:
        raise ConfigError(f"config key solver.variant: unknown solver "
                          f"{variant!r} (choose from "
                          f"{', '.join(SOLVER_NAMES)})")

    nmg = None
    if variant == "nmg":
        nmg_smoother = _get(cfg, "nmg.smoother", default="fim-3")
        if nmg_smoother not in SOLVER_NAMES[:-1]:
            raise ConfigError(f"config key nmg.smoother: unknown smoother "
                              f"{nmg_smoother!r}")
        nmg = CycleConfig(
            s1=_get(cfg, "nmg.s1", default=2, cast=int),
            s2=_get(cfg, "nmg.s2", default=2, cast=int),
            s3=_get(cfg, "nmg.s3", default=4, cast=int),
            smoother=nmg_smoother,
            levels=_get(cfg, "nmg.levels", cast=int),
            coarsest=_get(cfg, "nmg.coarsest", default=8, cast=int),
        )

    solver = SolverConfig(
        variant=variant,
        cfl=_get(cfg, "solver.cfl", default=0.8, cast=float),
        gamma1=_get(cfg, "solver.gamma1", default=1, cast=int),
        gamma2=_get(cfg, "solver.gamma2", cast=int),
        inner_tol=_get(cfg, "solver.inner_tol", default=1e-8, cast=float),
        outer_tol=_get(cfg, "solver.outer_tol", cast=float),
        max_iters=_get(cfg, "solver.max_iters", default=500_000, cast=int),
        mass_correction=_get(cfg, "solver.mass_correction", cast=bool),
        regularization=_get(cfg, "solver.regularization", default="auto"),
        writeback=_get(cfg, "solver.writeback", default="retain"),
        threads=_get(cfg, "solver.threads", default=1, cast=int),
        nmg=nmg,
    )
    if solver.regularization not in ("auto", "off", "hme"):
        raise ConfigError("config key solver.regularization: expected "
                          "auto, off or hme")
    if solver.threads < 1:
        raise ConfigError("config key solver.threads: must be >= 1")

    label = f"{kind}_{variant}"
    return RunSpec(
        problem=problem,
        solver=solver,
        outdir=_get(cfg, "output.outdir", default="out"),
        plots=_get(cfg, "output.plots", default=True, cast=bool),
        snapshot=_get(cfg, "output.snapshot", default=True, cast=bool),
        label=label,
    )
