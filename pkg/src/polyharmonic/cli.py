"""Batch verification harness.

Each suite expands a grid into independent tasks.  A task is a plain tuple
(check_id, kind, params) so it can be shipped to worker processes; records are
merged and sorted by check_id, which keeps reports byte-identical regardless
of ``--jobs``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import addition_theorems as at
from . import coords, fundamental as fm, kernel_expansions as ke, special_fn as sf

SUITES = ("special_fn", "kernels", "fundamental", "coords", "addition")
SCHEMA = 1
SWEEP_HEADER = "theorem,d,p,m,window,zeta,chi,residual,terms"

# default tolerance per check kind
TOLERANCES = {
    "whipple_q": 1e-12,
    "whipple_p": 1e-12,
    "reflect_order": 1e-12,
    "closed_form": 1e-12,
    "dnu_p": 1e-6,
    "dnu_q": 1e-6,
    "binomial_kernel": 1e-11,
    "log_kernel": 1e-8,
    "log_kernel_p0": 1e-10,
    "fourier_j": 1e-10,
    "fourier_l": 1e-8,
    "gegen_j": 1e-10,
    "gegen_l": 1e-8,
    "laplacian": 1e-4,
    "beta_zero": 0.0,
    "addition_std": 1e-10,
    "addition_hopf": 1e-9,
    "harmonic_norm": 1e-6,
    "enum_equal": 0.0,
    "theorem_binomial": 1e-10,
    "theorem": 1e-6,
}

Z_GRID = (1.1, 1.5, 2.0, 3.0, 5.0)


@dataclass
class RunConfig:
    suite: str = "all"
    d_list: tuple | None = None
    p_max: int = 3
    seeds: int = 5
    base_seed: int = 0
    window: int | None = None
    tol: float | None = None
    fmt: str = "json"
    out: str | None = None
    jobs: int = 1
    sweep: tuple | None = None
    suites: tuple = field(init=False)

    def __post_init__(self):
        if self.tol is not None and not self.tol > 0:
            raise ValueError("tolerance must be positive")
        if self.suite not in SUITES + ("all",):
            raise ValueError(f"unknown suite {self.suite!r}")
        self.suites = SUITES if self.suite == "all" else (self.suite,)


def _rel(a: float, b: float, floor: float = 0.0) -> float:
    return abs(a - b) / max(abs(b), floor, 1e-300)


def _dims(cfg: RunConfig, default) -> list[int]:
    if cfg.d_list is None:
        return list(default)
    return [d for d in cfg.d_list if d in default]


def _seed(cfg: RunConfig, i: int) -> int:
    return cfg.base_seed + i


# ---------------------------------------------------------------------------
# task builders


def _tasks_special_fn(cfg: RunConfig) -> list:
    out = []
    P = cfg.p_max
    for n in range(P + 1):
        for j in range(4):
            for z in Z_GRID:
                out.append((f"special_fn/whipple_q/nu={n}.5/mu={j}.5/z={z}", "whipple_q",
                            {"nu": n + 0.5, "mu": j + 0.5, "z": z}))
                if j <= n:  # Gamma(nu - mu + 1) has poles beyond
                    out.append((f"special_fn/reflect_order/nu={n}.5/mu={j}.5/z={z}", "reflect_order",
                                {"nu": n + 0.5, "mu": j + 0.5, "z": z}))
        for m in range(min(n, 3) + 1):
            for z in Z_GRID:
                out.append((f"special_fn/whipple_p/nu={n}/m={m}/z={z}", "whipple_p", {"nu": n, "m": m, "z": z}))
    for z in Z_GRID:
        if P >= 0:
            out.append((f"special_fn/closed_form/half_half/z={z}", "closed_form", {"case": "half_half", "z": z}))
        for n in range(P + 1):
            out.append((f"special_fn/closed_form/three_half/n={n}/z={z}", "closed_form",
                        {"case": "three_half", "n": n, "z": z}))
            out.append((f"special_fn/closed_form/diagonal/mu={n}.5/z={z}", "closed_form",
                        {"case": "diagonal", "mu": n + 0.5, "z": z}))
    for p in range(P + 1):
        for m in range(4):
            for z in (1.5, 2.0, 2.5):
                out.append((f"special_fn/dnu_p/p={p}/m={m}/z={z}", "dnu_p", {"p": p, "m": m, "z": z}))
                if m <= p:
                    out.append((f"special_fn/dnu_q/p={p}/m={m}/z={z}", "dnu_q", {"p": p, "m": m, "z": z}))
    return out


def _tasks_kernels(cfg: RunConfig) -> list:
    out = []
    for i in range(cfg.seeds):
        s = _seed(cfg, i)
        rng = np.random.default_rng(s)
        z, x = float(rng.uniform(1.05, 5)), float(rng.uniform(-0.95, 0.95))
        base = {"seed": s, "z": z, "x": x}
        for p in range(cfg.p_max + 1):
            out.append((f"kernels/binomial/chebyshev/p={p}/seed={s:05d}", "binomial_kernel",
                        dict(base, p=p, basis="chebyshev", mu=None)))
            out.append((f"kernels/log/chebyshev/p={p}/seed={s:05d}", "log_kernel",
                        dict(base, p=p, basis="chebyshev", mu=None)))
            for mu in (0.5, 1, 2, 3):
                out.append((f"kernels/binomial/gegenbauer/p={p}/mu={mu}/seed={s:05d}", "binomial_kernel",
                            dict(base, p=p, basis="gegenbauer", mu=mu)))
            for mu in (1, 2, 3):
                out.append((f"kernels/log/gegenbauer/p={p}/mu={mu}/seed={s:05d}", "log_kernel",
                            dict(base, p=p, basis="gegenbauer", mu=mu)))
        if cfg.p_max >= 0:
            for form in ("chebyshev", "gegenbauer1", "gegenbauer2", "gegenbauer3", "u"):
                out.append((f"kernels/log_p0/{form}/seed={s:05d}", "log_kernel_p0", dict(base, form=form)))
    return out


def _fund_pair(d: int, rng: np.random.Generator, min_sep: float = 0.0):
    while True:
        u, v = rng.normal(size=d), rng.normal(size=d)
        x = u / np.linalg.norm(u) * rng.uniform(0.25, 1.0)
        xp = v / np.linalg.norm(v) * rng.uniform(1.5, 4.0)
        if rng.random() < 0.5:
            x, xp = xp, x
        g, s = fm.RotGeometry.from_cartesian(x, xp), fm.SphGeometry.from_cartesian(x, xp)
        if g.chi >= 1.2 and (d == 2 or s.zeta >= 1.2) and np.linalg.norm(x - xp) >= min_sep:
            return x, xp


def _tasks_fundamental(cfg: RunConfig) -> list:
    out = []
    for d in _dims(cfg, (2, 4, 6)):
        for p in range(cfg.p_max + 1):
            k = d // 2 + p
            for i in range(cfg.seeds):
                s = _seed(cfg, i)
                x, xp = _fund_pair(d, np.random.default_rng(s))
                par = {"d": d, "k": k, "seed": s, "x": x.tolist(), "xp": xp.tolist()}
                for kind in ("fourier_j", "fourier_l") + (("gegen_j", "gegen_l") if d >= 4 else ()):
                    out.append((f"fundamental/{kind}/d={d}/k={k}/seed={s:05d}", kind, par))
                if d in (2, 4) and 1 <= p <= 2:
                    x, xp = _fund_pair(d, np.random.default_rng(s), min_sep=1.0)
                    out.append((f"fundamental/laplacian/d={d}/k={k}/seed={s:05d}", "laplacian",
                                {"d": d, "k": k, "x": x.tolist(), "xp": xp.tolist()}))
        if cfg.p_max >= 0:
            out.append((f"fundamental/beta_zero/d={d}", "beta_zero", {"d": d}))
    return out


def _tasks_coords(cfg: RunConfig) -> list:
    out = []
    nmax = cfg.p_max + 3 if cfg.p_max >= 0 else -1
    for fam, dims in (("standard", (4, 6)), ("hopf", (4, 8))):
        for d in _dims(cfg, dims):
            for n in range(nmax + 1):
                for i in range(cfg.seeds):
                    s = _seed(cfg, i)
                    out.append((f"coords/addition/{fam}/d={d}/n={n}/seed={s:05d}",
                                "addition_std" if fam == "standard" else "addition_hopf",
                                {"d": d, "n": n, "seed": s}))
            if nmax >= 0:
                out.append((f"coords/harmonic_norm/{fam}/d={d}", "harmonic_norm", {"family": fam, "d": d}))
    for d in _dims(cfg, (4, 6, 8)):
        for p in range(cfg.p_max + 1):
            out.append((f"coords/enum/Y1/d={d}/p={p}", "enum_equal", {"enum": "Y1", "d": d, "p": p}))
            out.append((f"coords/enum/Y2/d={d}/p={p}", "enum_equal", {"enum": "Y2", "d": d, "p": p}))
            if d in (4, 8):
                for name in ("Z1", "Z2", "Z3"):
                    out.append((f"coords/enum/{name}/d={d}/p={p}", "enum_equal", {"enum": name, "d": d, "p": p}))
    return out


def _theorems(cfg: RunConfig) -> list:
    ths = at.all_theorems()
    if cfg.d_list is not None:
        ths = [t for t in ths if t.d in cfg.d_list]
    return ths


def _theorem_params(th: at.TheoremId) -> dict:
    return {"family": th.family, "kind": th.kind, "regime": th.regime, "d": th.d, "closed": th.d4_closed_form}


def _tasks_addition(cfg: RunConfig) -> list:
    out = []
    for th in _theorems(cfg):
        for p in range(cfg.p_max + 1):
            for m in at.regime_m_values(th, p):
                for i in range(cfg.seeds):
                    s = _seed(cfg, i)
                    par = dict(_theorem_params(th), p=p, m=m, seed=s, window=cfg.window)
                    out.append((f"addition/{th.name}/p={p}/m={m}/seed={s:05d}",
                                "theorem_binomial" if th.kind == at.BINOMIAL else "theorem", par))
    return out


BUILDERS = {
    "special_fn": _tasks_special_fn,
    "kernels": _tasks_kernels,
    "fundamental": _tasks_fundamental,
    "coords": _tasks_coords,
    "addition": _tasks_addition,
}


# ---------------------------------------------------------------------------
# evaluators: each returns (lhs, rhs, residual), optionally followed by a dict
# of diagnostics stored under "info"


def _closed_form(par):
    z = par["z"]
    s = math.sqrt((z - 1) * (z + 1))
    c = math.sqrt(math.pi / 2)
    if par["case"] == "half_half":
        return sf.q_reduced(0.5, 0.5, z), c * (s ** -0.5) / (z + s)
    if par["case"] == "three_half":
        n = par["n"]
        return sf.q_reduced(n + 0.5, 1.5, z), c * (z + (n + 1) * s) / (s**1.5 * (z + s) ** (n + 1))
    mu = par["mu"]
    return sf.q_reduced(mu - 0.5, mu + 0.5, z), 2 ** (mu - 0.5) * sf.gamma(mu + 0.5) * s ** (-mu - 0.5)


def _fd(f, x0: float, h: float = 1e-5) -> float:
    return (f(x0 + h) - f(x0 - h)) / (2 * h)


def _eval_special(kind, par):
    if kind == "whipple_q":
        a, b = sf.whipple_q(par["nu"], par["mu"], par["z"]), sf.q_reduced(par["nu"], par["mu"], par["z"])
    elif kind == "reflect_order":
        a = sf.legendre_q_reflect_order(par["nu"], par["mu"], par["z"])
        b = sf.q_reduced(par["nu"], -par["mu"], par["z"])
    elif kind == "whipple_p":
        a, b = sf.whipple_p(par["nu"], par["m"], par["z"]), sf.legendre_p(par["nu"], par["m"], par["z"])
        if b == 0:
            return a, b, abs(a)
    elif kind == "closed_form":
        a, b = _closed_form(par)
    elif kind == "dnu_p":
        p, m, z = par["p"], par["m"], par["z"]
        a = sf.dnu_legendre_p_at_int(p, m, z)
        b = _fd(lambda nu: sf.legendre_p(nu, m, z), p)
        return a, b, _rel(a, b, 1.0)
    else:
        p, m, z = par["p"], par["m"], par["z"]
        a = sf.dnu_legendre_q_halforder_at_int(p, m, z)
        b = _fd(lambda nu: sf.q_reduced(m - 0.5, nu + 0.5, z), p)
        return a, b, _rel(a, b, 1.0)
    return a, b, _rel(a, b)


def _eval_kernel(kind, par):
    z, x = par["z"], par["x"]
    pt = ke.ExpansionPoint(z, x)
    w = z - x
    if kind == "log_kernel_p0":
        form = par["form"]
        if form == "chebyshev":
            r = ke.log_chebyshev_p0(pt)[0]
        elif form == "u":
            r = ke.log_chebyshev_u(pt)[0]
        else:
            r = ke.log_gegenbauer_p0(pt, int(form[-1]))[0]
        b = math.log(w)
        return r.value, b, abs(r.value - b) / max(1.0, abs(b))
    p, mu = par["p"], par["mu"]
    if kind == "binomial_kernel":
        r = ke.binomial_chebyshev(pt, p)[0] if mu is None else ke.binomial_gegenbauer(pt, p, mu)[0]
        b = w**p
        return r.value, b, _rel(r.value, b)
    r = ke.log_chebyshev(pt, p)[0] if mu is None else ke.log_gegenbauer(pt, p, mu)[0]
    b = w**p * math.log(w)
    # relative to the kernel's magnitude scale, since log(z - x) can vanish
    return r.value, b, abs(r.value - b) / (w**p * max(1.0, abs(math.log(w))))


def _eval_fundamental(kind, par):
    d = par["d"]
    if kind == "beta_zero":
        b = fm.beta_constant(0, d)
        return float(b), 0.0, abs(float(b)) if b == 0 else math.inf
    fp = fm.FundParams(d, par["k"])
    x, xp = np.array(par["x"]), np.array(par["xp"])
    if kind == "laplacian":
        return math.nan, math.nan, fm.laplacian_iteration_check(fp, x, xp)
    rho = float(np.linalg.norm(x - xp))
    if kind in ("fourier_j", "gegen_j"):
        b = fm.kernel_j(fp, x, xp)
        scale = rho ** (2 * fp.p)
        if kind == "fourier_j":
            a = fm.fourier_expansion_j(fp, fm.RotGeometry.from_cartesian(x, xp)).value
        else:
            a = fm.gegen_expansion_j(fp, fm.SphGeometry.from_cartesian(x, xp)).value
    else:
        b = fm.kernel_l(fp, x, xp)
        scale = rho ** (2 * fp.p) * max(1.0, abs(math.log(rho) - float(fp.beta)))
        if kind == "fourier_l":
            a = fm.fourier_expansion_l(fp, fm.RotGeometry.from_cartesian(x, xp)).value
        else:
            a = fm.gegen_expansion_l(fp, fm.SphGeometry.from_cartesian(x, xp)).value
    return a, b, abs(a - b) / scale


def _random_point(system: str, d: int, rng: np.random.Generator):
    u = rng.normal(size=d)
    x = u / np.linalg.norm(u) * rng.uniform(0.5, 2.0)
    return coords.cartesian_to_std(x) if system == coords.STANDARD else coords.cartesian_to_hopf(x)


def _enum_sets(which: str, d: int, p: int):
    w = p + 6
    if which == "Y1":
        return set(coords.enum_Y1(d, p)), set(coords.enum_Y1_reversed(d, p))
    if which == "Y2":
        one, two = coords.enum_Y2(d, p, w)
        return set(coords.enum_Y2_forward(d, p, w)), set(one) | set(two)
    q = coords.hopf_q(d)
    fwd, rev = {"Z1": (coords.enum_Z1_forward, coords.enum_Z1),
                "Z2": (coords.enum_Z2_forward, coords.enum_Z2),
                "Z3": (coords.enum_Z3_forward, coords.enum_Z3)}[which]
    args = (q, p) if which == "Z1" else (q, p, w)
    return set(fwd(*args)), set(rev(*args))


def _eval_coords(kind, par):
    d = par.get("d")
    if kind == "enum_equal":
        a, b = _enum_sets(par["enum"], d, par["p"])
        return float(len(a)), float(len(b)), float(len(a ^ b))
    if kind == "harmonic_norm":
        if par["family"] == "standard":
            idx = coords.StdQuantumIndex(tuple(range(d - 1, 1, -1)), 1)
        else:
            half = d // 2
            idx = coords.phi_inverse(tuple(k % 2 for k in range(1, half)), tuple(range(1, half + 1)))
        v = coords.harmonic_norm_sq(idx, d)
        return v, 1.0, abs(v - 1.0)
    rng = np.random.default_rng(par["seed"])
    system = coords.STANDARD if kind == "addition_std" else coords.HOPF
    p1, p2 = _random_point(system, d, rng), _random_point(system, d, rng)
    return math.nan, math.nan, coords.addition_theorem_check(d, par["n"], p1, p2)


def _theorem_from(par) -> at.TheoremId:
    return at.TheoremId(par["family"], par["kind"], par["regime"], par["d"], par["closed"])


def _eval_addition(kind, par):
    rep = at.verify(_theorem_from(par), par["seed"], p=par["p"], m=par["m"], window=par["window"])
    if rep.error:
        raise RuntimeError(rep.error)
    info = {"zeta": rep.sample["zeta"], "chi": rep.sample["chi"], "terms": rep.terms_used,
            "tail_estimate": rep.tail_estimate, "converged": rep.converged}
    return rep.lhs, rep.rhs, rep.residual_rel, info


EVALUATORS = {"special_fn": _eval_special, "kernels": _eval_kernel, "fundamental": _eval_fundamental,
              "coords": _eval_coords, "addition": _eval_addition}


def run_task(task, tol_override: float | None = None) -> dict:
    check_id, kind, par = task
    tol = TOLERANCES[kind] if tol_override is None else tol_override
    suite = check_id.split("/", 1)[0]
    rec = {"check_id": check_id, "params": par}
    info = None
    try:
        lhs, rhs, res, *extra = EVALUATORS[suite](kind, par)
        info = extra[0] if extra else None
        err = None
    except Exception as exc:  # recorded as a failing check
        lhs = rhs = res = math.nan
        err = f"{type(exc).__name__}: {exc}"
    rec.update(lhs=lhs, rhs=rhs, residual=res, tolerance=tol,
               **{"pass": bool(err is None and math.isfinite(res) and res <= tol)})
    if info is not None:
        rec["info"] = info
    if err:
        rec["error"] = err
    return rec


def build_tasks(cfg: RunConfig) -> list:
    tasks = []
    for s in cfg.suites:
        tasks.extend(BUILDERS[s](cfg))
    return tasks


def _run_one(args):
    return run_task(*args)


def run_suite(cfg: RunConfig) -> list[dict]:
    """Evaluate every check in the configured suites; records sorted by check_id."""
    tasks = build_tasks(cfg)
    work = [(t, cfg.tol) for t in tasks]
    if cfg.jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as ex:
            recs = list(ex.map(_run_one, work, chunksize=max(1, len(work) // (4 * cfg.jobs))))
    else:
        recs = [_run_one(w) for w in work]
    return sorted(recs, key=lambda r: r["check_id"])


def sweep(cfg: RunConfig) -> list[dict]:
    """Residual table over windows for each addition theorem cell."""
    lo, hi = cfg.sweep
    rows = []
    for th in _theorems(cfg):
        for p in range(cfg.p_max + 1):
            for m in at.regime_m_values(th, p):
                for i in range(cfg.seeds):
                    s = _seed(cfg, i)
                    sample = at.Sample(at.sample_geometry(th.d, np.random.default_rng(s)), p, m)
                    for w in range(max(lo, p, m), hi + 1):
                        rep = at.verify(th, sample, window=w)
                        g = sample.geometry
                        rows.append({"theorem": th.name, "d": th.d, "p": p, "m": m, "window": w,
                                     "zeta": g.zeta, "chi": g.chi, "residual": rep.residual_rel,
                                     "terms": rep.terms_used})
    return rows


# ---------------------------------------------------------------------------
# serialization


def _num(v) -> str:
    if v is None or (isinstance(v, float) and not math.isfinite(v)):
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    return format(float(v), ".17g")


def _dump(v) -> str:
    if isinstance(v, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_dump(x)}" for k, x in v.items()) + "}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_dump(x) for x in v) + "]"
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, (float, int, bool, np.floating, np.integer, np.bool_)) or v is None:
        return _num(v.item() if isinstance(v, (np.floating, np.integer, np.bool_)) else v)
    return json.dumps(str(v))


def to_json(records: list[dict]) -> str:
    body = ",\n".join("  " + _dump(r) for r in records)
    return '{"schema": %d, "records": [\n%s\n]}\n' % (SCHEMA, body) if records else \
        '{"schema": %d, "records": []}\n' % SCHEMA


def to_csv(records: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["check_id", "lhs", "rhs", "residual", "tolerance", "pass", "params"])
    for r in records:
        w.writerow([r["check_id"], _num(r["lhs"]), _num(r["rhs"]), _num(r["residual"]), _num(r["tolerance"]),
                    "true" if r["pass"] else "false", _dump(r["params"])])
    return buf.getvalue()


def sweep_csv(rows: list[dict]) -> str:
    lines = [SWEEP_HEADER]
    for r in rows:
        lines.append(",".join([r["theorem"]] + [_num(r[k]) for k in SWEEP_HEADER.split(",")[1:]]))
    return "\n".join(lines) + "\n"


def _write(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _window_range(s: str) -> tuple:
    lo, _, hi = s.partition(":")
    return int(lo), int(hi or lo)


def parse_args(argv=None) -> RunConfig:
    ap = argparse.ArgumentParser(prog="verify", description="Run numerical identity checks and emit a report.")
    ap.add_argument("--suite", default="all", choices=SUITES + ("all",))
    ap.add_argument("--d", type=int, nargs="+", default=None, help="dimensions to include")
    ap.add_argument("--p-max", type=int, default=3)
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--window", type=int, default=None, help="cap for infinite sums (default p + 12)")
    ap.add_argument("--tol", type=float, default=None, help="override every tolerance")
    ap.add_argument("--format", dest="fmt", default="json", choices=("json", "csv"))
    ap.add_argument("--out", default=None)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--sweep", type=_window_range, default=None, metavar="LO:HI",
                    help="residual table of addition theorems over windows LO..HI (CSV)")
    a = ap.parse_args(argv)
    base = int(os.environ.get("POLYH_SEED", "0"))
    try:
        return RunConfig(a.suite, tuple(a.d) if a.d else None, a.p_max, a.seeds, base, a.window, a.tol,
                         a.fmt, a.out, a.jobs, a.sweep)
    except ValueError as exc:
        ap.error(str(exc))


def main(argv=None) -> int:
    cfg = parse_args(argv)
    try:
        if cfg.sweep is not None:
            _write(sweep_csv(sweep(cfg)), cfg.out)
            return 0
        recs = run_suite(cfg)
        _write(to_json(recs) if cfg.fmt == "json" else to_csv(recs), cfg.out)
    except OSError as exc:
        print(f"verify: {exc}", file=sys.stderr)
        return 2
    failed = sum(not r["pass"] for r in recs)
    print(f"{len(recs)} checks, {failed} failed", file=sys.stderr)
    return 0 if failed == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
