"""Command-line driver: ``solve``, ``certify``, ``regularity`` and ``weights``.

Each command reads a JSON experiment config, writes CSV/JSON artifacts into
the output directory and exits with 0 (ok), 2 (config error) or 3
(mathematical failure: singular symbol, failed hypothesis, zero input).
Artifacts are deterministic functions of the config, seed and grid.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .banks import band_limited_noise, indicator, mode_bank, positive_bank, standard_bank
from .config import ConfigError, ExperimentConfig, load, to_complex_array
from .errors import MaxRegError, NonInvertiblePencil, SingularAtNode, ZeroInput
from .frequency import PUNCTURED, WHOLE, constant_symbol, jump_symbol
from .grid import GridFunction
from .littlewood_paley import Besov, TriebelLizorkin, default_bank
from .solver import COMPONENTS, regularity_sweep, solve, weighted_consistency_check
from .spaces import (Lorentz, Lp, WeightedLp, ap_constant, build_weight, dual, maximal_norm_bound,
                     pointwise_A1_check, rubio_iterate)
from .symbols import (ConvolutionSymbol, OperatorPencil, companion_symbols, cz_constant, dyadic_envelope_check,
                      invert_symbol, kernel_from_symbol, mihlin_constant, pencil_symbol)

EXIT_OK, EXIT_CONFIG, EXIT_MATH = 0, 2, 3


class HypothesisFailure(Exception):
    pass


# --------------------------------------------------------------------------
# building objects from the canonical config


def build_pencil(d: dict) -> OperatorPencil:
    n = d["n"]
    A, B, P = (to_complex_array(d[k]) for k in "ABP")
    ch = d["chat"]
    if ch["kind"] == "zero":
        chat = None
    elif ch["kind"] == "memory":
        chat = ConvolutionSymbol.memory(ch["lam"], to_complex_array(ch["C"]))
    else:
        chat = ConvolutionSymbol.decomposed(constant_symbol(np.zeros((n, n))), jump_symbol(to_complex_array(ch["C"])))
    return OperatorPencil(A, B, P, chat)


def build_function(d: dict, grid, n: int, rng) -> GridFunction:
    k = d["kind"]
    if k == "zero":
        return GridFunction.zeros(grid, n)
    if k == "noise":
        f = band_limited_noise(grid, rng, 1, d["band"])
        base = f.samples[:, 0]
    elif k == "constant":
        base = np.full(grid.N, complex(*d["value"]))
    elif k == "indicator":
        base = indicator(grid, d["a"], d["b"]).samples[:, 0]
    elif k == "gaussian":
        base = np.exp(-((grid.t - d["center"]) ** 2) / (2 * d["width"] ** 2))
    else:
        base = np.exp(1j * np.pi * d["k"] * grid.t / grid.T)
    v = to_complex_array(d["vector"]) if "vector" in d else np.ones(n) / np.sqrt(n)
    return GridFunction(grid, base[:, None] * v[None, :])


def build_space(d: dict, grid, seed: int):
    k = d["kind"]
    if k in ("Besov", "TriebelLizorkin"):
        q = math.inf if d["q"] == "inf" else d["q"]
        cls = Besov if k == "Besov" else TriebelLizorkin
        return cls(d["s"], q, build_space(d["phi"], grid, seed))
    if k == "Lp":
        return Lp(d["p"])
    if k == "Lorentz":
        return Lorentz(d["p"])
    rng = np.random.default_rng(seed)
    g = build_function(d["weight"]["g"], grid, 1, rng)
    h = build_function(d["weight"]["h"], grid, 1, rng)
    return WeightedLp(d["p"], build_weight(g, h, d["p"], Lp(d["p"])))


def build_bank(d: dict, grid, n: int, seed: int) -> list:
    size = d["size"]
    seed = d.get("seed", seed)
    band = d.get("band")
    if d["kind"] == "standard":
        return [(m.label, m.f) for m in standard_bank(grid, n, seed, size, band)]
    if d["kind"] == "modes":
        band = grid.nyquist / 2 if band is None else band
        kmax = int(np.floor(band * grid.T / np.pi))
        return [(m.label, m.f) for m in mode_bank(grid, n, np.random.default_rng(seed), size, kmax)]
    if n != 1:
        raise ConfigError("bank.kind", "the positive bank is scalar; it needs pencil.n = 1")
    return [(f"positive[{i}]", f) for i, f in enumerate(positive_bank(grid, size, seed))]


# --------------------------------------------------------------------------
# output helpers


def _clean(x):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else ("inf" if x > 0 else "-inf" if x < 0 else "nan")
    return x


class Writer:
    def __init__(self, out_dir: str, formats):
        self.dir = out_dir
        self.formats = set(formats)
        self.files = []
        os.makedirs(out_dir, exist_ok=True)

    def _path(self, name):
        self.files.append(name)
        return os.path.join(self.dir, name)

    def json(self, name, obj):
        if "json" not in self.formats:
            return
        text = json.dumps(_clean(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"
        with open(self._path(name), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)

    def csv(self, name, header, rows):
        """``rows`` is a list of tuples; floats are written with 17 significant digits."""
        if "csv" not in self.formats:
            return
        def cell(v):
            if isinstance(v, (float, np.floating)):
                return "%.17g" % v
            return str(v)
        with open(self._path(name), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(",".join(header) + "\n")
            for r in rows:
                fh.write(",".join(cell(v) for v in r) + "\n")

    def table(self, name, header, columns):
        self.csv(name, header, zip(*[np.asarray(c, dtype=float) for c in columns]))


def _complex_columns(prefix, samples):
    header, cols = [], []
    for i in range(samples.shape[1]):
        header += [f"Re_{prefix}{i}", f"Im_{prefix}{i}"]
        cols += [samples[:, i].real, samples[:, i].imag]
    return header, cols


def _kappas(config: ExperimentConfig, spaces) -> dict:
    out = {}
    for d, sp in zip(config.data["spaces"], spaces):
        base = getattr(sp, "phi", sp)
        try:
            out[str(sp)] = {"kappa": maximal_norm_bound(base), "kappa_dual": maximal_norm_bound(dual(base))}
        except MaxRegError:
            out[str(sp)] = None
    return out


def _header(command: str, config: ExperimentConfig, kappa: dict) -> dict:
    g = config.grid
    return {"tool": "maxreg", "version": __version__, "command": command,
            "config_sha256": config.digest(), "seed": config.seed,
            "grid": {"T": g.T, "N": g.N, "h": g.h}, "kappa": kappa}


def _l2(f: GridFunction) -> float:
    return float(np.sqrt(f.grid.h * np.sum(np.abs(f.samples) ** 2)))


# --------------------------------------------------------------------------
# commands


def cmd_solve(config: ExperimentConfig, writer: Writer) -> int:
    if "pencil" not in config.data:
        raise ConfigError("pencil", "solve needs a pencil")
    if "forcing" not in config.data:
        raise ConfigError("forcing", "solve needs a forcing function")
    grid = config.grid
    pencil = build_pencil(config.data["pencil"])
    f = build_function(config.data["forcing"], grid, pencil.n, np.random.default_rng(config.seed))
    spaces = [build_space(d, grid, config.seed) for d in config.data["spaces"]]
    res = solve(pencil, f)
    t = grid.t
    h, c = _complex_columns("u", res.u.samples)
    writer.table("u.csv", ["t"] + h, [t] + c)
    for name in COMPONENTS:
        h, c = _complex_columns(name + "_", res.components[name].samples)
        writer.table(f"component_{name}.csv", ["t"] + h, [t] + c)
    fn = _l2(f)
    worst = int(np.argmax(res.condition))
    summary = _header("solve", config, _kappas(config, spaces))
    summary.update({
        "forcing_l2": fn,
        "residual_sup": res.residual_norm(),
        "residual_relative": 0.0 if fn == 0 else res.residual_norm() / float(np.max(np.abs(f.samples))),
        "norms_l2": {"u": _l2(res.u), **{k: _l2(v) for k, v in res.components.items()}},
        "condition": {"max": float(res.condition[worst]), "at_tau": float(grid.frequencies[worst]),
                      "median": float(np.median(res.condition))},
        "flags": list(res.flags),
    })
    writer.json("summary.json", summary)
    return EXIT_OK


def _certificate(a, gamma, flavor, grid):
    try:
        return mihlin_constant(a, gamma, flavor, grid=grid, strict=False).as_dict()
    except SingularAtNode as exc:
        return {"gamma": gamma, "flavor": flavor, "finite": False, "error": str(exc), "tau": exc.tau}


def _passes(cert, need_continuity):
    if not cert.get("finite"):
        return False
    return bool(cert.get("continuity_at_0")) if need_continuity else True


def certify_pencil(pencil: OperatorPencil, grid) -> dict:
    """Certificate bundle for the two routes to maximal regularity.

    Route (i): ``b`` invertible on the whole line, and ``a``, ``a0``, ``a1``,
    ``c_hat a`` and ``c_hat`` in the tilde class of order 2 (continuous at 0).
    Route (ii): ``b`` invertible off 0, ``c_hat`` in the homogeneous class of
    order 3 and the solution symbol and its companions there too, which gives
    the ``L^p`` bounds needed to transfer maximal regularity.
    """
    b = pencil_symbol(pencil)
    chat = pencil.chat.symbol
    out = {"route_i": {}, "route_ii": {}}

    # route (i)
    ri = out["route_i"]
    reasons = []
    if b.domain == PUNCTURED:
        reasons.append("c_hat is only defined off tau = 0")
    try:
        a_whole = invert_symbol(b, WHOLE, grid=grid)
        a_whole.jet(np.array([0.0]))
    except SingularAtNode as exc:
        a_whole = None
        reasons.append(f"b is singular at tau = {exc.tau:g} (condition {exc.cond:.3g})")
    ri["c_hat"] = _certificate(chat, 2, "M~", grid)
    if a_whole is not None and b.domain != PUNCTURED:
        comp = companion_symbols(pencil, a_whole)
        for name, sym in (("a", a_whole), ("a0", comp.a0), ("a1", comp.a1), ("d", comp.d), ("c_hat_a", comp.cconv)):
            ri[name] = _certificate(sym, 2, "M~", grid)
        for name in ("a", "a0", "a1", "c_hat_a", "c_hat"):
            if not _passes(ri[name], True):
                reasons.append(f"[{name}] is not certified in the tilde class of order 2")
        ri["strong_solution"] = _passes(ri["d"], True)
    elif not _passes(ri["c_hat"], True):
        reasons.append("[c_hat] is not certified in the tilde class of order 2")
    ri["pass"] = not reasons
    ri["reasons"] = reasons

    # route (ii)
    rii = out["route_ii"]
    reasons = []
    a_punct = invert_symbol(b, PUNCTURED)
    comp = companion_symbols(pencil, a_punct)
    rii["c_hat"] = _certificate(chat, 3, "M", grid)
    rii["c_hat_tilde2"] = _certificate(chat, 2, "M~", grid)
    for name, sym in (("a", a_punct), ("a0", comp.a0), ("a1", comp.a1), ("c_hat_a", comp.cconv)):
        rii[name] = _certificate(sym, 3, "M", grid)
    for name in ("c_hat", "a", "a0", "a1", "c_hat_a"):
        if not _passes(rii[name], False):
            err = rii[name].get("error")
            reasons.append(f"[{name}] is not certified in the homogeneous class of order 3"
                           + (f" ({err})" if err else ""))
    rii["pass"] = not reasons
    rii["reasons"] = reasons

    out["pass"] = ri["pass"] or rii["pass"]
    out["route"] = "i" if ri["pass"] else "ii" if rii["pass"] else None
    if out["pass"]:
        a = a_whole if ri["pass"] else a_punct
        bank = default_bank(grid)
        kernels = {}
        for name, sym in (("a", a), ("c_hat_a", companion_symbols(pencil, a).cconv)):
            cz = cz_constant(kernel_from_symbol(sym, grid))
            kernels[name] = {"constant": cz.constant, "decay0": cz.decay0, "decay1": cz.decay1,
                             "near_zero": cz.near_zero, "excluded_radius": cz.excluded_radius}
        env = dyadic_envelope_check(a, bank)
        out["kernel"] = kernels
        out["envelope"] = {"constant": env.constant, "per_level": list(env.per_level)}
    return out


def cmd_certify(config: ExperimentConfig, writer: Writer) -> int:
    if "pencil" not in config.data:
        raise ConfigError("pencil", "certify needs a pencil")
    grid = config.grid
    pencil = build_pencil(config.data["pencil"])
    spaces = [build_space(d, grid, config.seed) for d in config.data["spaces"]]
    bundle = _header("certify", config, _kappas(config, spaces))
    bundle.update(certify_pencil(pencil, grid))
    writer.json("certificates.json", bundle)
    if not bundle["pass"]:
        msgs = ["route (i) failed: " + "; ".join(bundle["route_i"]["reasons"]),
                "route (ii) failed: " + "; ".join(bundle["route_ii"]["reasons"])]
        raise HypothesisFailure("\n".join(msgs))
    return EXIT_OK


def _slug(text: str) -> str:
    keep = [c if c.isalnum() else "_" for c in text]
    return "".join(keep).strip("_")


def cmd_regularity(config: ExperimentConfig, writer: Writer) -> int:
    if "pencil" not in config.data:
        raise ConfigError("pencil", "regularity needs a pencil")
    if not config.data["spaces"]:
        raise ConfigError("spaces", "regularity needs at least one space")
    grid = config.grid
    pencil = build_pencil(config.data["pencil"])
    spaces = [build_space(d, grid, config.seed) for d in config.data["spaces"]]
    bank = build_bank(config.data["bank"], grid, pencil.n, config.seed)
    if not bank:
        raise ConfigError("bank.size", "the bank is empty")
    labels = [lab for lab, _ in bank]
    reports = regularity_sweep(pencil, spaces, [f for _, f in bank], config.data["bank"]["kind"])
    names = ("solution",) + COMPONENTS
    rows = []
    for rep in reports:
        for comp in names:
            for i, r in enumerate(rep.ratios[comp]):
                rows.append((rep.space, comp, i, labels[i], float(r)))
    writer.csv("regularity.csv", ["space", "component", "index", "label", "ratio"], rows)
    for si, rep in enumerate(reports):
        writer.table(f"regularity_space{si}_{_slug(rep.space)}.csv", ["index"] + list(names),
                     [np.arange(len(bank))] + [rep.ratios[c] for c in names])
    first = next((f for _, f in bank if np.any(f.samples != 0)), None)
    consistency = None
    if first is not None:
        wc = weighted_consistency_check(pencil, first, Lp(2.0))
        consistency = {"weighted_norm": wc.weighted_norm, "finite": wc.finite, "l2_norm": wc.l2_norm,
                       "bit_identical": wc.bit_identical, "ap_bound": wc.ap_bound}
    summary = _header("regularity", config, _kappas(config, spaces))
    summary.update({"bank": {"kind": config.data["bank"]["kind"], "size": len(bank)},
                    "spaces": [rep.as_dict() for rep in reports], "consistency": consistency})
    writer.json("regularity.json", summary)
    return EXIT_OK


def cmd_weights(config: ExperimentConfig, writer: Writer) -> int:
    if "weights" not in config.data:
        raise ConfigError("weights", "weights needs a weights section")
    d = config.data["weights"]
    grid = config.grid
    rng = np.random.default_rng(config.seed)
    g = build_function(d["g"], grid, 1, rng)
    h = build_function(d["h"], grid, 1, rng)
    p, K = d["p"], d["K"]
    phi = build_space(d["phi"], grid, config.seed)
    w = build_weight(g, h, p, phi, K=K)
    kappa, kappa_dual = w.meta["kappa"], w.meta["kappa_dual"]
    Rg = rubio_iterate(g, kappa, K)
    a1 = pointwise_A1_check(Rg, kappa, K)
    ap = ap_constant(w, p)
    writer.table("weight.csv", ["t", "w"], [grid.t, w.values])
    summary = _header("weights", config, {str(phi): {"kappa": kappa, "kappa_dual": kappa_dual}})
    summary.update({
        "p": p, "K": K, "phi": str(phi),
        "ap_constant": ap, "ap_bound": w.meta["ap_bound"], "within_bound": bool(ap <= w.meta["ap_bound"]),
        "a1_max_ratio": a1.max_ratio, "a1_slack": 1.0 - a1.max_ratio, "a1_tolerance": a1.tolerance,
        "a1_ok": a1.ok, "clamped_nodes": w.clamped,
    })
    writer.json("weights.json", summary)
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "certify": cmd_certify, "regularity": cmd_regularity, "weights": cmd_weights}


# --------------------------------------------------------------------------
# entry point


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="maxreg", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="JSON experiment config")
        sp.add_argument("--out", help="output directory (overrides output.dir)")
        sp.add_argument("--seed", type=int, help="random seed (overrides the config)")
        sp.add_argument("--grid-n", type=int, help="number of grid points")
        sp.add_argument("--grid-t", type=float, help="half-length T of the periodic window")
    return ap


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.seed is not None and args.seed < 0:
            raise ConfigError("--seed", "seed must be nonnegative")
        config = load(args.config).with_overrides(args.seed, args.grid_n, args.grid_t, args.out)
        out = config.data["output"]
        writer = Writer(out["dir"], out["formats"])
        return COMMANDS[args.command](config, writer)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NonInvertiblePencil as exc:
        nodes = ", ".join(f"{t:.17g}" for t in exc.nodes)
        print(f"non-invertible pencil at tau = [{nodes}]: {exc}", file=sys.stderr)
        return EXIT_MATH
    except (HypothesisFailure, ZeroInput, SingularAtNode) as exc:
        print(f"mathematical failure: {exc}", file=sys.stderr)
        return EXIT_MATH


if __name__ == "__main__":
    sys.exit(main())
