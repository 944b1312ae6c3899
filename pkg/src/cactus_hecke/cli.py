"""Command-line driver: build a group, export tables, run the verification suites.

Each task writes ``<task>.json`` or ``<task>.csv`` into the output directory,
and ``summary.json`` records per-task metadata and failure counts.  The exit
status is 0 unless a check backed by a theorem failed.

Example::

    cactus-hecke --group "I2(5)" --tasks dihedral-golden --out out/
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

from . import report
from .cactus import (
    Cactus,
    check_characterization,
    check_conjecture,
    dihedral_predictions,
    enumerate_relations,
    orbit_cell_relation,
    pi_W,
)
from .coxeter import CoxGroup, GroupTooLarge, MalformedMatrixFile, UnknownType, build_group, parse_group_spec
from .hecke import HeckeElt
from .jring import JElt
from .ring import LaurentPoly, RatFunc, rf_member_localized

log = logging.getLogger(__name__)

TASKS = (
    "group-info",
    "kl",
    "hecke-tables",
    "afunction",
    "cells",
    "jring",
    "wtilde",
    "verify-theorem",
    "verify-conjecture",
    "orbits",
    "dihedral-golden",
)

EXIT_OK, EXIT_THEOREM_FAILED, EXIT_CONFIG, EXIT_TOO_LARGE = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


@dataclass
class JobConfig:
    group_spec: str
    tasks: list[str]
    out: Path = Path("out")
    format: str = "json"
    max_size: int = 50000
    threads: int = 1
    coset_reading: str = "right"
    irreducible_only: bool = False
    figures: bool = False

    def __post_init__(self):
        self.out = Path(self.out)
        if not self.tasks:
            raise ConfigError("no tasks given")
        for t in self.tasks:
            if t.split(":", 1)[0] not in TASKS:
                raise ConfigError(f"unknown task {t!r}; choose from {', '.join(TASKS)}")
        if self.format not in ("json", "csv"):
            raise ConfigError(f"unknown format {self.format!r}")
        if self.coset_reading not in ("right", "left"):
            raise ConfigError(f"unknown coset reading {self.coset_reading!r}")
        if self.threads < 1 or self.max_size < 1:
            raise ConfigError("threads and max_size must be positive")

    @classmethod
    def from_dict(cls, d: dict) -> "JobConfig":
        d = dict(d)
        # the short aliases lose to the field names when both are present
        if "group" in d:
            d.setdefault("group_spec", d.pop("group"))
        if "output" in d:
            d.setdefault("out", d.pop("output"))
        try:
            return cls(**d)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None


@dataclass
class TaskResult:
    name: str
    records: list[dict]
    meta: dict = field(default_factory=dict)
    backed_failures: int = 0


# --------------------------------------------------------------------------
# helpers


def _jelt(elt: JElt) -> dict:
    return elt.to_json()


def _parse_subset(g: CoxGroup, text: str) -> frozenset[int]:
    text = text.strip().strip("{}")
    out = set()
    for tok in filter(None, (t.strip() for t in text.replace(" ", ",").split(","))):
        k = int(tok[1:] if tok[0] in "sS" else tok) - 1
        if not 0 <= k < g.rank:
            raise ConfigError(f"generator {tok!r} not in S")
        out.add(k)
    return frozenset(out)


def _row(part: str, passed: bool, backed: bool, witness: str = "", **extra) -> dict:
    return {"part": part, **extra, "pass": "pass" if passed else "fail", "witness": witness, "theorem_backed": backed}


def _failures(rows: Sequence[dict]) -> int:
    return sum(1 for r in rows if r["pass"] != "pass" and r["theorem_backed"])


# --------------------------------------------------------------------------
# tasks


class Runner:
    def __init__(self, config: JobConfig, group: CoxGroup):
        self.config = config
        self.group = group
        self._cactus: Cactus | None = None

    @property
    def cactus(self) -> Cactus:
        if self._cactus is None:
            self._cactus = Cactus(self.group, coset_reading=self.config.coset_reading)
        return self._cactus

    @property
    def kl(self):
        return self.cactus.kl

    @property
    def jring(self):
        return self.cactus.jring

    def warm(self, tasks: Sequence[str]) -> None:
        """Fill the shared caches before tasks run concurrently."""
        if any(t != "group-info" for t in tasks):
            kl = self.kl
            kl.h, kl.a, kl.gamma, kl.distinguished
            self.jring.psi_matrix, self.jring.longest_image

    def run_task(self, token: str) -> TaskResult:
        name, _, arg = token.partition(":")
        fn: Callable[..., TaskResult] = getattr(self, "task_" + name.replace("-", "_"))
        return fn(arg) if name == "wtilde" else fn()

    def task_group_info(self) -> TaskResult:
        g = self.group
        recs = [{"element": g.name(x), "length": g.length[x], "inverse": g.name(g.inverse[x])} for x in g]
        meta = {
            "label": g.label,
            "order": len(g),
            "rank": g.rank,
            "matrix": [list(r) for r in g.matrix.m],
            "longest": g.name(g.longest),
        }
        return TaskResult("group-info", recs, meta)

    def task_kl(self) -> TaskResult:
        g, kl = self.group, self.kl
        recs = []
        for w in g:
            for y, p in sorted(kl.p[w].items()):
                recs.append({"y": g.name(y), "w": g.name(w), "p": str(p), "mu": kl.mu_coefficient(y, w)})
        return TaskResult("kl", recs, {"convention": "C_w = sum_y p_{y,w} T_y, p_{y,w} in v^-1 Z[v^-1] for y < w"})

    def task_hecke_tables(self) -> TaskResult:
        g, kl = self.group, self.kl
        recs = [
            {"w": g.name(w), "w'": g.name(w2), "z": g.name(z), "h": str(c)}
            for w in g
            for w2 in g
            for z, c in sorted(kl.h[w][w2].items())
        ]
        return TaskResult("hecke-tables", recs, {"convention": "C_w C_w' = sum_z h_{w,w',z} C_z"})

    def task_afunction(self) -> TaskResult:
        g, kl = self.group, self.kl
        dist = set(kl.distinguished)
        recs = [
            {
                "w": g.name(x),
                "a": kl.a[x],
                "Delta": kl.delta[x][0],
                "n": kl.delta[x][1],
                "distinguished": x in dist,
            }
            for x in g
        ]
        meta = {"distinguished": [g.name(d) for d in kl.distinguished]}
        if self.config.figures:
            meta["figure"] = report.a_histogram(g, kl.a, self.config.out / "afunction.png").name
        return TaskResult("afunction", recs, meta)

    def task_cells(self) -> TaskResult:
        g, kl = self.group, self.kl
        idx = {k: kl.cell_index(k) for k in ("left", "right", "two-sided")}
        recs = [{"w": g.name(x), "a": kl.a[x], **{f"{k}_cell": idx[k][x] for k in idx}} for x in g]
        a_const = all(len({kl.a[x] for x in c}) == 1 for c in kl.two_sided_cells)
        meta = {
            "counts": {"left": len(kl.left_cells), "right": len(kl.right_cells), "two-sided": len(kl.two_sided_cells)},
            "a_constant_on_two_sided_cells": a_const,
        }
        if self.config.figures:
            meta["figure"] = report.cell_heatmap(g, kl.left_cells, kl.right_cells, self.config.out / "cells.png").name
        return TaskResult("cells", recs, meta)

    def task_jring(self) -> TaskResult:
        g, j = self.group, self.jring
        recs = [
            {"x": g.name(x), "y": g.name(y), "z": g.name(z), "coeff": k}
            for (x, y), entry in sorted(j.table.items())
            for z, k in sorted(entry.items())
        ]
        meta = {"product": "t_x t_y = sum_z coeff t_z", "identity": _jelt(j.j_identity())}
        return TaskResult("jring", recs, meta)

    def task_wtilde(self, arg: str = "") -> TaskResult:
        g, c = self.group, self.cactus
        subsets = [_parse_subset(g, arg)] if arg else [I for I in g.subsets() if I]
        recs = []
        for I in subsets:
            w = c.wtilde(I)
            for x, coeff in sorted(w.coeffs.items()):
                recs.append({"I": g.subset_name(I), "T": g.name(x), "coeff": str(coeff)})
        return TaskResult("wtilde" + (":" + arg if arg else ""), recs)

    def _characterization_rows(self, label: str, pre: HeckeElt, backed: bool) -> list[dict]:
        g = self.group
        t_vec = {x: RatFunc.of(c) for x, c in self.kl.to_t(pre).coeffs.items()}
        res = check_characterization(g, t_vec, range(g.rank))
        return [
            _row(f"{label}:square", res.square_is_one, backed),
            _row(f"{label}:specializes-to-w0", res.specializes_to_longest, backed),
            _row(f"{label}:conjugation", res.conjugates_generators, backed),
            _row(f"{label}:denominators", res.denominators_ok_at_one, backed),
        ]

    def _j_rows(self, label: str, t: JElt, backed: bool) -> list[dict]:
        g, j = self.group, self.jring
        w0 = g.longest
        sq = j.mul(t, t)
        rows = [_row(f"{label}:square-in-J", sq == j.one, backed, "" if sq == j.one else str(sq))]
        bad = [
            g.name(w)
            for w in g
            if j.mul(j.mul(t, j.t(w)), t) != j.t(g.mul(g.mul(w0, w), w0))
        ]
        rows.append(_row(f"{label}:conjugation-in-J", not bad, backed, ", ".join(bad[:5])))
        return rows

    def task_verify_theorem(self) -> TaskResult:
        g, kl, j, c = self.group, self.kl, self.jring, self.cactus
        w0 = g.longest
        rows: list[dict] = []
        lit = j.theorem_element()
        rows += self._j_rows("formula", lit, True)
        rows += self._characterization_rows("formula", j.psi_invert(lit), True)
        true = j.longest_image
        rows += self._j_rows("f(gamma_S)", true, True)
        rows += self._characterization_rows("f(gamma_S)", j.psi_invert(true), True)
        rows.append(_row("f(gamma_S)=formula", true == lit, False, "" if true == lit else str(true)))

        # sigma_W and its sign law on both sides
        sig = j.sigma_table
        rows.append(_row("sigma-involution", all(sig[sig[w][0]][0] == w for w in g), True))
        bad_l, bad_r = [], []
        for w in g:
            sign = (-1) ** (kl.a[g.mul(w0, w)] % 2)
            if j.mul(true, j.t(w)) != j.t(sig[w][0], sign):
                bad_l.append(g.name(w))
            target = g.mul(g.mul(w0, sig[w][0]), w0)
            if j.mul(j.t(w), true) != j.t(target, sign):
                bad_r.append(g.name(w))
        rows.append(_row("sigma-law-left", not bad_l, True, ", ".join(bad_l[:5])))
        rows.append(_row("sigma-law-right", not bad_r, True, ", ".join(bad_r[:5])))

        # rank-one law and denominators of every w~_I
        v = LaurentPoly.v()
        den = LaurentPoly.from_dict({0: 1, 2: 1})
        c0 = RatFunc.from_laurent(1 - v * v, den)
        c1 = RatFunc.from_laurent(2 * v, den)
        for s in range(g.rank):
            expect = {g.identity: c0, g.element((s,)): c1}
            got = c.wtilde({s}).coeffs
            rows.append(_row("rank-one", dict(got) == expect, True, "" if dict(got) == expect else str(got), I=f"{{s{s + 1}}}"))
        for I in g.subsets():
            if not I:
                continue
            bad = [g.name(x) for x, coeff in c.wtilde(I).coeffs.items() if not rf_member_localized(coeff, {1})]
            rows.append(_row("denominators-at-1", not bad, True, ", ".join(bad), I=g.subset_name(I)))

        # cactus relations
        for rel in enumerate_relations(g):
            same = c.f_of(rel.left) == c.f_of(rel.right)
            same_w = pi_W(g, rel.left) == pi_W(g, rel.right)
            rows.append(_row(f"relation-{rel.kind}", same and same_w, True, "" if same else "f differs", I=rel.describe(g)))
        for r in rows:
            r.setdefault("I", "")
        meta = {
            "formula_element": _jelt(lit),
            "f_gamma_S": _jelt(true),
            "sigma": {g.name(w): [g.name(z), s] for w, (z, s) in enumerate(sig)},
        }
        return TaskResult("verify-theorem", rows, meta, _failures(rows))

    def task_verify_conjecture(self) -> TaskResult:
        g, c = self.group, self.cactus
        subsets = g.subsets()
        if self.config.irreducible_only:
            subsets = [I for I in subsets if g.is_irreducible_subset(I)]
        rows = [r.as_dict() for r in check_conjecture(c, subsets)]
        meta = {
            "coset_reading": self.config.coset_reading,
            "checks": len(rows),
            "failures": sum(r["pass"] != "pass" for r in rows),
            "f_gamma": {g.subset_name(I): _jelt(c.f_gamma(I)) for I in subsets},
        }
        if self.config.figures:
            meta["figure"] = report.conjecture_grid(rows, self.config.out / "verify-conjecture.png").name
        return TaskResult("verify-conjecture", rows, meta, _failures(rows))

    def task_orbits(self) -> TaskResult:
        g, c, kl = self.group, self.cactus, self.kl
        orbits = {side: c.cactus_action_orbits(side) for side in ("left", "right")}
        cells = {"left": kl.left_cells, "right": kl.right_cells, "two-sided": kl.two_sided_cells}
        recs = []
        meta: dict = {}
        for side, orbs in orbits.items():
            meta[f"{side}_orbit_count"] = len(orbs)
            for kind, part in cells.items():
                rel = orbit_cell_relation(orbs, part)
                for key, val in rel.items():
                    meta[f"{side}_orbits_{key}_{kind}_cells"] = val
            for k, orb in enumerate(orbs):
                recs.extend({"side": side, "orbit": k, "w": g.name(x)} for x in orb)
        if self.config.figures:
            meta["figure"] = report.orbit_sizes(g, orbits, self.config.out / "orbits.png").name
        return TaskResult("orbits", recs, meta)

    def task_dihedral_golden(self) -> TaskResult:
        g, c = self.group, self.cactus
        try:
            pred = dihedral_predictions(g)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        rows = []
        for key, I in (("s1", {0}), ("s2", {1}), ("S", {0, 1})):
            got = c.f_gamma(I)
            ok = got == pred[key]
            rows.append(
                _row(
                    f"f(gamma_{key})",
                    ok,
                    True,
                    "" if ok else str(got),
                    got=_jelt(got),
                    expected=_jelt(pred[key]),
                )
            )
        return TaskResult("dihedral-golden", rows, {"m": g.matrix.m[0][1]}, _failures(rows))


# --------------------------------------------------------------------------
# output


def _write(result: TaskResult, config: JobConfig, group: CoxGroup) -> Path:
    stem = result.name.replace(":", "_").replace(",", "-")
    if config.format == "json":
        path = config.out / f"{stem}.json"
        doc = {"task": result.name, "group": group.label, "meta": result.meta, "records": result.records}
        path.write_text(json.dumps(doc, indent=1, default=str) + "\n")
    else:
        path = config.out / f"{stem}.csv"
        keys: dict[str, None] = {}
        for r in result.records:
            keys.update(dict.fromkeys(r))
        with path.open("w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(keys), lineterminator="\n")
            writer.writeheader()
            for r in result.records:
                writer.writerow({k: json.dumps(v) if isinstance(v, (dict, list)) else v for k, v in r.items()})
    return path


def run(config: JobConfig) -> int:
    """Run every task of the job and write its files; returns the exit status."""
    try:
        matrix = parse_group_spec(config.group_spec)
        group = build_group(matrix, max_size=config.max_size)
    except (UnknownType, MalformedMatrixFile, FileNotFoundError) as exc:
        log.error("cannot resolve group %r: %s", config.group_spec, exc)
        return EXIT_CONFIG
    except GroupTooLarge as exc:
        log.error("%s", exc)
        return EXIT_TOO_LARGE
    config.out.mkdir(parents=True, exist_ok=True)
    runner = Runner(config, group)
    try:
        if config.threads > 1:
            runner.warm(config.tasks)
            with ThreadPoolExecutor(config.threads) as pool:
                results = list(pool.map(runner.run_task, config.tasks))
        else:
            results = [runner.run_task(t) for t in config.tasks]
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    summary = {"group": group.label, "order": len(group), "tasks": {}}
    failed = 0
    for res in results:
        path = _write(res, config, group)
        failed += res.backed_failures
        summary["tasks"][res.name] = {"file": path.name, "records": len(res.records), "theorem_backed_failures": res.backed_failures}
        if config.format == "csv" and res.meta:
            summary["tasks"][res.name]["meta"] = res.meta
    summary["exit_code"] = EXIT_THEOREM_FAILED if failed else EXIT_OK
    (config.out / "summary.json").write_text(json.dumps(summary, indent=1, default=str) + "\n")
    for name, info in summary["tasks"].items():
        print(f"{name}\t{info['file']}\t{info['records']} records\t{info['theorem_backed_failures']} backed failures")
    return summary["exit_code"]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cactus-hecke", description=__doc__.split("\n")[0])
    src = p.add_mutually_exclusive_group()
    src.add_argument("--group", help='type label such as "A3", "I2(5)", "A1xA2", or a matrix file')
    src.add_argument("--matrix-file", help="JSON Coxeter matrix file")
    p.add_argument("--config", help="JSON job file; command-line flags override its fields")
    p.add_argument("--tasks", nargs="+", help=f"any of: {', '.join(TASKS)}; wtilde:s1,s2 selects one subset")
    p.add_argument("--out", help="output directory (default: out)")
    p.add_argument("--format", choices=["json", "csv"])
    p.add_argument("--max-size", type=int, help="refuse groups with more elements (default 50000)")
    p.add_argument("--threads", type=int, help="tasks run concurrently; output does not depend on it")
    p.add_argument("--coset-reading", choices=["right", "left"], help="coset decomposition used by conjecture part (2)")
    p.add_argument("--irreducible-only", action="store_true", default=None, help="restrict verify-conjecture to irreducible W_I")
    p.add_argument("--figures", action="store_true", default=None, help="also render PNG figures")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def config_from_args(args: argparse.Namespace) -> JobConfig:
    d: dict = {}
    if args.config:
        d.update(json.loads(Path(args.config).read_text()))
    if args.group or args.matrix_file:
        d.pop("group", None)
        d["group_spec"] = args.group or args.matrix_file
    for key in ("tasks", "out", "format", "max_size", "threads", "coset_reading", "irreducible_only", "figures"):
        val = getattr(args, key)
        if val is not None:
            d[key] = val
    if "group" not in d and "group_spec" not in d:
        raise ConfigError("no group given (use --group or --matrix-file)")
    return JobConfig.from_dict(d)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        config = config_from_args(args)
    except (ConfigError, json.JSONDecodeError, OSError) as exc:
        parser.error(str(exc))
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
