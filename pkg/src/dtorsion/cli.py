"""Command line front end.

Every subcommand prints one JSON document (or CSV/text with ``--format``).
Errors print ``{"error": ..., "message": ..., "exit_code": ...}`` and exit
with 2 (budget), 3 (parse) or 4 (verification mismatch).
"""

from __future__ import annotations

import argparse
import configparser
import csv
import hashlib
import io
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from . import __version__
from .abelian import AbelianInvariants
from .bar import DEFAULT_BAR_BUDGET, abelian_subgroup_cycles, h0n, homology, \
    quotient_via_kernel_coordinates, sha_n, z0n_generators
from .errors import DTorsionError, ParseError, VerificationMismatch
from .groups import DEFAULT_ORDER_CAP, FiniteGroup, group_from_spec
from .torsion import br_n_mod_m, cohomology_mod_m, dw_partition, dw_weight, homology_exponent, \
    is_cocycle, orbifold_partition, untwisted_part
from .tuples import DEFAULT_ORBIT_CAP, commuting_tuple_count, commuting_tuples, orbit_representatives

log = logging.getLogger("dtorsion")

CACHE_ENV = "DTORSION_CACHE_DIR"
COMMANDS = ("homology", "h0n", "sha", "brn", "tuples", "dw", "orbifold", "scan")
SCAN_KINDS = ("untwisted", "homology", "h0n", "sha")


@dataclass
class Settings:
    bar_budget: int = DEFAULT_BAR_BUDGET
    order_cap: int = DEFAULT_ORDER_CAP
    orbit_cap: int = DEFAULT_ORBIT_CAP

    @classmethod
    def load(cls, path: str | None) -> "Settings":
        """Read ``key = value`` lines (``#`` comments allowed)."""
        out = cls()
        if not path:
            return out
        cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
        try:
            with open(path) as fh:
                cp.read_string("[dtorsion]\n" + fh.read())
        except (OSError, configparser.Error) as exc:
            raise ParseError(f"cannot read config {path}: {exc}") from None
        for key, raw in cp["dtorsion"].items():
            if not hasattr(out, key):
                raise ParseError(f"unknown config key {key!r}")
            try:
                setattr(out, key, int(raw.replace("_", "")))
            except ValueError:
                raise ParseError(f"config key {key!r} needs an integer, got {raw!r}") from None
        return out


@dataclass
class JobRequest:
    group: str
    subcommand: str
    n: int
    modulus: int | None = None
    class_coords: str | None = None
    sectors: str | None = None
    verify: bool = False
    paranoid: bool = False
    settings: Settings = field(default_factory=Settings)


@dataclass
class ResultRecord:
    fingerprint: str
    payload: object
    timings: dict
    version: str = __version__
    cached: bool = False


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(f"{self.prog}: {message}")


def _inv_json(inv: AbelianInvariants) -> dict:
    return inv.to_json()


def _request_fingerprint(g: FiniteGroup, cmd: str, params: dict) -> str:
    blob = json.dumps({"group": g.fingerprint, "cmd": cmd, "params": params, "version": __version__},
                      sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()


def _cache_dir(explicit: str | None) -> str | None:
    return explicit or os.environ.get(CACHE_ENV) or None


def _cached(g, cmd, params, cache_dir, compute) -> ResultRecord:
    key = _request_fingerprint(g, cmd, params)
    path = os.path.join(cache_dir, f"{key}.json") if cache_dir else None
    if path and os.path.exists(path):
        with open(path) as fh:
            rec = json.load(fh)
        if rec.get("version") == __version__ and rec.get("fingerprint") == key:
            log.info("cache hit %s", key[:12])
            return ResultRecord(key, rec["payload"], rec.get("timings", {}), __version__, True)
    timings = {}
    t0 = time.perf_counter()
    payload = compute(timings)
    timings["total"] = 1000 * (time.perf_counter() - t0)
    rec = ResultRecord(key, payload, {k: round(v, 3) for k, v in timings.items()})
    if path:
        os.makedirs(cache_dir, exist_ok=True)
        tmp = path + ".tmp"
        with open(tmp, "w") as fh:
            json.dump({"fingerprint": key, "payload": payload, "timings": rec.timings,
                       "version": __version__}, fh)
        os.replace(tmp, path)
    return rec


def _expect(label: str, got, want):
    if got != want:
        raise VerificationMismatch(f"{label}: {got} != {want}")


def _invariants_job(g: FiniteGroup, req: JobRequest, timings: dict) -> dict:
    s, n, cmd = req.settings, req.n, req.subcommand
    budget = s.bar_budget
    if cmd == "homology":
        out = homology(g, n, budget, timings)
    elif cmd == "h0n":
        orbits = orbit_representatives(g, n, s.orbit_cap)
        out = h0n(g, n, budget, timings=timings, orbits=orbits)
        if req.paranoid or req.verify:
            _expect("h0n from all commuting tuples", h0n(g, n, budget, paranoid=True), out)
    else:
        out = sha_n(g, n, budget, timings)
    if req.verify:
        if cmd == "homology":
            extra = []
            full = homology(g, n, budget, full=True)
        elif cmd == "h0n":
            extra = z0n_generators(g, n, all_tuples=True)
            full = h0n(g, n, budget, paranoid=True, full=True)
        else:
            extra = abelian_subgroup_cycles(g, n, budget) if not g.is_abelian else None
            full = sha_n(g, n, budget, full=True)
        _expect(f"{cmd} with every boundary column", full, out)
        if extra is not None:
            _expect(f"{cmd} by kernel coordinates",
                    quotient_via_kernel_coordinates(g, n, extra, budget), out)
    payload = {"order": g.order, "n": n, **_inv_json(out)}
    if req.verify:
        payload["verified"] = True
    return payload


def _modulus(g, req) -> int:
    if req.modulus is not None:
        if req.modulus < 2:
            raise ParseError("--mod must be >= 2")
        return req.modulus
    return max(2, homology_exponent(g, req.n, req.settings.bar_budget))


def _brn_job(g: FiniteGroup, req: JobRequest, timings: dict) -> dict:
    s, n = req.settings, req.n
    m = _modulus(g, req)
    t0 = time.perf_counter()
    h = cohomology_mod_m(g, n, m, s.bar_budget)
    timings["cohomology"] = 1000 * (time.perf_counter() - t0)
    t0 = time.perf_counter()
    orbits = orbit_representatives(g, n, s.orbit_cap)
    br = br_n_mod_m(g, n, m, s.bar_budget, cohomology=h, orbits=orbits)
    timings["brn"] = 1000 * (time.perf_counter() - t0)
    br_part = untwisted_part(g, n, br, s.bar_budget)
    h_part = untwisted_part(g, n, h, s.bar_budget)
    if req.verify:
        # Hom(A, Z/m) has the same invariants gcd(d_i, m) as Ext^1(A, Z/m)
        _expect("H^n(G,Z/m) minus Ext vs Hom(H_n, Z/m)", h_part, homology(g, n, s.bar_budget).ext(m))
        _expect("Br^n minus Ext vs Hom(H_0n, Z/m)", br_part,
                h0n(g, n, s.bar_budget, orbits=orbits).ext(m))
    payload = {
        "order": g.order, "n": n, "modulus": m,
        "cohomology": _inv_json(h.invariants),
        "brn": _inv_json(br.invariants),
        "brn_minus_ext": _inv_json(br_part),
        "cohomology_minus_ext": _inv_json(h_part),
        "cohomology_orders": h.orders,
        "brn_generators": [list(h.project(w)) for w in br.basis],
    }
    if req.verify:
        payload["verified"] = True
    return payload


def _parse_coords(text: str | None, k: int) -> list:
    if text is None or text.strip() == "":
        return [0] * k
    try:
        coords = [int(x) for x in text.split(",") if x.strip() != ""]
    except ValueError:
        raise ParseError(f"bad class coordinates {text!r}") from None
    if len(coords) != k:
        raise ParseError(f"expected {k} class coordinates, got {len(coords)}")
    return coords


def _brute_partition(g: FiniteGroup, n: int, omega) -> dict:
    counts = {}
    for t in commuting_tuples(g, n):
        k = dw_weight(g, omega, t)
        counts[k] = counts.get(k, 0) + 1
    return {k: Fraction(c, g.order) for k, c in counts.items()}


def _dw_job(g: FiniteGroup, req: JobRequest, timings: dict) -> dict:
    s, n = req.settings, req.n
    m = _modulus(g, req)
    h = cohomology_mod_m(g, n, m, s.bar_budget)
    orbits = orbit_representatives(g, n, s.orbit_cap)
    if req.class_coords is not None and req.class_coords.strip() == "all":
        coords_list = [list(c) for c in h.classes()]
    else:
        coords_list = [_parse_coords(req.class_coords, len(h.orders))]
    reports = []
    for coords in coords_list:
        omega = h.representative(coords)
        hist = dw_partition(g, n, omega, orbits)
        if req.verify:
            if not is_cocycle(g, omega, s.bar_budget):
                raise VerificationMismatch("class representative is not a cocycle")
            _expect("orbit sum vs full tuple sum", _brute_partition(g, n, omega), hist.counts)
        reports.append({"class": coords, **hist.to_json()})
    payload = {"order": g.order, "n": n, "modulus": m, "cohomology": _inv_json(h.invariants),
               "partitions": reports}
    if req.verify:
        payload["verified"] = True
    return payload


def _read_sectors(path: str) -> dict:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read sectors file {path}: {exc}") from None
    out = {}
    for k, v in raw.items():
        try:
            out[int(k)] = complex(v[0], v[1]) if isinstance(v, list) else complex(v)
        except (TypeError, ValueError, IndexError):
            raise ParseError(f"bad amplitude for sector {k!r}: {v!r}") from None
    return out


def _orbifold_job(g: FiniteGroup, req: JobRequest, timings: dict) -> dict:
    s, n = req.settings, req.n
    if not req.sectors:
        raise ParseError("orbifold needs --sectors FILE")
    m = _modulus(g, req)
    h = cohomology_mod_m(g, n, m, s.bar_budget)
    omega = h.representative(_parse_coords(req.class_coords, len(h.orders)))
    orbits = orbit_representatives(g, n, s.orbit_cap)
    z = orbifold_partition(g, n, omega, _read_sectors(req.sectors), orbits)
    return {"order": g.order, "n": n, "modulus": m,
            "class": list(h.project(omega)), "value": [_round(z.real), _round(z.imag)]}


def _round(x: float) -> float:
    r = round(x, 12)
    return 0.0 if r == 0 else r


def _tuples_job(g: FiniteGroup, req: JobRequest, timings: dict) -> list:
    orbits = orbit_representatives(g, req.n, req.settings.orbit_cap)
    if req.verify:
        total = sum(o.orbit_size for o in orbits)
        _expect("orbit sizes vs tuple count", total, commuting_tuple_count(g, req.n))
        _expect("orbit sizes vs enumeration", total, sum(1 for _ in commuting_tuples(g, req.n)))
    return [o.to_json() for o in orbits]


_JOBS = {"homology": _invariants_job, "h0n": _invariants_job, "sha": _invariants_job,
         "brn": _brn_job, "dw": _dw_job, "orbifold": _orbifold_job, "tuples": _tuples_job}


def run(req: JobRequest, cache_dir: str | None = None) -> ResultRecord:
    """Execute one job, going through the result cache when a directory is set."""
    if req.n < 1:
        raise ParseError("degree n must be >= 1")
    g = group_from_spec(req.group, order_cap=req.settings.order_cap)
    params = {"n": req.n, "modulus": req.modulus, "class": req.class_coords,
              "verify": req.verify, "paranoid": req.paranoid,
              "budgets": [req.settings.bar_budget, req.settings.orbit_cap]}
    if req.sectors:
        with open(req.sectors, "rb") as fh:
            params["sectors"] = hashlib.sha256(fh.read()).hexdigest()
    job = _JOBS[req.subcommand]
    return _cached(g, req.subcommand, params, cache_dir, lambda tm: job(g, req, tm))


def _scan_one(args) -> dict:
    path, n, kind, settings, cache_dir = args
    row = {"file": os.path.basename(path)}
    try:
        with open(path) as fh:
            spec = fh.read().strip()
        g = group_from_spec(spec, order_cap=settings.order_cap)
        row.update(group=g.name, order=g.order, fingerprint=g.fingerprint)
        kinds = ("homology", "h0n") if kind == "untwisted" else (kind,)
        for k in kinds:
            rec = run(JobRequest(spec, k, n, settings=settings), cache_dir)
            row[k] = {"torsion": rec.payload["torsion"], "free_rank": rec.payload["free_rank"]}
        if kind == "untwisted":
            row["untwisted"] = row["homology"] == row["h0n"] and bool(row["homology"]["torsion"])
    except DTorsionError as exc:
        row.update(error=type(exc).__name__, message=str(exc))
    except OSError as exc:
        row.update(error="OSError", message=str(exc))
    return row


def scan(directory: str, n: int, kind: str = "untwisted", settings: Settings | None = None,
         jobs: int = 1, cache_dir: str | None = None) -> list:
    """Evaluate every spec file in ``directory``; failures are recorded per file."""
    settings = settings or Settings()
    if not os.path.isdir(directory):
        raise ParseError(f"not a directory: {directory}")
    files = sorted(os.path.join(directory, f) for f in os.listdir(directory)
                   if not f.startswith(".") and os.path.isfile(os.path.join(directory, f)))
    work = [(f, n, kind, settings, cache_dir) for f in files]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_scan_one, work))
    else:
        rows = [_scan_one(w) for w in work]
    rows.sort(key=lambda r: (r.get("fingerprint", "~"), r["file"]))
    return rows


def _fmt_inv(d: dict) -> str:
    return str(AbelianInvariants(tuple(d["torsion"]), d["free_rank"]))


def _csv(rows: list, header: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue().rstrip("\n")


def render(cmd: str, group: str, payload, timings: dict, fmt: str) -> str:
    if fmt == "json":
        if cmd == "tuples":
            return json.dumps(payload)
        if cmd == "scan":
            return json.dumps(payload)
        out = {"group": group, **payload}
        if cmd in ("homology", "h0n", "sha"):
            out["timings_ms"] = timings
        return json.dumps(out)
    if cmd in ("homology", "h0n", "sha"):
        if fmt == "csv":
            return _csv([[group, payload["n"], ";".join(map(str, payload["torsion"])), payload["free_rank"]]],
                         ["group", "n", "torsion", "free_rank"])
        return f"{cmd}({group}, {payload['n']}) = {_fmt_inv(payload)}"
    if cmd == "tuples":
        if fmt == "csv":
            return _csv([[i, " ".join(map(str, o["rep"])), o["stab"], o["orbit"]] for i, o in enumerate(payload)],
                        ["index", "rep", "stab", "orbit"])
        return "\n".join(f"{i}: {o['rep']} stab={o['stab']} orbit={o['orbit']}" for i, o in enumerate(payload))
    if cmd == "brn":
        if fmt == "csv":
            return _csv([[group, payload["n"], payload["modulus"],
                          ";".join(map(str, payload["cohomology"]["torsion"])),
                          ";".join(map(str, payload["brn"]["torsion"])),
                          ";".join(map(str, payload["brn_minus_ext"]["torsion"]))]],
                        ["group", "n", "modulus", "cohomology", "brn", "brn_minus_ext"])
        return (f"H^{payload['n']}({group}, Z/{payload['modulus']}) = {_fmt_inv(payload['cohomology'])}\n"
                f"Br^{payload['n']}({group}, Z/{payload['modulus']}) = {_fmt_inv(payload['brn'])}\n"
                f"Br minus Ext = {_fmt_inv(payload['brn_minus_ext'])}")
    if cmd == "dw":
        rows = []
        for rep in payload["partitions"]:
            for k, w in rep["histogram"].items():
                rows.append([" ".join(map(str, rep["class"])), k, w])
        if fmt == "csv":
            return _csv(rows, ["class", "k", "weight"])
        lines = []
        for rep in payload["partitions"]:
            re_, im_ = rep["value"]
            lines.append(f"class {rep['class']}: Z = {re_:g}{im_:+g}i  histogram {rep['histogram']}")
        return "\n".join(lines)
    if cmd == "orbifold":
        re_, im_ = payload["value"]
        if fmt == "csv":
            return _csv([[group, payload["n"], payload["modulus"], re_, im_]], ["group", "n", "modulus", "re", "im"])
        return f"Z_orb({group}, T^{payload['n']}) = {re_:g}{im_:+g}i"
    if cmd == "scan":
        rows = []
        for r in payload:
            rows.append([r["file"], r.get("group", ""), r.get("order", ""),
                         ";".join(map(str, r["homology"]["torsion"])) if "homology" in r else "",
                         ";".join(map(str, r["h0n"]["torsion"])) if "h0n" in r else "",
                         ";".join(map(str, r["sha"]["torsion"])) if "sha" in r else "",
                         r.get("untwisted", ""), r.get("error", "")])
        header = ["file", "group", "order", "homology", "h0n", "sha", "untwisted", "error"]
        if fmt == "csv":
            return _csv(rows, header)
        return "\n".join("  ".join(str(x) for x in row) for row in [header] + rows)
    raise ValueError(cmd)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")
    common.add_argument("--verify", action="store_true", help="cross-check against brute-force routes")
    common.add_argument("--paranoid", action="store_true", help="use every commuting tuple for Z_0n")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for scan")
    common.add_argument("--cache-dir", default=None, help=f"result cache (default ${CACHE_ENV})")
    common.add_argument("--config", default=None, help="key=value budget file")
    common.add_argument("--budget", type=int, default=None, help="bar complex size budget")
    common.add_argument("--order-cap", type=int, default=None)
    common.add_argument("--plot", metavar="DIR", default=None, help="write figures (dw, scan)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="dtorsion", description="Homology, untwisted discrete torsion and DW partition functions.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    for name in ("homology", "h0n", "sha", "tuples"):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("group")
        sp.add_argument("n", type=int)
    sp = sub.add_parser("brn", parents=[common])
    sp.add_argument("group")
    sp.add_argument("n", type=int)
    sp.add_argument("--mod", type=int, default=None)
    for name in ("dw", "orbifold"):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("group")
        sp.add_argument("n", type=int)
        sp.add_argument("--mod", type=int, default=None)
        sp.add_argument("--class", dest="class_coords", default=None,
                        help="comma separated coordinates in the H^n(G,Z/m) basis" +
                             (" or 'all'" if name == "dw" else ""))
        if name == "orbifold":
            sp.add_argument("--sectors", required=True, help="JSON map orbit index -> [re, im]")
    sp = sub.add_parser("scan", parents=[common])
    sp.add_argument("directory")
    sp.add_argument("n", type=int)
    sp.add_argument("--kind", choices=SCAN_KINDS, default="untwisted")
    return p


def _settings(args) -> Settings:
    s = Settings.load(args.config)
    if args.budget is not None:
        s.bar_budget = args.budget
    if args.order_cap is not None:
        s.order_cap = args.order_cap
    return s


def _safe(name: str) -> str:
    return "".join(c if c.isalnum() else "_" for c in name)


def main(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        settings = _settings(args)
        cache_dir = _cache_dir(args.cache_dir)
        if args.n < 1:
            raise ParseError("degree n must be >= 1")
        if args.cmd == "scan":
            rows = scan(args.directory, args.n, args.kind, settings, args.jobs, cache_dir)
            if args.plot and args.kind == "untwisted":
                from .plotting import plot_scan
                path = plot_scan(rows, os.path.join(args.plot, f"scan_n{args.n}.png"), args.n)
                print(f"wrote {path}", file=sys.stderr)
            print(render("scan", "", rows, {}, args.format), file=stdout)
            return 0
        req = JobRequest(args.group, args.cmd, args.n, getattr(args, "mod", None),
                         getattr(args, "class_coords", None), getattr(args, "sectors", None),
                         args.verify, args.paranoid, settings)
        rec = run(req, cache_dir)
        if args.plot and args.cmd == "dw":
            from .plotting import plot_phase_histogram
            from .torsion import PhaseHistogram
            for rep in rec.payload["partitions"]:
                hist = PhaseHistogram(rec.payload["modulus"],
                                      {int(k): Fraction(v) for k, v in rep["histogram"].items()})
                tag = "_".join(map(str, rep["class"])) or "0"
                path = plot_phase_histogram(
                    hist, os.path.join(args.plot, f"dw_{_safe(args.group)}_n{args.n}_c{tag}.png"),
                    f"{args.group} T^{args.n} class {rep['class']}")
                print(f"wrote {path}", file=sys.stderr)
        print(render(args.cmd, args.group, rec.payload, rec.timings, args.format), file=stdout)
        return 0
    except DTorsionError as exc:
        msg = exc.args[0] if len(exc.args) == 1 else str(exc)
        print(json.dumps({"error": type(exc).__name__, "message": str(msg), "exit_code": exc.exit_code}),
              file=stdout)
        return exc.exit_code
    except ValueError as exc:
        print(json.dumps({"error": "InvalidInput", "message": str(exc), "exit_code": 3}), file=stdout)
        return 3


if __name__ == "__main__":
    sys.exit(main())
