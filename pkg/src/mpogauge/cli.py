"""Command-line front end: ``mpogauge {build-rep, gauge, verify}``.

Exit codes
    0  success
    1  a verification record failed
    2  invalid input (group, cocycle, representation, file, dimension)
    3  group law of a freshly built representation failed
    4  anomalous bundle given to ``gauge --mode gauge``
    5  size guard exceeded

stdout carries the report path and one summary line; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import anomaly, category, gauging, suite
from .fixtures import FixtureError, parse_group, parse_rep
from .fusion import FusionError, prepare_strict, solve_fusion, solve_unit_vector
from .groups import (CocycleError, FiniteGroup, GroupError, cocycle3_from_json, cyclic_cocycle3,
                     trivial_cocycle3)
from .mpo import MpoError, MpoGroupRep, SizeGuardError, build_anomalous_mpo, build_onsite_mpo, verify_group_law
from .reports import Report, default_tol
from .tensor import Tensor, TensorError

__all__ = ["main", "build_parser", "EXIT_OK", "EXIT_FAIL", "EXIT_INPUT", "EXIT_GROUP_LAW",
           "EXIT_ANOMALOUS", "EXIT_SIZE", "SIZE_CAP", "load_bundle", "save_bundle"]

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_GROUP_LAW, EXIT_ANOMALOUS, EXIT_SIZE = 0, 1, 2, 3, 4, 5
SIZE_CAP = 2**16


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------------------
# files

def _read_json(path) -> object:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(EXIT_INPUT, f"cannot read {path}: {exc}") from exc


def _write_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=1, sort_keys=True)


def save_bundle(path, rep) -> None:
    kind = "category" if isinstance(rep, category.CategoryMpoRep) else "group"
    _write_json(Path(path), {"bundle": kind, "rep": rep.to_json()})


def load_bundle(path):
    obj = _read_json(path)
    try:
        if obj.get("bundle") == "category":
            return category.CategoryMpoRep.from_json(obj["rep"])
        if obj.get("bundle") == "group":
            return MpoGroupRep.from_json(obj["rep"])
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(EXIT_INPUT, f"malformed bundle {path}: {exc}") from exc
    raise CliError(EXIT_INPUT, f"{path} is not a representation bundle")


def _read_vector(path, n: Optional[int] = None, what: str = "vector") -> np.ndarray:
    obj = _read_json(path)
    try:
        if isinstance(obj, dict):
            vec = Tensor.from_json(obj).data.reshape(-1)
        else:
            arr = np.asarray(obj, dtype=float)
            vec = arr[..., 0] + 1j * arr[..., 1] if arr.ndim == 2 and arr.shape[1] == 2 else arr
    except (KeyError, TypeError, ValueError, TensorError) as exc:
        raise CliError(EXIT_INPUT, f"malformed {what} in {path}: {exc}") from exc
    vec = np.asarray(vec, dtype=np.complex128).reshape(-1)
    if n is not None and vec.shape[0] != n:
        raise CliError(EXIT_INPUT, f"{what} has dimension {vec.shape[0]}, expected {n}")
    return vec


def _vector_json(vec: np.ndarray, label: str = "state") -> dict:
    return Tensor(vec, [label]).to_json()


# ---------------------------------------------------------------------------
# build-rep

def _group_from_arg(arg: str) -> FiniteGroup:
    if Path(arg).suffix == ".json" or Path(arg).is_file():
        try:
            return FiniteGroup.from_json(_read_json(arg))
        except (KeyError, TypeError, ValueError) as exc:
            raise CliError(EXIT_INPUT, f"invalid group file {arg}: {exc}") from exc
    try:
        return parse_group(arg)
    except FixtureError as exc:
        raise CliError(EXIT_INPUT, str(exc)) from exc


def _cocycle_from_arg(G: FiniteGroup, arg: str) -> np.ndarray:
    if arg == "trivial":
        return trivial_cocycle3(G)
    if arg == "nontrivial":
        cyc = _cyclic_order(G)
        if cyc is None:
            raise CliError(EXIT_INPUT, "--cocycle nontrivial is only built in for cyclic groups")
        return cyclic_cocycle3(cyc, 1)
    try:
        return cocycle3_from_json(_read_json(arg), G)
    except CocycleError as exc:
        raise CliError(EXIT_INPUT, str(exc)) from exc


def _cyclic_order(G: FiniteGroup) -> Optional[int]:
    n = G.order
    idx = np.arange(n)
    return n if np.array_equal(G.table, (idx[:, None] + idx[None, :]) % n) else None


def cmd_build_rep(args) -> int:
    out = Path(args.out)
    if args.kind == "fibonacci":
        rep = category.build_fibonacci_mpo()
        save_bundle(out, rep)
        alg = category.verify_category(category.solve_category_fusion(rep), L=2)
        bad = [r for r in alg.records if r.identity == "mpo-algebra" and not r.passed]
        if bad:
            _say(out, f"FAIL: fusion algebra residual {bad[0].residual:.2e}")
            return EXIT_GROUP_LAW
        _say(out, "built fibonacci category bundle (objects 2, chi 2+3, d 4)")
        return EXIT_OK
    G = _group_from_arg(args.group)
    if args.kind == "onsite":
        try:
            u = parse_rep(G, args.u)
            rep = build_onsite_mpo(G, u)
        except (FixtureError, MpoError) as exc:
            raise CliError(EXIT_INPUT, str(exc)) from exc
    else:
        try:
            rep = build_anomalous_mpo(G, _cocycle_from_arg(G, args.cocycle))
        except (CocycleError, MpoError) as exc:
            raise CliError(EXIT_INPUT, str(exc)) from exc
    if rep.d**2 > SIZE_CAP:
        raise CliError(EXIT_SIZE, f"physical dimension {rep.d} too large for the dense group-law check")
    law = verify_group_law(rep, 2)
    save_bundle(out, rep)
    if not law.passed:
        _say(out, f"FAIL: group law residual {law.max_residual:.2e}")
        return EXIT_GROUP_LAW
    _say(out, f"built {args.kind} bundle: |G| = {G.order}, d = {rep.d}, "
              f"chi = {list(rep.block_dims)}, group law residual {law.max_residual:.2e}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# gauge

def _size_guard(dim: int) -> None:
    if dim > SIZE_CAP:
        raise CliError(EXIT_SIZE, f"dense state dimension {dim} exceeds {SIZE_CAP}")


def cmd_gauge(args) -> int:
    rep = load_bundle(args.rep)
    if not isinstance(rep, MpoGroupRep):
        raise CliError(EXIT_INPUT, "gauge needs a group bundle")
    L = int(args.length)
    if L < 2:
        raise CliError(EXIT_INPUT, "--length must be at least 2")
    out_dir = Path(args.out)
    psi = _read_vector(args.state, rep.d**L, "matter state")
    report = Report(meta={"command": "gauge", "mode": args.mode, "L": L, "d": rep.d,
                          "block_dims": list(rep.block_dims), "seed": args.seed})
    try:
        fd = solve_fusion(rep)
    except FusionError as exc:
        raise CliError(EXIT_INPUT, f"fusion tensors not found: {exc}") from exc
    cls = anomaly.anomaly_class(fd)
    report.meta["anomaly_class"] = cls
    tol = default_tol()
    if args.mode == "gauge":
        if cls != "trivial":
            raise CliError(EXIT_ANOMALOUS,
                           "the bundle carries a nontrivial 3-cocycle; gauging needs a trivial "
                           "cocycle (use --mode symmetrize)")
        sub = None
        if args.subgroup:
            sub = _read_json(args.subgroup)
            if not isinstance(sub, list):
                raise CliError(EXIT_INPUT, "subgroup file must hold a list of elements")
        blocks = sub if sub is not None else list(rep.group.elements())
        chi = sum(rep.block_dims[g] for g in set(int(x) for x in blocks))
        _size_guard(rep.d**L * chi**L)
        fd = prepare_strict(rep)
        try:
            chain = gauging.make_chain(fd, L, subgroup=sub)
        except GroupError as exc:
            raise CliError(EXIT_INPUT, str(exc)) from exc
        vec = gauging.gauge_state(chain, psi)
        X = vec.reshape(chain.state_shape())
        worst = 0.0
        for i in range(L):
            for g in chain.blocks:
                worst = max(worst, float(np.max(np.abs(gauging.apply_local(chain, chain.local_op(g), i, X) - X))))
        report.add("gauged-invariance", "local operators leave the gauged state invariant", worst, tol)
        shape = chain.state_shape()
    else:
        if args.subgroup:
            raise CliError(EXIT_INPUT, "--subgroup applies to --mode gauge only")
        chi = rep.chi
        _size_guard(rep.d**L * chi**(2 * L))
        if cls == "trivial":
            fd = prepare_strict(rep)
        else:
            try:
                fd = replace(fd, v=solve_unit_vector(fd))
            except FusionError:
                pass
        chain = anomaly.make_split_chain(fd, L, cap=SIZE_CAP)
        phi = _read_vector(args.phi, chain.gauge_dim, "gauge state") if args.phi else None
        if phi is None and fd.v is None:
            raise CliError(EXIT_INPUT, "no unit vector available; pass --phi")
        vec = anomaly.symmetrize_state(chain, psi, phi)
        X = vec.reshape(chain.state_shape())
        worst = 0.0
        for i in range(L):
            for g in fd.group.elements():
                worst = max(worst, float(np.max(np.abs(
                    anomaly.apply_split_local(chain, chain.local_op(g), i, X) - X))))
        report.add("symmetrized-invariance", "correlated local operators leave the output invariant",
                   worst, tol)
        shape = chain.state_shape()
    nrm = float(np.linalg.norm(vec))
    report.meta["output_norm"] = nrm
    report.meta["state_shape"] = list(shape)
    if nrm < gauging.ANNIHILATION_TOL:
        report.meta["annihilated"] = True
        report.meta["note"] = "output has zero norm: the input carries no invariant component"
    _write_json(out_dir / "output.json", _vector_json(vec))
    rpath = out_dir / "report.json"
    report.write(rpath)
    tail = " (annihilated: zero-norm output)" if nrm < gauging.ANNIHILATION_TOL else ""
    print(rpath)
    print(report.summary_line() + f", output norm {nrm:.3e}{tail}")
    return EXIT_OK if report.passed else EXIT_FAIL


# ---------------------------------------------------------------------------
# verify

def cmd_verify(args) -> int:
    reps = [load_bundle(p) for p in args.rep]
    out = Path(args.out)
    total = Report(meta={"command": "verify", "level": args.level, "seed": args.seed,
                         "bundles": [str(p) for p in args.rep]})
    config = suite.SuiteConfig(level=args.level, seed=args.seed)
    for k, rep in enumerate(reps):
        prefix = f"[{k}]" if len(reps) > 1 else ""
        try:
            r = suite.run_suite(rep, config)
        except FusionError as exc:
            r = Report(meta={"error": str(exc)})
            r.add("fusion-solve", "fusion tensors reduce T_g T_h to T_gh", float("inf"),
                  note=f"no fusion tensors: {exc}")
        total.extend(r, prefix=prefix)
        for key, val in r.meta.items():
            total.meta[f"{prefix}{key}"] = val
    out.parent.mkdir(parents=True, exist_ok=True)
    total.write(out)
    print(out)
    line = total.summary_line()
    cls = [v for k, v in total.meta.items() if k.endswith("anomaly_class")]
    if cls:
        line += ", anomaly class " + "/".join(cls)
    failed = total.failures()
    if failed:
        line += f", first failure: {failed[0].identity} ({failed[0].anchor})"
    print(line)
    return EXIT_OK if total.passed else EXIT_FAIL


# ---------------------------------------------------------------------------

def _say(path, line: str) -> None:
    print(path)
    print(line)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mpogauge", description=__doc__.split("\n")[0])
    p.add_argument("--seed", type=int, default=0, help="seed for random probes")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build-rep", help="build an MPO representation bundle")
    b.add_argument("--group", default="Z2", help="Zn, Sm, AxB products, or a group JSON file")
    b.add_argument("--kind", choices=["onsite", "anomalous", "fibonacci"], default="onsite")
    b.add_argument("--u", default="regular", help="'regular' or 'diag:x1,x2,...'")
    b.add_argument("--cocycle", default="trivial", help="trivial, nontrivial, or a JSON file")
    b.add_argument("--out", default="bundle.json")
    b.set_defaults(func=cmd_build_rep)

    g = sub.add_parser("gauge", help="gauge or symmetrise a matter state")
    g.add_argument("--rep", required=True)
    g.add_argument("--state", required=True)
    g.add_argument("--length", required=True, type=int)
    g.add_argument("--subgroup")
    g.add_argument("--mode", choices=["gauge", "symmetrize"], default="gauge")
    g.add_argument("--phi")
    g.add_argument("--out", default="gauge-out")
    g.set_defaults(func=cmd_gauge)

    v = sub.add_parser("verify", help="run the identity suite on bundles")
    v.add_argument("--rep", required=True, nargs="+")
    v.add_argument("--level", choices=sorted(suite.LEVELS), default="quick")
    v.add_argument("--out", default="report.json")
    v.set_defaults(func=cmd_verify)
    for sp in (b, g, v):
        sp.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="seed for random probes")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return int(args.func(args))
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except SizeGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SIZE
    except (GroupError, CocycleError, MpoError, TensorError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
