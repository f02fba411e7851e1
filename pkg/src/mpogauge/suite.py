"""Bundled verification suites for group and category MPO bundles.

Each suite returns a :class:`~mpogauge.reports.Report`.  Projector and
gauging-map identities are evaluated on random probe vectors (seeded), so
they scale to rings whose dense operators exceed the size guard; checks
that cannot run at a given length are listed under ``meta["skipped"]``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from . import anomaly, category, gauging, mpo, oracles
from .fusion import FusionData, FusionError, prepare_strict, solve_fusion, solve_unit_vector, verify_fusion
from .gauging import STATE_CAP
from .mpo import DENSE_MATRIX_CAP, MpoGroupRep
from .reports import Report, default_tol

__all__ = [
    "LEVELS",
    "level_lengths",
    "gauging_report",
    "verify_group_bundle",
    "verify_category_bundle",
    "SuiteConfig",
    "run_suite",
]

LEVELS = {"quick": (2,), "full": (2, 3)}
N_PROBES = 3


def level_lengths(level: str) -> tuple:
    try:
        return LEVELS[level]
    except KeyError:
        raise ValueError(f"unknown level {level!r}; expected one of {sorted(LEVELS)}") from None


def _probe(rng: np.random.Generator, n: int, k: int = N_PROBES) -> np.ndarray:
    return rng.normal(size=(n, k)) + 1j * rng.normal(size=(n, k))


def _max_abs(x) -> float:
    return float(np.max(np.abs(x))) if np.size(x) else 0.0


def gauging_report(fd: FusionData, L: int, tol: Optional[float] = None, seed: int = 0,
                   subgroup: Optional[Sequence[int]] = None) -> Report:
    """Local-operator algebra and gauging-map identities on a ring of ``L`` sites."""
    tol = default_tol() if tol is None else tol
    chain = gauging.make_chain(fd, L, subgroup=subgroup)
    G = fd.group
    blocks = chain.blocks
    rng = np.random.default_rng(seed)
    out = Report(meta={"check": "gauging", "L": L, "dim": chain.dim,
                       "subgroup": list(blocks) if subgroup is not None else None})
    n_loc = chain.edge_dim**2 * chain.d
    mats = {g: chain.local_op(g).reshape(n_loc, n_loc) for g in blocks}
    law = max(_max_abs(mats[g] @ mats[h] - mats[G.mul(g, h)]) for g in blocks for h in blocks)
    out.add("local-group-law", "local operators multiply as the group", law, tol)
    if subgroup is None and fd.rep.is_onsite():
        U = [fd.rep.tensors[g][0, 0] for g in G.elements()]
        e = np.eye(len(blocks))
        worst = 0.0
        for g in G.elements():
            Rg = np.zeros_like(e)
            Lg = np.zeros_like(e)
            for k in G.elements():
                Rg[G.mul(k, G.inv(g)), k] = 1.0
                Lg[G.mul(g, k), k] = 1.0
            ref = np.kron(np.kron(Rg, U[g]), Lg)
            worst = max(worst, _max_abs(mats[g] - ref))
        out.add("onsite-reduction", "local operator equals R_g (x) u_g (x) L_g entrywise", worst, tol)
    comm = gauging.check_neighbor_commutation(chain, tol=tol)
    out.add("neighbor-commutation", "local operators on neighbouring sites commute",
            max(r.residual for r in comm.records), tol)
    # projector identities on random full-space probes
    X = _probe(rng, chain.dim).reshape(chain.state_shape() + (N_PROBES,))
    PX = gauging.apply_projector(chain, X)
    out.add("projector-idempotent", "P^2 = P on random probes",
            _max_abs(gauging.apply_projector(chain, PX) - PX), tol)
    out.add("projector-order", "local projectors commute (reversed order)",
            _max_abs(gauging.apply_projector(chain, X, order=list(reversed(range(L)))) - PX), tol)
    # gauging map
    psi = _probe(rng, chain.matter_dim)
    gpsi = gauging.gauge_state(chain, psi)
    Y = gpsi.reshape(chain.state_shape() + (N_PROBES,))
    inv = 0.0
    for i in range(L):
        for g in blocks:
            inv = max(inv, _max_abs(gauging.apply_local(chain, chain.local_op(g), i, Y) - Y))
    out.add("gauged-invariance", "local operators leave the gauged state invariant", inv, tol)
    glob = [g for g in blocks] if subgroup is not None else list(G.elements())
    dense_ok = chain.matter_dim <= DENSE_MATRIX_CAP
    if dense_ok:
        worst = 0.0
        for g in glob:
            Ug = mpo.dense_mpo(fd.rep, g, L)
            worst = max(worst, _max_abs(gauging.gauge_state(chain, Ug @ psi) - gpsi))
        out.add("gauging-absorbs-symmetry", "G U_g = G on random matter probes", worst, tol)
        Pm = sum(mpo.dense_mpo(fd.rep, g, L) for g in glob) / len(glob)
        charged = psi - Pm @ psi
        nrm = float(np.max(np.linalg.norm(gauging.gauge_state(chain, charged), axis=0)))
        out.add("charged-annihilated", "gauging annihilates states orthogonal to the invariant sector",
                nrm, tol, note=f"input norm {np.linalg.norm(charged):.3e}")
    if L == 2 and subgroup is None and chain.dim * chain.matter_dim <= 4 * STATE_CAP:
        M = gauging.gauging_matrix(chain)
        if fd.rep.is_onsite():
            u = np.stack([fd.rep.tensors[g][0, 0] for g in G.elements()])
            ref = oracles.direct_onsite_gauging(G, u, L)
            note = "fusion-free sum over group labels"
        else:
            ref = gauging.gauging_matrix_direct(chain)
            note = "sum over group labels through Winv bond tensors"
        out.add("oracle-gauging", "projector path equals the direct sum over {g_i}",
                _max_abs(M - ref), min(tol, 1e-10), note=note)
    return out


def verify_group_bundle(rep: MpoGroupRep, level: str = "quick", tol: Optional[float] = None,
                        seed: int = 0) -> Report:
    """Every identity that applies to a group MPO bundle."""
    tol = default_tol() if tol is None else tol
    Ls = level_lengths(level)
    out = Report(meta={"bundle": "group", "kind": rep.kind, "order": rep.group.order,
                       "d": rep.d, "block_dims": list(rep.block_dims), "level": level,
                       "lengths": list(Ls), "seed": seed})
    for L in Ls:
        if rep.d**L > DENSE_MATRIX_CAP:
            out.meta.setdefault("skipped", []).append(f"group law at L={L} (size guard)")
            continue
        law = mpo.verify_group_law(rep, L, tol)
        out.add(f"group-law[L={L}]", "MPO group law U_g U_h = U_gh (dense)",
                max(r.residual for r in law.records), tol)
    fd = solve_fusion(rep)
    fz = verify_fusion(fd, tol)
    out.extend(fz, prefix="fusion:")
    cls = anomaly.anomaly_class(fd)
    out.meta["anomaly_class"] = cls
    if cls == "trivial":
        sfd = prepare_strict(rep)
        out.extend(verify_fusion(sfd, tol), prefix="strict:")
        for L in Ls:
            try:
                out.extend(gauging_report(sfd, L, tol, seed), prefix=f"gauging[L={L}]:")
            except mpo.SizeGuardError:
                out.meta.setdefault("skipped", []).append(f"gauging at L={L} (size guard)")
        split_fd = sfd
    else:
        split_fd = fd
        try:
            split_fd = replace(fd, v=solve_unit_vector(fd))
        except FusionError:  # no unit vector: skip the unit-state paths
            out.meta.setdefault("skipped", []).append("unit-state symmetrisation (no unit vector)")
    for L in Ls:
        try:
            out.extend(anomaly.verify_anomalous(split_fd, L, tol, seed), prefix=f"split[L={L}]:")
        except mpo.SizeGuardError:
            out.meta.setdefault("skipped", []).append(f"split chain at L={L} (size guard)")
    if rep.is_onsite():
        out.extend(anomaly.renormalize_onsite(prepare_strict(rep), tol), prefix="renormalise:")
    return out


def verify_category_bundle(rep: category.CategoryMpoRep, level: str = "quick",
                           tol: Optional[float] = None, seed: int = 0) -> Report:
    tol = default_tol() if tol is None else tol
    Ls = level_lengths(level)
    out = Report(meta={"bundle": "category", "kind": rep.kind, "objects": rep.category.m,
                       "d": [float(x) for x in rep.category.d], "D2": rep.category.D2,
                       "level": level, "lengths": list(Ls), "seed": seed})
    if not rep.fusion:
        rep = category.solve_category_fusion(rep)
    for L in Ls:
        out.extend(category.verify_category(rep, L, tol, seed), prefix=f"category[L={L}]:")
    return out


@dataclass(frozen=True)
class SuiteConfig:
    """Settings shared by the CLI, the scripts and library callers."""

    level: str = "quick"
    tol: Optional[float] = None
    seed: int = 0

    def __post_init__(self):
        level_lengths(self.level)
        if self.tol is not None and not self.tol > 0:
            raise ValueError("tol must be positive")

    @property
    def tolerance(self) -> float:
        return default_tol() if self.tol is None else self.tol


def run_suite(rep, config: Optional[SuiteConfig] = None) -> Report:
    """Dispatch a group or category bundle to its suite."""
    config = SuiteConfig() if config is None else config
    if isinstance(rep, category.CategoryMpoRep):
        return verify_category_bundle(rep, config.level, config.tolerance, config.seed)
    return verify_group_bundle(rep, config.level, config.tolerance, config.seed)
