"""Fibonacci MPOs: the fusion algebra, the Lambda projector and an invariant state."""

from __future__ import annotations

import numpy as np

from mpogauge.category import (build_fibonacci_mpo, dense_category_mpo, invariant_state_via_lambda,
                               solve_category_fusion, verify_category)


def main() -> None:
    rep = solve_category_fusion(build_fibonacci_mpo())
    cat = rep.category
    print("quantum dimensions:", cat.d, " D^2 =", round(cat.D2, 12))
    for L in (2, 3, 4):
        O1, Ot = (dense_category_mpo(rep, a, L) for a in range(2))
        print(f"L={L}: |O_tau^2 - O_1 - O_tau| = {np.abs(Ot @ Ot - O1 - Ot).max():.1e}")
    rng = np.random.default_rng(1)
    A = np.einsum("lrpq,q->lrp", rep.tensors[1], rng.normal(size=4))
    out = invariant_state_via_lambda(A, rep, 3)
    Ot = dense_category_mpo(rep, 1, 3)
    ratio = np.vdot(out, Ot @ out) / np.vdot(out, out)
    print(f"<O_tau> on O_Lambda|psi> = {ratio.real:.12f} (d_tau = {cat.d[1]:.12f})")
    print(verify_category(rep, L=3).summary_line())


if __name__ == "__main__":
    main()
