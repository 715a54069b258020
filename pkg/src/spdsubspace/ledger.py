"""Deterministic flop accounting.

Every numeric kernel charges a documented analytic count of
multiply-accumulate operations to a ledger handle.  The count is a model,
not a hardware measurement, so it is identical across machines and across
the numba/numpy backends.  Counts per kernel:

    cholesky(n)                 n^3 // 3
    tri_solve (n x m rhs)       n^2 * m // 2
    sym_eig                     6n per Jacobi rotation actually performed
    sym_matfn reconstruction    n^3 + n^2  (plus the sym_eig charge)
    matmul (n,k)@(k,m)          n*k*m
    beta coefficient            P + Q + 1 per entry
    uni factor build            5
    apply update, off-diagonal  3n   (column j: 2n, column i: n)
    apply update, diagonal      n
    state advance, off-diagonal 6n per maintained matrix
    state advance, diagonal     2n per maintained matrix

Each kernel call charges at least 1, so the ledger strictly increases.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class FlopLedger:
    """Cumulative multiply-accumulate counter (monotone non-decreasing)."""

    count: int = 0
    _history: list = field(default_factory=list, repr=False)

    def add(self, flops: int) -> None:
        if flops < 0:
            raise ValueError("flop charge must be non-negative")
        self.count += int(flops)

    def delta_since(self, mark: int) -> int:
        return self.count - mark


def charge(ledger: FlopLedger | None, flops: int) -> None:
    """Charge `flops` to `ledger` if one is attached."""
    if ledger is not None:
        ledger.add(flops)
