#!/usr/bin/env python3
"""Print empirical error-order slopes for every compiled formula kind."""

import numpy as np

from grover_ite_lab.pf_compiler import (
    FiveCopies,
    GroupCommutator,
    JeanKoseleff,
    ThirdOrder,
    TwoCopies,
    fit_order,
    formula_order,
    measure_formula_error,
)
from grover_ite_lab.search_core import SearchInstance


def main():
    inst = SearchInstance(4, (3,))
    grid = np.logspace(-3, -1, 8)
    kinds = [
        ("group-commutator", GroupCommutator()),
        ("third-order", ThirdOrder()),
        ("two-copies(gc)", TwoCopies(GroupCommutator())),
        ("jean-koseleff(gc)", JeanKoseleff(GroupCommutator())),
        ("five-copies(gc)", FiveCopies(GroupCommutator())),
        ("jean-koseleff(third)", JeanKoseleff(ThirdOrder())),
    ]
    print(f"{'kind':24s} {'claimed m/2':>12s} {'measured slope':>15s}")
    for name, kind in kinds:
        slope = fit_order(measure_formula_error(inst, kind, grid))
        print(f"{name:24s} {formula_order(kind) / 2:12.2f} {slope:15.3f}")


if __name__ == "__main__":
    main()
