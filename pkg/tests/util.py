"""Shared construction helpers for the test suite."""

import numpy as np

from faberelast import (
    ExteriorMap,
    FarFieldLoading,
    Material,
    build_faber,
    required_table_order,
    solve_full,
)
from faberelast.conformal import random_univalent_map

FIG_MATERIAL = Material.from_figure_params(0.5, 0.3)
FIG_LOADING = FarFieldLoading([0.0, 1.0], [0.0, 1.0])

FIG_MAPS = {
    "fig1": ExteriorMap((0.0, 0.1 + 0.1j)),
    "fig2": ExteriorMap((0.0, 0.1 + 0.1j, 0.1 + 0.1j)),
    "fig3": ExteriorMap((0.0, 0.1 + 0.1j, 0.1 + 0.1j, 0.1 + 0.1j)),
}


def solved_figure(name: str, n: int = 48):
    """(mapping, material, loading, table, solution) for a figure config."""
    mapping = FIG_MAPS[name]
    table = build_faber(mapping, required_table_order(mapping, n))
    sol = solve_full(mapping, FIG_LOADING, FIG_MATERIAL, n, table=table)
    return mapping, FIG_MATERIAL, FIG_LOADING, table, sol


def ellipse_faber_closed_form(m: int, z, a: complex):
    """Closed-form Faber polynomial of the ellipse map w + a/w."""
    z = np.asarray(z, dtype=complex)
    if m == 0:
        return np.ones_like(z)
    root = np.sqrt(z * z - 4.0 * a)
    return ((z + root) ** m + (z - root) ** m) / 2.0**m


def random_loading(rng: np.random.Generator, degree: int) -> FarFieldLoading:
    A = rng.normal(size=degree + 1) + 1j * rng.normal(size=degree + 1)
    B = rng.normal(size=degree + 1) + 1j * rng.normal(size=degree + 1)
    return FarFieldLoading(A, B)


__all__ = [
    "FIG_MATERIAL",
    "FIG_LOADING",
    "FIG_MAPS",
    "solved_figure",
    "ellipse_faber_closed_form",
    "random_loading",
    "random_univalent_map",
]
