"""Strong-field quantum-optical observables from transition-dipole tables.

The heavy lifting lives in the C++ extension `_core`: semiclassical
propagation of emitter eigenstates (1D soft-core atom, extended Fermi-Hubbard
chain, analytic two-level model), transition-dipole tables, and the
closed-form photonic observables (spectrum, quadrature squeezing, g2) with
their exact N-emitter scalings, plus the small exact few-mode oracle.
"""

from ._core import (
    AtomEmitter,
    AtomOptions,
    EnsembleParams,
    G2Point,
    HubbardEmitter,
    HubbardOptions,
    HubbardParams,
    PulseConfig,
    ScalingPoint,
    SpatialGrid,
    SqueezingPoint,
    TimeGrid,
    TransitionDipoleTable,
    TwoLevelEmitter,
    compute_table,
    counting_expectation,
    coupling_scan,
    default_coupling,
    evaluate_moment,
    expand_moment,
    field_free_eigenstates,
    fitted_slope,
    g2,
    load_table,
    make_time_grid,
    mandel_q,
    quadrature_min_variance,
    save_table,
    spectrum,
    squeezing_db,
    suggest_stride,
    vector_potential,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
