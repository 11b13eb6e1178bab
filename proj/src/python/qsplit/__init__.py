"""Hardware-mask splitting for Ising problems (C++ core)."""

from ._qsplit import (
    HardwareMask,
    IsingModel,
    apply_diagonal_shift,
    brute_force_solve,
    chimera_mask,
    complete_mask,
    delta_energy,
    empty_mask,
    energy,
    execute_run,
    k_opt,
    lnls_run,
    local_fields,
    mask_for_problem,
    maxcut_to_ising,
    pegasus_mask,
    qubo_to_ising,
    reg_ground_state,
    reg_instance,
    run_splitting,
    sa_solve,
)

__all__ = [name for name in dir() if not name.startswith("_")]
