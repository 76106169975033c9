from .csv_store import (
    metadata_path,
    read_allocation,
    read_pvalues,
    write_allocation,
    write_allocation_table,
    write_convergence,
    write_json,
    write_metadata,
    write_profile,
    write_pvalues,
    write_rows,
    write_thompson_state,
)

__all__ = [
    "metadata_path",
    "read_allocation",
    "read_pvalues",
    "write_allocation",
    "write_allocation_table",
    "write_convergence",
    "write_json",
    "write_metadata",
    "write_profile",
    "write_pvalues",
    "write_rows",
    "write_thompson_state",
]
