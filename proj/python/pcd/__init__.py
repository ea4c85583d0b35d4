"""Path and cycle decompositions of graphs."""

from ._pcd import (
    Graph,
    OperationalError,
    audit_counterexamples,
    blowup_cycle,
    clique_star,
    clique_triangles,
    complete_graph,
    cycle_graph,
    decompose,
    gnp,
    min_cycle_count,
    min_path_count,
    min_path_cycle_count,
    path_graph,
    read_instance,
    two_cliques,
    verify,
    weak_quasirandom,
    write_instance,
)

__all__ = [name for name in dir() if not name.startswith("_")]
