import pytest

from photondistill import circuits, distillation, mesh, numerics
from photondistill.errors import DimensionError, MeshCapacityError


def hom_circuit():
    return distillation.protocol_cascaded_hom().circuit


def tree_circuit():
    return distillation.protocol_tree().circuit


def test_single_cell_unit_count_in_range():
    lattice = mesh.build_bricks_mesh(1, 1)
    counts = lattice.cell_unit_counts()
    assert set(counts) == {(1, 1)}
    assert 2 <= counts[(1, 1)] <= 4


def test_cell_counts_with_tunable_verticals():
    lattice = mesh.build_bricks_mesh(2, 3, mzis_per_cell=4)
    assert all(2 <= c <= 5 for c in lattice.cell_unit_counts().values())
    assert any(u.kind == "v" for u in lattice.tunable_units())


def test_interior_junctions_are_three_point():
    lattice = mesh.build_bricks_mesh(2, 2)
    deg = lattice.junction_degree()
    for j in lattice.interior_junctions():
        assert deg[j] == 3


def test_ports_on_all_four_sides():
    for rows, cols in ((1, 1), (2, 2), (3, 4)):
        lattice = mesh.build_bricks_mesh(rows, cols)
        sides = {p.side for p in lattice.ports}
        assert sides == {"T", "B", "L", "R"}


def test_build_rejects_bad_dimensions():
    with pytest.raises(DimensionError):
        mesh.build_bricks_mesh(0, 1)
    with pytest.raises(DimensionError):
        mesh.build_bricks_mesh(1, 1, mzis_per_cell=3)


def test_unit_ids_deterministic():
    a = mesh.build_bricks_mesh(2, 3)
    b = mesh.build_bricks_mesh(2, 3)
    assert [u.uid for u in a.units] == [u.uid for u in b.units]


def test_hom_depths():
    circ = hom_circuit()
    lattice = mesh.recommended_mesh(circ)
    ff = mesh.placement_metrics(mesh.place_circuit(circ, lattice, mesh.FEED_FORWARD))
    rc = mesh.placement_metrics(mesh.place_circuit(circ, lattice, mesh.RECIRCULATING))
    assert ff.optical_depth == 2
    assert rc.optical_depth == 1


def test_tree_depths():
    circ = tree_circuit()
    lattice = mesh.recommended_mesh(circ)
    ff = mesh.placement_metrics(mesh.place_circuit(circ, lattice, mesh.FEED_FORWARD))
    rc = mesh.placement_metrics(mesh.place_circuit(circ, lattice, mesh.RECIRCULATING))
    assert ff.optical_depth == 3
    assert rc.optical_depth <= 2


def test_empty_and_single_element_metrics():
    empty = circuits.Circuit(mode_count=3, layers=())
    metrics = mesh.placement_metrics(
        mesh.place_circuit(empty, mesh.build_bricks_mesh(2, 2), mesh.RECIRCULATING)
    )
    assert (metrics.active_mzis, metrics.optical_depth) == (0, 0)

    single = circuits.Circuit(mode_count=2, layers=((circuits.beam_splitter(0, 1),),))
    metrics = mesh.placement_metrics(
        mesh.place_circuit(single, mesh.build_bricks_mesh(1, 1), mesh.RECIRCULATING)
    )
    assert (metrics.active_mzis, metrics.optical_depth) == (1, 1)
    assert metrics.traversal_depth == 1


@pytest.mark.parametrize(
    "make_circuit",
    [
        hom_circuit,
        tree_circuit,
        lambda: circuits.cooley_tukey_qfft(2),
        lambda: circuits.clements_decompose(numerics.random_unitary(4, 9)),
        lambda: circuits.reck_decompose(numerics.random_unitary(3, 2)),
        lambda: circuits.clements_decompose(circuits.qft_matrix(5)),
    ],
)
def test_recirculating_dominates_feed_forward(make_circuit):
    circ = make_circuit()
    lattice = mesh.recommended_mesh(circ)
    ff = mesh.placement_metrics(mesh.place_circuit(circ, lattice, mesh.FEED_FORWARD))
    rc = mesh.placement_metrics(mesh.place_circuit(circ, lattice, mesh.RECIRCULATING))
    assert rc.optical_depth <= ff.optical_depth


@pytest.mark.parametrize("strategy", [mesh.FEED_FORWARD, mesh.RECIRCULATING])
def test_placement_realizes_circuit_dataflow(strategy):
    circ = tree_circuit()
    lattice = mesh.recommended_mesh(circ)
    placement = mesh.place_circuit(circ, lattice, strategy)
    assert mesh.induced_dataflow_edges(placement) == mesh.circuit_dataflow_edges(circ)
    assigned = placement.assignment_dict()
    assert len(set(assigned.values())) == len(assigned)  # injective
    pass_units = placement.pass_through_units()
    assert not pass_units & set(assigned.values())


def test_placement_deterministic():
    circ = tree_circuit()
    lattice = mesh.recommended_mesh(circ)
    a = mesh.place_circuit(circ, lattice, mesh.RECIRCULATING)
    b = mesh.place_circuit(circ, lattice, mesh.RECIRCULATING)
    assert a == b


def test_capacity_error_with_hint():
    circ = tree_circuit()
    with pytest.raises(MeshCapacityError) as err:
        mesh.place_circuit(circ, mesh.build_bricks_mesh(1, 1), mesh.FEED_FORWARD)
    assert err.value.required_cols >= 3


FIGURE_CASES = [
    ("fig3c-hom-stacked", hom_circuit, 2, 2, 1),
    ("fig4b-tree-two-columns", tree_circuit, 5, 3, 2),
    ("fig4c-tree-one-column", tree_circuit, 5, 3, 1),
    ("fig5c-qfft4-stacked", lambda: circuits.cooley_tukey_qfft(2), 3, 2, 1),
    ("fig6c-qfft8-compact", lambda: circuits.cooley_tukey_qfft(3), 7, 4, 3),
]


@pytest.mark.parametrize("name,make_circuit,rows,cols,depth", FIGURE_CASES)
def test_figure_placements(name, make_circuit, rows, cols, depth):
    circ = make_circuit()
    placement = mesh.figure_placement(name, circ, mesh.build_bricks_mesh(rows, cols))
    metrics = mesh.placement_metrics(placement)
    assert metrics.optical_depth == depth
    assert mesh.induced_dataflow_edges(placement) == mesh.circuit_dataflow_edges(circ)


def test_fig3c_vs_feed_forward_depth_ratio():
    circ = hom_circuit()
    fig3c = mesh.figure_placement("fig3c-hom-stacked", circ, mesh.build_bricks_mesh(2, 2))
    ff = mesh.place_circuit(circ, mesh.recommended_mesh(circ), mesh.FEED_FORWARD)
    assert mesh.placement_metrics(ff).optical_depth == 2 * mesh.placement_metrics(fig3c).optical_depth


def test_compare_architectures_qft4():
    rows = mesh.compare_architectures(circuits.qft_matrix(4))
    by_key = {(r.architecture, r.strategy): r for r in rows}
    assert by_key[("qfft", mesh.FEED_FORWARD)].pairs == 4
    assert by_key[("reck", mesh.FEED_FORWARD)].pairs == 6
    assert by_key[("clements", mesh.FEED_FORWARD)].pairs == 6
    for r in rows:
        if r.strategy == mesh.RECIRCULATING:
            assert r.mesh_depth <= by_key[(r.architecture, mesh.FEED_FORWARD)].mesh_depth


def test_compare_architectures_qft2_all_single_pair():
    rows = mesh.compare_architectures(circuits.qft_matrix(2))
    assert {r.architecture for r in rows} == {"reck", "clements", "qfft"}
    assert all(r.pairs == 1 for r in rows)


def test_compare_architectures_on_explicit_circuit():
    rows = mesh.compare_architectures(hom_circuit())
    assert {r.strategy for r in rows} == {mesh.FEED_FORWARD, mesh.RECIRCULATING}
    depths = {r.strategy: r.mesh_depth for r in rows}
    assert depths[mesh.FEED_FORWARD] == 2
    assert depths[mesh.RECIRCULATING] == 1


def test_mesh_serialization_roundtrip():
    lattice = mesh.build_bricks_mesh(2, 3, mzis_per_cell=4)
    parsed = mesh.parse_mesh(mesh.serialize_mesh(lattice))
    assert parsed == lattice


def test_placement_serialization_roundtrip():
    circ = hom_circuit()
    placement = mesh.place_circuit(circ, mesh.recommended_mesh(circ), mesh.RECIRCULATING)
    parsed = mesh.parse_placement(mesh.serialize_placement(placement))
    assert parsed == placement


def test_render_mesh_marks_states():
    circ = hom_circuit()
    lattice = mesh.recommended_mesh(circ)
    placement = mesh.place_circuit(circ, lattice, mesh.FEED_FORWARD)
    art = mesh.render_mesh(lattice, placement)
    assert "[XX]" in art
    assert "[..]" in art
