import pytest

from structiou.treebank import (
    BoundaryRow,
    BoundaryTable,
    parse_bracketed,
    project_to_time,
)


@pytest.fixture
def gold_timed():
    """Two-word noun phrase over forced-alignment style times."""
    tree = parse_bracketed("(NP (PRP Your) (NN turn))")
    table = BoundaryTable(
        (BoundaryRow("Your", 2.56, 2.72), BoundaryRow("turn", 2.72, 3.01))
    )
    return project_to_time(tree, table)


@pytest.fixture
def pred_structure_error():
    """Same span parsed under a spurious extra verb phrase layer."""
    tree = parse_bracketed("(VP (VBP uh) (NP (PRP Your) (NN turn)))")
    table = BoundaryTable(
        (
            BoundaryRow("uh", 2.55, 2.56),
            BoundaryRow("Your", 2.56, 2.72),
            BoundaryRow("turn", 2.72, 3.01),
        )
    )
    return project_to_time(tree, table)


@pytest.fixture
def pred_boundary_error():
    """Correct structure over slightly wrong word times."""
    tree = parse_bracketed("(NP (PRP Your) (NN turn))")
    table = BoundaryTable(
        (BoundaryRow("Your", 2.51, 2.70), BoundaryRow("turn", 2.70, 3.10))
    )
    return project_to_time(tree, table)


@pytest.fixture
def attachment_pair():
    """The two parses of the doubly ambiguous noun-preposition template."""
    right = parse_bracketed(
        "(NP (NP (N N)) (PP (P P) (NP (NP (N N)) (PP (P P) (NP (N N))))))"
    )
    left = parse_bracketed(
        "(NP (NP (NP (N N)) (PP (P P) (NP (N N)))) (PP (P P) (NP (N N))))"
    )
    return right, left
