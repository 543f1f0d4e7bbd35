import pytest

from kaleidopsi.domain import DomainCatalog, Relation
from kaleidopsi.groups import GroupParams
from kaleidopsi.rng import SequenceRandomSource

# The running example: four single-attribute relations over the domain [0, 5).
EXAMPLE_RELATION_ITEMS = [
    (0, 1, 3),
    (1, 3, 4),
    (3, 4, 4),
    (1, 2, 3, 4),
]
# First-share rows that reproduce the worked share table exactly.
FORCED_FIRST_SHARES = {
    0: (3, 4, 1, 2, 0),
    1: (1, 2, 4, 3, 4),
    2: (0, 4, 2, 3, 1),
    3: (2, 3, 4, 1, 0),
}
EXAMPLE_M_SPLIT = (1, 3)


@pytest.fixture
def params_small():
    return GroupParams(p=5, q=11)


@pytest.fixture
def params_eval():
    return GroupParams(p=113, q=227)


@pytest.fixture
def example_catalog():
    return DomainCatalog.from_values(range(5))


@pytest.fixture
def example_relations():
    return [Relation.from_items(i, items) for i, items in enumerate(EXAMPLE_RELATION_ITEMS)]


@pytest.fixture
def forced_client_rngs():
    return [SequenceRandomSource(FORCED_FIRST_SHARES[i]) for i in range(4)]


# One pass/fail line per acceptance criterion, echoed after the run summary
# (fd-level capture would otherwise swallow prints from passing tests).
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
