"""Hand-built instances shared across test modules."""

from knapsub import ModularObjective, SubmodularOracle, normalize

# Three items: two complementary halves and one slightly denser spoiler that
# blocks them.  The optimum {1, 2} is worth 1.0; density order grabs item 3.
TIGHT_VALUES = {1: 0.5, 2: 0.5, 3: 0.6}
TIGHT_RAW_COSTS = [(1, 0.5), (2, 0.5), (3, 0.55)]
TIGHT_CAPACITY = 1.0


def tight_instance():
    instance = normalize(TIGHT_RAW_COSTS, TIGHT_CAPACITY)
    objective = ModularObjective(TIGHT_VALUES)
    return instance, objective


def tight_oracle():
    instance, objective = tight_instance()
    return instance, SubmodularOracle(instance, objective.value)
