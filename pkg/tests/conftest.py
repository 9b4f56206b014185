import numpy as np
import pytest

from schrodg import ExpSolution, SpaceTimeDomain, build_cartesian_mesh, solution_data


@pytest.fixture
def unit_domain():
    return SpaceTimeDomain(0.0, 1.0, 1.0)


@pytest.fixture
def mesh4(unit_domain):
    return build_cartesian_mesh(unit_domain, 4, 4)


@pytest.fixture
def smooth_problem():
    """kappa = 5 exponential solution with its manufactured boundary data."""
    sol = ExpSolution(5.0)
    return sol, solution_data(sol)


def constant_field():
    from schrodg.norms import ClosedFormField

    return ClosedFormField(
        lambda x, t: np.ones(np.broadcast(np.asarray(x), np.asarray(t)).shape, dtype=complex),
        lambda x, t: np.zeros(np.broadcast(np.asarray(x), np.asarray(t)).shape, dtype=complex),
    )
