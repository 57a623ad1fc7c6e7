import numpy as np
import pytest

from evoops.core import Direction, Problem, RandomStream


@pytest.fixture
def sphere5() -> Problem:
    return Problem(
        id=0,
        name="sphere5",
        dimensionality=5,
        lower_bound=-2.0,
        upper_bound=2.0,
        direction=Direction.MINIMIZE,
        objective=lambda x: float(x @ x),
    )


def clone_streams(*parts) -> tuple[RandomStream, RandomStream]:
    """Two identically seeded streams: one to consume, one to predict with."""
    return RandomStream(*parts), RandomStream(*parts)


def in_box(rng: RandomStream, problem: Problem) -> np.ndarray:
    span = problem.upper_bound - problem.lower_bound
    return problem.lower_bound + span * rng.uniforms(problem.dimensionality)
