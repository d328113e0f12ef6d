import pytest

from shepso import InverterConfig, PsoParams


@pytest.fixture
def ref_cfg() -> InverterConfig:
    """Reference 7-level plant: 3 cells at 100 V, 300 V base."""
    return InverterConfig(cells=3, vdc=100.0)


@pytest.fixture
def fast_pso() -> PsoParams:
    """Reduced-effort solver settings for unit tests that only need a
    plausible solution, not a converged one."""
    return PsoParams(swarm_size=20, max_iterations=80, restarts=2,
                     zoom_rounds=2, stall_iterations=30, seed=7)
