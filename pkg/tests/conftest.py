import hypothesis
import pytest

from arpsweep import DensityState, PulseProfile, make_sweep_params

# jitted kernels compile on first call; a wall-clock deadline would flag
# that compile as a flaky test
hypothesis.settings.register_profile("arpsweep", deadline=None,
                                     max_examples=60)
hypothesis.settings.load_profile("arpsweep")


@pytest.fixture
def unitary_rect_params():
    """Slow rectangular sweep with no dissipation at all."""
    return make_sweep_params(10.0, PulseProfile.rectangular(1.0),
                             duration=200.0)


@pytest.fixture
def did_rect_params():
    """Same sweep with the drive-induced channel switched on."""
    return make_sweep_params(10.0, PulseProfile.rectangular(1.0),
                             duration=200.0, tau_c=1e-2)


@pytest.fixture
def ground():
    return DensityState.ground()
