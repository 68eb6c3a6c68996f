import numpy as np
import pytest

from gyromag import sim
from gyromag.calmodel import ProcessedSamples


def _exact_samples(p, truth, step=1.0):
    t = np.arange(0.0, p.duration, step)
    m_t = np.einsum('nji,j->ni', sim.rotation_at(p, t), truth.m0)
    m = (m_t + truth.m_b) @ truth.soft_iron().T
    w = sim.angular_rate_at(p, t) + truth.w_b
    return ProcessedSamples(t, m, sim.field_rate(p, truth, t), w)


@pytest.fixture
def exact_samples():
    """Noise-free processed samples with the analytic field derivative."""
    return _exact_samples


@pytest.fixture
def truth():
    return sim.benchmark_truth(sigma_mag=0.0, sigma_gyro=0.0)


@pytest.fixture
def noisy_truth():
    return sim.benchmark_truth()


@pytest.fixture
def wam_profile():
    return sim.profile_for('WAM', seed=1)


@pytest.fixture
def exact_wam(exact_samples, wam_profile, truth):
    return exact_samples(wam_profile, truth)


@pytest.fixture
def short_run():
    return sim.simulate_run(0, seed=0, duration=120.0)


@pytest.fixture
def rng():
    return np.random.default_rng(2024)
