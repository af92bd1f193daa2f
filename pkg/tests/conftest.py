import pytest

from nff import ArrayConfig, ArrayKind, build_full_circle, build_half_circle

LAM = 0.2  # meters, the flagship wavelength


def full_config(n=120, rc=1.5, lam=LAM, e0=1.0):
    return ArrayConfig(ArrayKind.FULL_CIRCLE, n, rc, lam, e0)


def half_config(n=120, rc=1.5, lam=LAM, e0=1.0):
    return ArrayConfig(ArrayKind.HALF_CIRCLE, n, rc, lam, e0)


@pytest.fixture(scope="session")
def full120():
    """Full circle, N=120, r_c=1.5 m (7.5 lambda)."""
    return build_full_circle(full_config())


@pytest.fixture(scope="session")
def half120():
    """Half circle, N=120, r_c=1.5 m (7.5 lambda)."""
    return build_half_circle(half_config())
