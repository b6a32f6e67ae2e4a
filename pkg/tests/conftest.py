import numpy as np
import pytest

from dbacv import StepSignal, separation_ok


def random_admissible_signal(rng: np.random.Generator, n: int, m: int,
                             k_max: int = 6, scale: float = 2.0) -> StepSignal:
    """Random step signal whose change fractions clear the 4(m+1)/n spacing."""
    gap = 4.0 * (m + 1) / n
    for _ in range(200):
        k = int(rng.integers(1, k_max + 1))
        taus = np.sort(rng.uniform(2.0 * gap, 1.0 - 2.0 * gap, size=k - 1))
        levels = rng.uniform(-scale, scale, size=k)
        # nudge equal neighbours apart
        for j in range(1, k):
            if levels[j] == levels[j - 1]:
                levels[j] += 0.5 * scale
        sig = StepSignal(taus, levels)
        if separation_ok(sig, n, m):
            return sig
    raise AssertionError("could not draw an admissible signal")


def random_invertible_ma(rng: np.random.Generator, m: int, min_radius: float = 1.3):
    """MA(m) coefficients with all polynomial roots outside radius min_radius."""
    from dbacv import MaModel

    radii = rng.uniform(min_radius, 3.0, size=m)
    angles = rng.uniform(0.0, np.pi, size=m)
    roots = []
    j = 0
    while j < m:
        if j + 1 < m and rng.random() < 0.5:
            z = radii[j] * np.exp(1j * angles[j])
            roots += [z, np.conj(z)]
            j += 2
        else:
            roots.append(radii[j] * np.sign(rng.random() - 0.3))
            j += 1
    poly = np.real(np.poly(np.array(roots)))  # leading coefficient 1, roots as given
    # normalize so the constant term is 1: theta_j are ascending-power coefficients
    coeffs = poly[::-1] / poly[-1]
    theta = coeffs[1:]
    sigma2 = float(rng.uniform(0.3, 3.0))
    return MaModel(theta, sigma2)


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
