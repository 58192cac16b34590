import csv
import pathlib

import numpy as np
import pytest

from wedgewh import factorization as fz
from wedgewh import wedge as wg
from wedgewh.kernel import ProblemConfig

DATA = pathlib.Path(__file__).parent / "data"


def load_oracle(name):
    xs, vals = [], []
    with open(DATA / name) as fh:
        r = csv.reader(fh)
        next(r)
        for row in r:
            xs.append(float(row[0]))
            vals.append(float(row[1]) + 1j * float(row[2]))
    return np.array(xs), np.array(vals)


@pytest.fixture(scope="session")
def hankel0_oracle():
    return load_oracle("hankel0_oracle.csv")


@pytest.fixture(scope="session")
def hankel1_oracle():
    return load_oracle("hankel1_oracle.csv")


@pytest.fixture(scope="session")
def cfg_ks1():
    """The kernel-study configuration: ks = 1, ka = 0.01."""
    return ProblemConfig(k=1.0, s=1.0, a=0.01, alpha=np.pi / 2, theta_inc=0.0)


@pytest.fixture(scope="session")
def rk_ks1(cfg_ks1):
    return fz.aaa_fit(cfg_ks1)

@pytest.fixture(scope="session")
def lam_ks1(rk_ks1):
    return fz.lambda_from_rational(rk_ks1, 1000)


@pytest.fixture(scope="session")
def lam_ks1_integral(cfg_ks1):
    return fz.lambda_from_integral(cfg_ks1, 1000)


@pytest.fixture(scope="session")
def cfg_wedge():
    """First wedge test case: k = 5 pi, s = 0.1, a = 0.01, alpha = 5 pi/6."""
    return ProblemConfig(k=5 * np.pi, s=0.1, a=0.01, alpha=5 * np.pi / 6, theta_inc=0.0)


@pytest.fixture(scope="session")
def rk_wedge(cfg_wedge):
    return fz.aaa_fit(cfg_wedge)


@pytest.fixture(scope="session")
def lam_wedge(rk_wedge):
    return fz.lambda_from_rational(rk_wedge, 1000)


@pytest.fixture(scope="session")
def wedge_mats(cfg_wedge, lam_wedge):
    return wg.build_matrices(cfg_wedge, lam_wedge, 1000)


@pytest.fixture(scope="session")
def wedge_state(cfg_wedge, lam_wedge, wedge_mats):
    return wg.iterate(cfg_wedge, lam_wedge, 1000, wedge_mats, j_max=50, check_rho=False)
