import pytest

import taskgsp as t


@pytest.fixture(scope="session")
def k3():
    return t.Graph(n=3, edges=((0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)))


@pytest.fixture(scope="session")
def p3():
    return t.Graph(n=3, edges=((0, 1, 1.0), (1, 2, 1.0)))


@pytest.fixture(scope="session")
def ba30():
    g = t.generate_ba(30, 3, seed=7)
    lap = t.laplacian(g)
    return g, lap, t.eigendecompose(lap)


@pytest.fixture(scope="session")
def small_problem():
    """A 40-node instance with bandlimited prior and an SGC classifier."""
    g = t.generate_ba(40, 3, seed=3)
    lap = t.laplacian(g)
    basis = t.eigendecompose(lap)
    k = 4
    sigma = t.bandlimiting_projector(basis, k)
    model = t.build_sgc(t.normalized_adjacency(g, 1.0), r=1, widths=(8, 4, 1), seed=11)
    return {
        "graph": g,
        "lap": lap,
        "basis": basis,
        "k": k,
        "sigma": sigma,
        "model": model,
        "c_eff": t.effective_covariance(sigma, model.w),
    }


def pytest_addoption(parser):
    parser.addoption(
        "--run-full-scale",
        action="store_true",
        default=False,
        help="run the slow full-scale (N=500) sweep",
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-full-scale"):
        return
    skip = pytest.mark.skip(reason="needs --run-full-scale")
    for item in items:
        if "full_scale" in item.keywords:
            item.add_marker(skip)
