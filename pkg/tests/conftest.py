import pytest

from levy_smile.models import CGMY, NIG, BlackScholes, Kou, Merton, VarianceGamma

# reference parameter sets shared by the whole suite
REFERENCE = {
    "black_scholes": BlackScholes(sigma=0.2),
    "merton": Merton(sigma=0.2, lam=0.5, mu_j=0.0, delta_j=0.3),
    "kou": Kou(sigma=0.1, lam=1.0, p=0.5, eta1=10.0, eta2=5.0),
    "variance_gamma": VarianceGamma(theta_vg=-0.14, sigma_vg=0.12, kappa=0.2),
    "nig": NIG(alpha=15.0, beta=-5.0, delta=0.5),
    "cgmy": CGMY(C=1.0, G=5.0, M=5.0, Y=0.5),
}
JUMP_MODELS = {k: v for k, v in REFERENCE.items() if k != "black_scholes"}
MC_MODELS = {k: v for k, v in REFERENCE.items() if k != "cgmy"}
DEGENERATE_KOU = Kou(sigma=0.0, lam=1.0, p=1.0, eta1=10.0, eta2=5.0)


@pytest.fixture(params=sorted(REFERENCE))
def any_model(request):
    return REFERENCE[request.param]


@pytest.fixture(params=sorted(JUMP_MODELS))
def jump_model(request):
    return JUMP_MODELS[request.param]


def pytest_terminal_summary(terminalreporter):
    acceptance = __import__("sys").modules.get("test_acceptance")
    if acceptance is None or not acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(acceptance.RESULTS):
        terminalreporter.write_line(acceptance.RESULTS[number])
