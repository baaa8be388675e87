import pytest
from hypothesis import settings

from genset import kernels
from genset.kneser import all_clique_counts

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture(params=[m.NAME for m in kernels.backends()])
def backend(request, monkeypatch):
    """Run the test once per available kernel backend."""
    if request.param == "python":
        monkeypatch.setattr(kernels, "_ckernels", None)
    all_clique_counts.cache_clear()
    yield request.param
    all_clique_counts.cache_clear()
