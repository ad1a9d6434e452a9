import pytest

from voxbench.bench import generate_synthetic_corpus


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    """Three tiny speakers; enough for pipeline plumbing tests."""
    out = tmp_path_factory.mktemp("corpus_small")
    return generate_synthetic_corpus(
        n_speakers=3, samples_each=2, seconds=1.5, seed=123, out_dir=out
    )
