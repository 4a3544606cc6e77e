"""Shared fixtures: the trained tiny model (built once per session) and
the frozen text set the trend tests score.
"""

import shutil
import subprocess

import numpy as np
import pytest

from hsdump.extract import load_model_and_tokenizer
from hsdump.tinymodel import build_tiny_model, template_text


@pytest.fixture(scope="session")
def tiny_model_dir(tmp_path_factory):
    """Directory of the trained tiny model; building takes ~30s once."""
    directory = tmp_path_factory.mktemp("tiny_model")
    return build_tiny_model(directory)


@pytest.fixture(scope="session")
def tiny_model(tiny_model_dir):
    """(model, tokenizer) pair loaded from the session model directory."""
    return load_model_and_tokenizer(str(tiny_model_dir))


@pytest.fixture(scope="session")
def grammar_texts():
    """20 frozen template-grammar texts of 160 words each."""
    rng = np.random.default_rng(777)
    return [template_text(rng, 160) for _ in range(20)]


@pytest.fixture(scope="session")
def scorer_cli():
    """Runner for the installed mnnkit CLI; the scorer is only reached
    through this subprocess boundary and the files it reads and writes.
    """
    binary = shutil.which("mnnkit")
    assert binary is not None, "mnnkit console script not installed"

    def run(*args):
        return subprocess.run([binary, *args], capture_output=True, text=True)

    return run
