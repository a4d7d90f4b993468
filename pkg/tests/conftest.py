import os
from fractions import Fraction

import pytest

from runtime.motivic.ainfty import koszul_dual
from runtime.motivic.formats import load_quiver
from runtime.motivic.twisted import TwistedObject


@pytest.fixture(autouse=True)
def clean_motivic_env(monkeypatch):
    """Keep a developer's MOTIVIC_* settings out of the suite."""
    for name in list(os.environ):
        if name.startswith("MOTIVIC_"):
            monkeypatch.delenv(name, raising=False)
    monkeypatch.setattr("runtime.motivic.config._dotenv_loaded", True)


@pytest.fixture
def conifold_cat():
    """D(Q, W) of the conifold quiver."""
    return koszul_dual(load_quiver("conifold"))


@pytest.fixture
def c23_pieces():
    """s₂³, s₁² and the Kronecker class α: s₁² -> s₂³ gluing them into C_{2,3}."""
    s2 = TwistedObject.generator("2")
    s1 = TwistedObject.generator("1")
    one = Fraction(1)
    alpha = [
        [{"y1*": one}, {}],
        [{"y2*": one}, {"y1*": one}],
        [{}, {"y2*": one}],
    ]
    return TwistedObject.direct_sum(s2, s2, s2), TwistedObject.direct_sum(s1, s1), alpha
