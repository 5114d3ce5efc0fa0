import numpy as np

from openergodic.engine.flux.averaging import SignalAverage
from openergodic.engine.flux.base import Parallel
from openergodic.engine.flux.maximal import LrNorm, MaximalOperator
from openergodic.processing.signal_core import Signal, random_signal


def test_sequential_composition():
    pipeline = SignalAverage(2) >> SignalAverage(2) >> LrNorm(1)
    assert len(pipeline.steps) == 3
    # each average keeps the l^1 mass of a nonnegative signal
    assert pipeline(Signal.delta(0, 3.0)) == 3.0


def test_parallel_branches_keep_declaration_order(rng):
    s = random_signal(rng, 32)
    node = Parallel(n_jobs=2, wide=MaximalOperator(16) >> LrNorm(2), narrow=MaximalOperator(2) >> LrNorm(2))
    outputs = node(s)
    assert list(outputs) == ['wide', 'narrow']
    assert outputs == Parallel(wide=node.branches['wide'], narrow=node.branches['narrow'])(s)
    assert outputs['wide'] >= outputs['narrow']


def test_node_names():
    assert str(LrNorm(2.0)) == "LrNorm(name=L2.0Norm)"
    assert SignalAverage(3, name="smooth").name == "smooth"
    assert np.isinf(LrNorm(np.inf).r)
