import json

import pytest

from openergodic.engine.core.report import InequalityReport, worst
from openergodic.engine.core.verify_engine import Criterion, Outcome, VerifyEngine
from openergodic.utils.config import RunConfig
from openergodic.utils.errors import GoldenMissingError
from openergodic.utils.serialization import to_json
from openergodic.validation.acceptance import build_registry


def _draw(ctx):
    value = float(ctx.rng.random())
    return Outcome([InequalityReport('draw', value, 1.0)], params={'value': value})


def _fail(ctx):
    return Outcome([InequalityReport('ok', 0.0, 1.0), InequalityReport('bad', 2.0, 1.0)])


def _boom(ctx):
    raise ZeroDivisionError("no")


def _golden(ctx):
    return Outcome([InequalityReport('measured', 0.0, 1.0)], goldens=[('value', 1.25, 'equal')])


REGISTRY = [
    Criterion('a', 'draws', _draw),
    Criterion('b', 'fails', _fail),
    Criterion('c', 'raises', _boom),
    Criterion('d', 'full only', _draw, suites=('full',)),
]


def test_report_verdicts():
    assert InequalityReport('x', 1.0, 1.0).passed
    assert not InequalityReport('x', float('nan'), 1.0).passed
    summary = worst('all', [InequalityReport('a', 0.0, 2.0), InequalityReport('b', 3.0, 1.0)])
    assert summary.params == {'trials': 2, 'violations': 1, 'worst': 'b'}
    assert InequalityReport('x', float('inf'), float('inf')).to_dict()['lhs'] == 'inf'


def test_suite_selection_and_verdicts():
    engine = VerifyEngine(REGISTRY, RunConfig(), max_workers=2)
    results = engine.run('core')
    assert [r.criterion for r in results] == ['a', 'b', 'c']
    assert [r.passed for r in results] == [True, False, False]
    assert results[1].report.params['violations'] == 1
    assert 'ZeroDivisionError' in results[2].extra['error']
    assert all(r.seconds is None for r in results)
    assert engine.get_status()['failed'] == 2
    assert engine.run('empty') == []


def test_seeds_follow_registry_position():
    first = VerifyEngine(REGISTRY, RunConfig(seed=3)).run('full')
    second = VerifyEngine(REGISTRY, RunConfig(seed=3), max_workers=1).run('full')
    assert [r.to_dict() for r in first] == [r.to_dict() for r in second]
    core_draw = VerifyEngine(REGISTRY, RunConfig(seed=3)).run('core')[0]
    assert core_draw.extra['value'] == first[0].extra['value']
    other = VerifyEngine(REGISTRY, RunConfig(seed=4)).run('core')[0]
    assert other.extra['value'] != core_draw.extra['value']


def test_events_and_timings():
    events = []
    engine = VerifyEngine(REGISTRY[:1], RunConfig(), timings=True)
    engine.register_event_callback(lambda event, data: events.append(event))
    result, = engine.run('core')
    assert result.seconds is not None and result.seconds >= 0
    assert events == ['criterion_started', 'criterion_finished', 'suite_finished']
    with pytest.raises(ValueError):
        engine.run('nightly')


def test_goldens_write_then_check(tmp_path):
    registry = [Criterion('g', 'golden', _golden)]
    written = VerifyEngine(registry, RunConfig(output_dir=str(tmp_path), golden_mode='write')).run('core')
    assert written[0].passed
    checked = VerifyEngine(registry, RunConfig(output_dir=str(tmp_path), golden_mode='check')).run('core')
    assert checked[0].passed and checked[0].report.params['trials'] == 2


def test_missing_golden_aborts(tmp_path):
    registry = [Criterion('g', 'golden', _golden)]
    engine = VerifyEngine(registry, RunConfig(output_dir=str(tmp_path), golden_mode='check'))
    with pytest.raises(GoldenMissingError):
        engine.run('core')


def test_summary_rows_serialise():
    results = VerifyEngine(REGISTRY, RunConfig()).run('core')
    rows = json.loads(to_json([r.to_dict() for r in results]))
    assert set(rows[0]) == {'criterion', 'title', 'pass', 'lhs', 'rhs', 'margin', 'seconds', 'params'}
    assert rows[2]['lhs'] == 'nan'


def test_cheap_acceptance_criteria_pass_reproducibly():
    registry = [c for c in build_registry() if c.key in ('1', '8', '9', '12')]
    runs = [VerifyEngine(registry, RunConfig(seed=11)).run('core') for _ in range(2)]
    assert all(r.passed for r in runs[0])
    assert to_json([r.to_dict() for r in runs[0]]) == to_json([r.to_dict() for r in runs[1]])
