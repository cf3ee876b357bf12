import pytest

from ccnprio import metrics
from ccnprio.metrics import DomainMismatch, EmptyLog, RunMetrics, aggregate
from ccnprio.sim import Simulation, load_scenario
from ccnprio.sim.log import EventLog, LogRecord


def synthetic_log(n_generated=3, satisfied=(0, 1)):
    log = EventLog()
    for p in (2, 1):
        log.append(0.0, "table_entry", name=f"/p{p}", priority=p)
    for k in range(n_generated):
        log.append(0.1 * k, "interest_generated", 1, f"/p1/o{k}", iid=k, prio=1)
    log.append(1.004, "interest_selected", 1, "/p1/o0", iid=0, prio=1, role="forward",
               action="forwarded", edge=repr(1.0))
    log.append(1.004, "interest_forwarded", 5, "/p1/o0", iid=0, prio=1)
    log.append(2.0, "interest_selected", 1, "/p2", iid=1, prio=2, role="forward",
               action="forwarded", edge=repr(1.9))
    log.append(2.0, "interest_forwarded", 5, "/p2", iid=1, prio=2)
    log.append(2.03, "retrieved", 5, "/p2", iid=1, prio=2)
    for k in satisfied:
        log.append(2.03, "satisfied", 1, f"/x{k}", iid=k)
    return log


def test_queuing_delay_definition():
    q = metrics.queuing_delay_by_priority(synthetic_log())
    assert q[1] == pytest.approx(0.004)
    assert q[2] == pytest.approx(0.1)


def test_retrieval_delay_definition():
    r = metrics.retrieval_delay_by_priority(synthetic_log())
    assert r == {2: pytest.approx(0.03)}


def test_exclude_joiners():
    log = synthetic_log()
    log.append(2.0, "interest_selected", 2, "/p2", iid=2, prio=2, role="tie", action="aggregated", edge=repr(1.5))
    assert metrics.queuing_delay_by_priority(log)[2] == pytest.approx((0.1 + 0.5) / 2)
    assert metrics.queuing_delay_by_priority(log, exclude_joiners=True)[2] == pytest.approx(0.1)


def test_satisfaction_examples():
    assert metrics.satisfaction_ratio(synthetic_log(100, range(97))) == pytest.approx(0.97)
    assert metrics.satisfaction_ratio(synthetic_log(3, (0, 1, 2))) == 1.0
    with pytest.raises(EmptyLog):
        metrics.satisfaction_ratio(EventLog())


def test_run_metrics_fills_domain():
    m = metrics.run_metrics(synthetic_log())
    assert m.priorities == (1, 2)
    assert m.retrieval_delay[1] is None
    assert m.counts == {"generated": 3, "satisfied": 2, "expired": 0, "dropped": 0, "pending": 1}


def _rm(ratio, q1=1.0, levels=(1, 2)):
    return RunMetrics(levels, {1: q1, 2: None}, {1: None, 2: 0.5}, ratio, {"generated": 100, "satisfied": ratio * 100})


def test_aggregate_means():
    agg = aggregate([_rm(0.96, 1.0), _rm(0.98, 3.0)])
    assert agg.satisfaction_ratio == pytest.approx(0.97)
    assert agg.queuing_delay == {1: pytest.approx(2.0), 2: None}
    assert agg.retrieval_delay[2] == pytest.approx(0.5)
    assert agg.counts["satisfied"] == pytest.approx(97)


def test_aggregate_single_and_permutation():
    one = _rm(0.9)
    assert aggregate([one]) == one
    runs = [_rm(0.9, 1.0), _rm(0.95, 2.0), _rm(0.99, 4.5)]
    a, b = aggregate(runs), aggregate(runs[::-1])
    assert a.satisfaction_ratio == pytest.approx(b.satisfaction_ratio)
    assert a.queuing_delay[1] == pytest.approx(b.queuing_delay[1])


def test_aggregate_domain_mismatch():
    with pytest.raises(DomainMismatch):
        aggregate([_rm(0.9), _rm(0.9, levels=(1, 2, 3))])
    with pytest.raises(ValueError):
        aggregate([])


def test_log_round_trip_exact():
    sim = Simulation(load_scenario("default"), 4)
    log = sim.run()
    back = EventLog.from_tsv(log.to_tsv())
    assert back.records == log.records
    assert back.meta == {"scenario": "prototype", "seed": "4"}
    online = metrics.online_metrics(sim)
    offline = metrics.run_metrics(back)
    assert offline == online


def test_log_record_parsing():
    rec = LogRecord(0.1 + 0.2, "satisfied", 3, "/a/b", "iid=4")
    assert LogRecord.from_line(rec.to_line()) == rec
    assert LogRecord.from_line(LogRecord(1.0, "x").to_line()) == LogRecord(1.0, "x")
    with pytest.raises(ValueError):
        LogRecord.from_line("1.0\tx")
    with pytest.raises(ValueError):
        EventLog.from_tsv("garbage\n")


def test_timeline_rows():
    rows = metrics.timeline_rows(synthetic_log())
    assert rows == [(0, 1, 1.004, None), (1, 2, 2.0, 2.03)]


def test_starvation_audit_flags_problems():
    log = EventLog()
    log.append(1.0, "scheduler_cycle", 2, mode="forced", joiners=0, forced_pending=0, counters="1:3,2:1")
    log.append(2.0, "scheduler_cycle", 1, mode="priority", joiners=0, forced_pending=0, counters="1:0,2:26")
    problems = metrics.starvation_audit(log, 25)
    assert len(problems) == 2
