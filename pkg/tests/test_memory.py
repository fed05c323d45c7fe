import time

import pytest

from tierkite.ingest.memory import MemorySample, MemorySampler, memory_report

MB = 1024 * 1024


def sample(t, rss, phase="interval"):
    return MemorySample(t_ms=t, rss_bytes=rss, phase=phase)


def test_report_from_observed_run():
    # min 370.3 MB / max 385.9 MB -> delta 15.6 MB, bounded
    samples = [sample(0, int(370.3 * MB), "ingest_start"), sample(100, int(385.9 * MB), "ingest_end")]
    report = memory_report(samples)
    assert report["delta"] == int(385.9 * MB) - int(370.3 * MB)
    assert abs(report["delta"] / MB - 15.6) < 0.1
    assert report["verdict"] == "bounded"


def test_flat_run_is_bounded():
    report = memory_report([sample(0, 1000 * MB), sample(50, 1000 * MB)])
    assert report["delta"] == 0
    assert report["verdict"] == "bounded"


def test_synthetic_leak_is_unbounded():
    report = memory_report([sample(0, 100 * MB), sample(10, 700 * MB)])
    assert report["delta"] == 600 * MB
    assert report["verdict"] == "unbounded"


def test_report_requires_two_samples():
    with pytest.raises(ValueError):
        memory_report([sample(0, 1)])


def test_custom_bound_respected():
    report = memory_report([sample(0, 0), sample(1, 10 * MB)], bound_bytes=5 * MB)
    assert report["verdict"] == "unbounded"


def test_sampler_timestamps_monotonic_and_phases_marked():
    sampler = MemorySampler(interval_s=0.01).start()
    sampler.mark("ingest_start")
    time.sleep(0.08)
    sampler.mark("post_flush")
    time.sleep(0.05)
    sampler.mark("ingest_end")
    sampler.stop()
    samples = sampler.samples()
    times = [s.t_ms for s in samples]
    assert times == sorted(times)
    phases = {s.phase for s in samples}
    assert {"ingest_start", "post_flush", "ingest_end"} <= phases
    assert any(s.phase == "interval" for s in samples)
    assert all(s.rss_bytes > 0 for s in samples)


def test_sampler_does_not_allocate_unboundedly():
    sampler = MemorySampler(interval_s=0.001, capacity=64)
    sampler.start()
    time.sleep(0.3)
    sampler.stop()
    assert len(sampler.samples()) <= 64
