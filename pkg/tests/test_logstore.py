import io
import math
import random

import pytest

from dream_teleop.errors import LogFormatError, SchemaVersionError
from dream_teleop.logstore import (
    SCHEMA_VERSION,
    FlightLog,
    LogEvent,
    LogHeader,
    LogSample,
    LogWriter,
    dumps_log,
    loads_log,
    read_log,
    write_log,
)


def rnd_sample(rng, t):
    return LogSample(
        t=t,
        x=rng.uniform(-2, 2), y=rng.uniform(-2, 2), z=rng.uniform(0.3, 1.9),
        yaw=rng.uniform(-math.pi + 1e-9, math.pi),
        vx=rng.uniform(-1, 1), vy=rng.uniform(-1, 1), vz=rng.uniform(-0.4, 0.4),
        yaw_rate=rng.uniform(-1.5, 1.5),
        thrust=tuple(rng.uniform(0, 1) for _ in range(4)),
    )


def small_log(n=50, with_events=True, seed=1):
    rng = random.Random(seed)
    header = LogHeader(manifest={"config": {"mode": "dream"}, "seed": seed},
                       geometry={"start": [0, -2, 1]}, start_walltime=None)
    samples = [rnd_sample(rng, round(k * 0.01, 6)) for k in range(n)]
    events = []
    if with_events:
        events = [
            LogEvent(t=0.05, event="button", payload={"pressed": True}),
            LogEvent(t=0.05, event="grab", payload={"x": 0.0}),
            LogEvent(t=0.31, event="release", payload={}),
        ]
    return FlightLog(header=header, samples=samples, events=events)


def test_empty_sample_log_round_trip():
    log = FlightLog(header=LogHeader(manifest={"a": 1}))
    assert read_log(io.StringIO(dumps_log(log))).header.manifest == {"a": 1}


def test_round_trip_field_for_field():
    log = small_log()
    back = loads_log(dumps_log(log))
    assert back.header == log.header
    assert back.samples == log.samples
    assert back.events == log.events


def test_round_trip_byte_stable():
    log = small_log(n=200, seed=9)
    text = dumps_log(log)
    again = dumps_log(loads_log(text))
    assert again == text


def test_events_interleaved_by_timestamp():
    log = small_log()
    text = dumps_log(log)
    times = []
    for line in text.splitlines()[1:]:
        import json

        times.append(json.loads(line)["t"])
    assert times == sorted(times)


def test_writer_rejects_non_monotone_samples():
    buf = io.StringIO()
    w = LogWriter(buf, LogHeader())
    w.add_sample(LogSample(t=1.0, x=0, y=0, z=1, yaw=0, vx=0, vy=0, vz=0, yaw_rate=0, thrust=(0.5,) * 4))
    with pytest.raises(ValueError):
        w.add_sample(LogSample(t=1.0, x=0, y=0, z=1, yaw=0, vx=0, vy=0, vz=0, yaw_rate=0, thrust=(0.5,) * 4))


def test_writer_rejects_unknown_event():
    buf = io.StringIO()
    w = LogWriter(buf, LogHeader())
    with pytest.raises(ValueError):
        w.add_event(LogEvent(t=0.0, event="mystery"))


def test_reader_rejects_decreasing_timestamps_with_line_number():
    lines = dumps_log(small_log(n=5, with_events=False)).splitlines()
    lines[2], lines[4] = lines[4], lines[2]
    with pytest.raises(LogFormatError) as err:
        loads_log("\n".join(lines) + "\n")
    assert err.value.line is not None
    assert "line" in str(err.value)


def test_reader_rejects_wrong_schema_version():
    text = dumps_log(small_log(n=2))
    text = text.replace(SCHEMA_VERSION, "dreamlog/999", 1)
    with pytest.raises(SchemaVersionError):
        loads_log(text)


def test_reader_rejects_missing_sample_field():
    log = small_log(n=3, with_events=False)
    lines = dumps_log(log).splitlines()
    import json

    row = json.loads(lines[1])
    del row["yaw"]
    lines[1] = json.dumps(row, separators=(",", ":"))
    with pytest.raises(LogFormatError) as err:
        loads_log("\n".join(lines) + "\n")
    assert err.value.line == 2


def test_reader_rejects_truncated_final_line():
    text = dumps_log(small_log(n=3, with_events=False))
    with pytest.raises(LogFormatError):
        loads_log(text[:-5])


def test_reader_rejects_empty_file():
    with pytest.raises(LogFormatError) as err:
        loads_log("")
    assert err.value.line == 1


def test_reader_validates_thrust_range():
    log = small_log(n=2, with_events=False)
    import json

    lines = dumps_log(log).splitlines()
    row = json.loads(lines[1])
    row["thrust"] = [0.5, 0.5, 1.5, 0.5]
    lines[1] = json.dumps(row, separators=(",", ":"))
    with pytest.raises(LogFormatError):
        loads_log("\n".join(lines) + "\n")


def test_reader_validates_yaw_range():
    log = small_log(n=2, with_events=False)
    import json

    lines = dumps_log(log).splitlines()
    row = json.loads(lines[1])
    row["yaw"] = 4.0
    lines[1] = json.dumps(row, separators=(",", ":"))
    with pytest.raises(LogFormatError):
        loads_log("\n".join(lines) + "\n")


def test_file_round_trip(tmp_path):
    log = small_log(n=500, seed=4)
    path = tmp_path / "flight.dreamlog"
    write_log(log, path)
    back = read_log(path)
    assert back.samples == log.samples
    assert back.events == log.events
    # Bytes are canonical.
    write_log(back, tmp_path / "again.dreamlog")
    assert (tmp_path / "again.dreamlog").read_bytes() == path.read_bytes()


def mutate_corpus(text: str):
    """20 distinct corruption styles; every one must be rejected with a line."""
    import json

    lines = text.splitlines()
    header = json.loads(lines[0])
    sample_idx = next(i for i, l in enumerate(lines) if '"type":"sample"' in l)
    sample = json.loads(lines[sample_idx])

    def with_line(i, replacement):
        out = list(lines)
        out[i] = replacement
        return "\n".join(out) + "\n"

    def with_header(h):
        out = list(lines)
        out[0] = json.dumps(h, separators=(",", ":"))
        return "\n".join(out) + "\n"

    def with_sample(mutator):
        row = dict(sample)
        mutator(row)
        return with_line(sample_idx, json.dumps(row, separators=(",", ":")))

    def drop(row, key):
        del row[key]

    yield "bad-version", with_header({**header, "schema_version": "dreamlog/0"})
    yield "header-not-object", "[1,2]\n" + "\n".join(lines[1:]) + "\n"
    yield "header-missing-manifest", with_header({k: v for k, v in header.items() if k != "manifest"})
    yield "header-missing-geometry", with_header({k: v for k, v in header.items() if k != "geometry"})
    yield "header-invalid-json", "{oops\n" + "\n".join(lines[1:]) + "\n"
    yield "row-invalid-json", with_line(sample_idx, '{"type":"sample",')
    yield "row-not-object", with_line(sample_idx, "42")
    yield "row-unknown-type", with_line(sample_idx, '{"type":"wat","t":0.0}')
    yield "sample-missing-t", with_sample(lambda r: drop(r, "t"))
    yield "sample-missing-yaw", with_sample(lambda r: drop(r, "yaw"))
    yield "sample-missing-thrust", with_sample(lambda r: drop(r, "thrust"))
    yield "sample-nan-string", with_sample(lambda r: r.update(x="NaN"))
    yield "sample-string-field", with_sample(lambda r: r.update(vx="fast"))
    yield "sample-bool-field", with_sample(lambda r: r.update(vy=True))
    yield "sample-yaw-out-of-range", with_sample(lambda r: r.update(yaw=3.5))
    yield "sample-thrust-short", with_sample(lambda r: r.update(thrust=[0.5, 0.5]))
    yield "sample-thrust-out-of-range", with_sample(lambda r: r.update(thrust=[0.5, 0.5, -0.1, 0.5]))
    yield "event-unknown-kind", with_line(sample_idx, '{"type":"event","t":0.0,"event":"teleport","payload":{}}')
    yield "event-bad-payload", with_line(sample_idx, '{"type":"event","t":0.0,"event":"grab","payload":7}')
    yield "blank-line", with_line(sample_idx, "")


def test_mutated_files_all_rejected_with_located_errors():
    text = dumps_log(small_log(n=30, seed=8))
    count = 0
    for name, mutated in mutate_corpus(text):
        with pytest.raises(LogFormatError) as err:
            loads_log(mutated)
        assert err.value.line is not None, name
        count += 1
    assert count == 20
