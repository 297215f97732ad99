import numpy as np

from civb.fixtures import (
    FIXTURE_RATE_HZ,
    fixture_path,
    list_fixtures,
    load_fixture,
    synthesize_utterance,
    write_fixtures,
)


def test_two_utterances_bundled():
    names = list_fixtures()
    assert names == ("speech_a.wav", "speech_b.wav")
    for name in names:
        assert fixture_path(name).is_file()


def test_fixtures_load_as_audio():
    for name in list_fixtures():
        buf = load_fixture(name)
        assert buf.sample_rate_hz == FIXTURE_RATE_HZ
        assert 1.0 <= buf.duration_s <= 2.0
        assert np.abs(buf.samples).max() <= 1.0
        assert np.all(np.isfinite(buf.samples))


def test_lead_in_is_quiet():
    # the first 100 ms is a low-level noise floor usable for noise estimates
    for name in list_fixtures():
        buf = load_fixture(name)
        lead = buf.samples[: int(0.1 * buf.sample_rate_hz)]
        body_rms = np.sqrt(np.mean(buf.samples**2))
        lead_rms = np.sqrt(np.mean(lead**2))
        assert lead_rms < 0.5 * body_rms


def test_synthesis_is_deterministic():
    a = synthesize_utterance("a")
    b = synthesize_utterance("a")
    np.testing.assert_array_equal(a.samples, b.samples)


def test_bundled_files_match_generator(tmp_path):
    written = write_fixtures(tmp_path)
    assert [p.name for p in written] == list(list_fixtures())
    for regenerated in written:
        bundled = fixture_path(regenerated.name)
        assert regenerated.read_bytes() == bundled.read_bytes()
