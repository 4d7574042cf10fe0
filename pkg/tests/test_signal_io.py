import os
import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from dctnet.errors import (
    DataError,
    DuplicateError,
    EmptyManifestError,
    EmptySignalError,
    FormatError,
    LengthError,
    ParseError,
    UnsupportedFormatError,
)
from dctnet.signal_io import (
    FeatureMatrix,
    load_manifest,
    load_wav,
    read_features,
    write_features,
    write_wav,
)


def test_pcm16_scaling(tmp_path):
    path = tmp_path / "a.wav"
    write_wav(path, np.array([0, 16384, -32768], dtype=np.int16), 8000)
    sig = load_wav(path)
    assert sig.sample_rate == 8000
    assert sig.samples.tolist() == [0.0, 0.5, -1.0]


def test_stereo_downmix(tmp_path):
    path = tmp_path / "s.wav"
    write_wav(path, np.array([[1.0, 0.0]], dtype=np.float32), 44100, float32=True)
    assert load_wav(path).samples.tolist() == [0.5]


def test_duration_matches_reference_writer(tmp_path):
    # reference: the stdlib wave writer, independent of our RIFF code
    import wave
    path = tmp_path / "ref.wav"
    with wave.open(str(path), "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(44100)
        w.writeframes(np.zeros(3 * 44100, dtype="<i2").tobytes())
    assert len(load_wav(path)) == 132300


def test_pcm16_roundtrip_exact(tmp_path, rng):
    ints = rng.integers(-32768, 32768, size=1000).astype(np.int16)
    path = tmp_path / "r.wav"
    write_wav(path, ints, 22050)
    back = np.round(load_wav(path).samples * 32768).astype(np.int64)
    assert np.array_equal(back, ints.astype(np.int64))


def test_wav_errors(tmp_path):
    bad = tmp_path / "bad.wav"
    bad.write_bytes(b"RIFX0000WAVE")
    with pytest.raises(FormatError):
        load_wav(bad)

    path = tmp_path / "pcm8.wav"
    fmt = struct.pack("<HHIIHH", 1, 1, 8000, 8000, 1, 8)
    body = b"WAVEfmt " + struct.pack("<I", 16) + fmt + b"data" + struct.pack("<I", 2) + b"\x80\x80"
    path.write_bytes(b"RIFF" + struct.pack("<I", len(body)) + body)
    with pytest.raises(UnsupportedFormatError):
        load_wav(path)

    empty = tmp_path / "empty.wav"
    write_wav(empty, np.zeros(0, dtype=np.int16), 8000)
    with pytest.raises(EmptySignalError):
        load_wav(empty)


def test_feature_header_size_and_empty(tmp_path):
    fm = FeatureMatrix(np.zeros((0, 3)), frame_hop=4)
    path = tmp_path / "e.adf"
    write_features(path, fm)
    assert os.path.getsize(path) == 17
    assert read_features(path) == fm


def test_feature_roundtrip_small(tmp_path):
    fm = FeatureMatrix(np.array([[1.0, 2.0], [3.0, 4.0]]), 128, np.array([10.0, 20.0]))
    path = tmp_path / "m.adf"
    write_features(path, fm)
    assert read_features(path) == fm


def test_feature_roundtrip_bit_exact_specials(tmp_path):
    fm = FeatureMatrix(np.array([[1e-300, -0.0], [5e-324, 1.0]]), 1)
    path = tmp_path / "z.adf"
    write_features(path, fm)
    back = read_features(path)
    # byte-level oracle: -0.0 == 0.0 numerically, so compare raw bytes
    assert back.data.tobytes() == fm.data.tobytes()
    assert np.signbit(back.data[0, 1])
    raw = path.read_bytes()[17:]
    assert raw == fm.data.astype("<f8").tobytes()


def test_feature_errors(tmp_path):
    path = tmp_path / "x.adf"
    path.write_bytes(b"NOPE" + bytes(13))
    with pytest.raises(FormatError):
        read_features(path)
    write_features(path, FeatureMatrix(np.ones((4, 4)), 1))
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(LengthError):
        read_features(path)


def test_feature_matrix_rejects_nonfinite():
    with pytest.raises(DataError):
        FeatureMatrix(np.array([[np.nan]]))


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(0, 6), st.integers(1, 6)),
              elements=st.floats(allow_nan=False, allow_infinity=False)),
       st.integers(1, 2**16), st.booleans())
def test_feature_roundtrip_property(tmp_path_factory, data, hop, with_freqs):
    freqs = np.linspace(1.0, 2.0, data.shape[1]) if with_freqs else None
    fm = FeatureMatrix(data, hop, freqs)
    path = tmp_path_factory.mktemp("p") / "f.adf"
    write_features(path, fm)
    assert read_features(path) == fm


def _manifest(tmp_path, text):
    path = tmp_path / "m.tsv"
    path.write_text(text, encoding="utf-8")
    return path


def test_manifest_basic(tmp_path):
    man = load_manifest(_manifest(tmp_path, "a.wav\tbird1\nb.wav\tbird2\n"))
    assert man.entries == [("a.wav", "bird1"), ("b.wav", "bird2")]
    assert man.class_names == ["bird1", "bird2"]


def test_manifest_comments_only(tmp_path):
    with pytest.raises(EmptyManifestError):
        load_manifest(_manifest(tmp_path, "# nothing\n# here\n"))


def test_manifest_200_tracks_4_labels(tmp_path):
    labels = ["d", "c", "b", "a"]
    text = "".join(f"t{i}.wav\t{labels[i % 4]}\n" for i in range(200))
    man = load_manifest(_manifest(tmp_path, text))
    assert len(man.entries) == 200
    assert man.class_names == ["a", "b", "c", "d"]
    assert man.entries[0] == ("t0.wav", "d")


def test_manifest_errors(tmp_path):
    with pytest.raises(ParseError) as exc:
        load_manifest(_manifest(tmp_path, "a.wav\tx\nno-tab-here\n"))
    assert exc.value.line == 2
    with pytest.raises(DuplicateError):
        load_manifest(_manifest(tmp_path, "a.wav\tx\na.wav\ty\n"))
    with pytest.raises(DataError):
        load_manifest(_manifest(tmp_path, "a.wav\tx\nb.wav\tx\n"))
