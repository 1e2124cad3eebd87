import numpy as np
import pytest

from fvq.errors import DegenerateSamples, NonPositiveSigma, TooFewFrames
from fvq.nr import (NR_FEATURE_NAMES, NoReferenceFeatures, NrFeatureConfig,
                    extract_nr, fit_ggd, mscn_transform, self_reference)
from fvq.video import VideoSequence, gaussian_blur

from oracles import mscn_oracle


def test_mscn_constant_frame_is_zero():
    assert np.all(mscn_transform(np.full((10, 10), 0.7)) == 0.0)


def test_mscn_iid_noise_statistics():
    rng = np.random.default_rng(2024)
    m = mscn_transform(rng.uniform(0, 1, (256, 256)))
    assert -0.05 < m.mean() < 0.05
    assert 0.6 < m.var() < 1.1


def test_mscn_matches_scalar_loop_oracle():
    rng = np.random.default_rng(9)
    f = rng.uniform(0, 1, (5, 5))
    got = mscn_transform(f, window_sigma=7.0 / 6.0, radius=2)
    want = mscn_oracle(f, 7.0 / 6.0, radius=2)
    assert np.max(np.abs(got - want)) < 1e-9


def test_mscn_shift_invariance_exact():
    rng = np.random.default_rng(10)
    f = rng.uniform(0.2, 0.6, (24, 24))
    base = mscn_transform(f)
    for b in (0.05, -0.1, 0.3):
        assert np.max(np.abs(mscn_transform(f + b) - base)) < 1e-9


def test_mscn_scale_invariance_bounded_by_stabilizer():
    # gain a rescales the local deviation and std identically; the residual
    # error is the fixed 1/255 stabilizer: |delta| <= |out| * C|1-1/a| / sigma_min
    rng = np.random.default_rng(10)
    f = rng.uniform(0.2, 0.6, (24, 24))
    base = mscn_transform(f)
    for a in (0.5, 2.0):
        scaled = mscn_transform(a * f + 0.05)
        assert np.max(np.abs(scaled - base)) < 0.1


def test_mscn_rejects_bad_sigma():
    with pytest.raises(NonPositiveSigma):
        mscn_transform(np.zeros((4, 4)), window_sigma=0.0)


def test_fit_ggd_gaussian():
    rng = np.random.default_rng(2024)
    fit = fit_ggd(rng.normal(0, 1, 100_000))
    assert 1.9 <= fit.shape <= 2.1
    assert fit.scale == pytest.approx(np.sqrt(2), rel=0.02)


def test_fit_ggd_laplacian():
    rng = np.random.default_rng(2025)
    fit = fit_ggd(rng.laplace(0, 1, 100_000))
    assert 0.9 <= fit.shape <= 1.1
    assert fit.scale == pytest.approx(1.0, rel=0.03)


def test_fit_ggd_uniform_shape_large():
    rng = np.random.default_rng(2026)
    assert fit_ggd(rng.uniform(-1, 1, 100_000)).shape > 4.0


def test_fit_ggd_scale_equivariance():
    rng = np.random.default_rng(13)
    samples = rng.normal(0, 0.4, 50_000)
    base = fit_ggd(samples)
    scaled = fit_ggd(3.0 * samples)
    assert scaled.scale == pytest.approx(3.0 * base.scale, rel=0.01)
    assert scaled.shape == pytest.approx(base.shape, rel=0.02)


def test_fit_ggd_degenerate():
    with pytest.raises(DegenerateSamples):
        fit_ggd(np.full(128, 0.5))
    with pytest.raises(DegenerateSamples):
        fit_ggd(np.arange(10.0))    # too few samples


def test_self_reference_constant_video_unchanged():
    seq = VideoSequence(np.full((3, 8, 8), 0.4))
    out = self_reference(seq, 1.0)
    assert np.max(np.abs(out.data - 0.4)) < 1e-9


def test_self_reference_is_per_frame_blur():
    rng = np.random.default_rng(14)
    seq = VideoSequence(rng.uniform(0, 1, (3, 12, 12)))
    out = self_reference(seq, 0.8)
    for k in range(3):
        assert np.array_equal(out.frame(k), gaussian_blur(seq.frame(k), 0.8))
    with pytest.raises(NonPositiveSigma):
        self_reference(seq, -1.0)


def test_blur_ladder_reduces_mscn_variance():
    rng = np.random.default_rng(15)
    noisy = VideoSequence(np.clip(rng.normal(0.5, 0.15, (2, 48, 48)), 0, 1))
    variances = []
    for sigma in (0.5, 1.0, 2.0):
        blurred = self_reference(noisy, sigma)
        v = np.mean([mscn_transform(blurred.frame(k)).var() for k in range(2)])
        variances.append(v)
    assert variances[0] > variances[1] > variances[2]


@pytest.fixture(scope="module")
def noise_video():
    rng = np.random.default_rng(16)
    return VideoSequence(np.clip(rng.normal(0.5, 0.18, (4, 64, 64)), 0, 1))


def test_extract_nr_pure_noise_blur_delta_large(noise_video):
    feats = extract_nr(noise_video)
    assert feats["blur_dvif"] > 0.3


def test_extract_nr_heavily_blurred_blur_delta_small(noise_video):
    heavy = noise_video.map_frames(lambda f: gaussian_blur(f, 3.0))
    feats = extract_nr(heavy, NrFeatureConfig(blur_sigma=1.0))
    assert feats["blur_dvif"] < 0.15


def test_extract_nr_deterministic(noise_video):
    assert extract_nr(noise_video) == extract_nr(noise_video)


def test_extract_nr_order_and_names(noise_video):
    feats = extract_nr(noise_video)
    assert list(feats) == NR_FEATURE_NAMES
    assert len(feats) == 10


def test_extract_nr_flat_videos_finite():
    for value in (0.0, 1.0):
        flat = VideoSequence(np.full((3, 64, 64), value))
        feats = extract_nr(flat)
        assert all(np.isfinite(v) for v in feats.values())
        assert feats["ggd_s_shape"] == 2.0
        assert feats["ggd_s_scale"] == 0.0


def test_extract_nr_needs_two_frames():
    with pytest.raises(TooFewFrames):
        extract_nr(VideoSequence(np.zeros((1, 64, 64))))


def test_nr_transformer(noise_video):
    t = NoReferenceFeatures()
    matrix = t.fit_transform([noise_video])
    assert matrix.shape == (1, 10)
    assert matrix[0].tolist() == list(extract_nr(noise_video).values())
    assert t.get_feature_names_out().tolist() == NR_FEATURE_NAMES
