"""Video quality assessment toolkit: fixed-function features + trainable fusion.

Two videos go in (original and processed for full-reference use, or the
processed video and a blurred copy of itself for no-reference use), a fixed
feature vector comes out, and a trainable regressor (epsilon-SVR or a small
feedforward network) maps features to a quality score correlated with mean
opinion scores.
"""

from .dlm import dlm_scales
from .errors import FvqError
from .evaluate import (DatasetManifest, EvaluationReport, ManifestEntry,
                       RegressorSpec, feature_correlation_report,
                       read_manifest, run_single_split, run_splits)
from .fr import (FrFeatureConfig, FullReferenceFeatures, dm_feature,
                 extract_fr, fr_feature_names, motion_features, sad)
from .metrics import pcc, rank, srcc
from .model_io import TrainedModel, model_load, model_predict, model_save
from .nn import (MlpRegressor, NnHyper, NnModel, default_architecture,
                 nn_predict, nn_train)
from .normalize import (MinMaxClipScaler, NormalizationStats, normalize_apply,
                        normalize_fit)
from .nr import (GgdFit, NR_FEATURE_NAMES, NoReferenceFeatures,
                 NrFeatureConfig, extract_nr, fit_ggd, mscn_transform,
                 self_reference)
from .svr import (SupportVectorRegressor, SvrGrid, SvrModel, SvrParams,
                  svr_grid_search, svr_predict, svr_train)
from .video import (VideoSequence, downsample_2x, frame_diff, gaussian_blur)
from .vif import vif_scales
from .yuv import read_raw_yuv, read_y4m, write_raw_yuv

__version__ = "0.1.0"

__all__ = [
    "DatasetManifest", "EvaluationReport", "FrFeatureConfig", "FvqError",
    "FullReferenceFeatures", "GgdFit", "ManifestEntry", "MinMaxClipScaler",
    "MlpRegressor", "NR_FEATURE_NAMES", "NnHyper", "NnModel",
    "NoReferenceFeatures", "NormalizationStats", "NrFeatureConfig",
    "RegressorSpec", "SupportVectorRegressor", "SvrGrid", "SvrModel",
    "SvrParams", "TrainedModel", "VideoSequence", "default_architecture",
    "dlm_scales", "dm_feature", "downsample_2x", "extract_fr", "extract_nr",
    "feature_correlation_report", "fit_ggd", "fr_feature_names", "frame_diff",
    "gaussian_blur", "model_load", "model_predict", "model_save",
    "motion_features", "mscn_transform", "nn_predict", "nn_train",
    "normalize_apply", "normalize_fit", "pcc", "rank", "read_manifest",
    "read_raw_yuv", "read_y4m", "run_single_split", "run_splits", "sad",
    "self_reference", "srcc", "svr_grid_search", "svr_predict", "svr_train",
    "vif_scales", "write_raw_yuv",
]
