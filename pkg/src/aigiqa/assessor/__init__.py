from .backbones import BACKBONES, BackboneSpec, StubBackbone, build_backbone
from .model import (
    Assessor,
    FeatureBundle,
    RegressionHead,
    extract,
    fuse_pr,
    fuse_text,
    mse_loss,
    predict_fr,
    predict_nr,
    predict_pr,
)
from .preprocess import PreprocessPolicy, preprocess

__all__ = [
    "BACKBONES",
    "BackboneSpec",
    "StubBackbone",
    "build_backbone",
    "Assessor",
    "FeatureBundle",
    "RegressionHead",
    "extract",
    "fuse_pr",
    "fuse_text",
    "mse_loss",
    "predict_fr",
    "predict_nr",
    "predict_pr",
    "PreprocessPolicy",
    "preprocess",
]
