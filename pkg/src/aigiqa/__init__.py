"""Toolkit for building and benchmarking perceptual quality databases of AI-generated images.

Covers the full pipeline: corpus ingestion, human rating collection over HTTP,
MOS label reduction with confidence-interval outlier rejection, NR/FR/PR quality
assessors on pretrained visual backbones, and SRCC/PLCC benchmarking.
"""

__version__ = "0.1.0"

DIMENSIONS = ("quality", "authenticity", "correspondence")
