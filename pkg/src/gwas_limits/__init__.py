"""Simulation and verification toolkit for information-theoretic limits of
causal-subsequence recovery in genome-wide association models."""
from .decoders import BallRefinementDecoder, MLDecoder, TypicalityDecoder
from .model import Dataset, ModelParams, PatternFunction

__all__ = ["BallRefinementDecoder", "Dataset", "MLDecoder", "ModelParams", "PatternFunction",
           "TypicalityDecoder"]
__version__ = "0.1.0"
