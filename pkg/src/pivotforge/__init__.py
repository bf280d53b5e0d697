"""Pivot-language TTS data augmentation toolkit for low-resource ASR."""

__version__ = "0.1.0"
