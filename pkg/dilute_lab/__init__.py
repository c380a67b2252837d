"""Лаборатория моментов сильно разреженных матриц Вигнера."""

__version__ = "0.1.0"
