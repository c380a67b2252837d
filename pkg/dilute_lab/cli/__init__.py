"""Модуль CLI интерфейса."""
