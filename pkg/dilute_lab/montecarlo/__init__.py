"""Моделирование разреженного ансамбля методом Монте-Карло."""
