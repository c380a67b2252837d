"""Инфраструктурные компоненты приложения."""
