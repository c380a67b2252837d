"""Ядро: точные ряды, комбинаторика и перечисление путей."""
