"""Versioned prompt template assets with named placeholders."""

from __future__ import annotations

from importlib import resources


def template_text(template: str) -> str:
    ref = resources.files("stforge") / "assets" / "templates" / f"{template}.txt"
    return ref.read_text(encoding="utf-8")


def render_template(template: str, /, **values: str) -> str:
    return template_text(template).format(**values)
