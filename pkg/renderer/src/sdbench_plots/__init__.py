"""Deterministic PNG rendering of sdbench plot-data sidecars."""

from .render import PlotManifest, SidecarError, load_manifest, render_all

__version__ = "0.1.0"
