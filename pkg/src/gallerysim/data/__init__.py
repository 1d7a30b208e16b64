"""Bundled synthetic floorplan fixture."""

from importlib import resources


def synthetic_plan_config():
    """Path of the bundled two-gallery plan's config file."""
    return str(resources.files(__name__) / "synthetic" / "plan.conf")
