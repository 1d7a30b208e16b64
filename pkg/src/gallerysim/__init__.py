"""gallerysim: museum visitor simulation on raster floorplans."""

__version__ = "0.1.0"
