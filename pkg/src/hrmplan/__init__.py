"""Highway RoadMap path planning for ellipsoidal robots among superquadrics."""

__version__ = "0.1.0"
