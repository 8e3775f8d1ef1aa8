"""Session engine, scheduler, behavior metrics and assessment statistics for robot-delivered therapy sessions."""

__version__ = "0.1.0"
