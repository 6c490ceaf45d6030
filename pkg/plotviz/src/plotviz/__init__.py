"""Rendering of simulator CLI outputs: Bloch trajectories, probability
curves, phase portraits and ensemble histograms."""

from .jobs import CLASS_COLORS, JobError, PlotJob, load_job
from .render import render
from .trajectory_io import InputError, TrajectoryTable, read_run_log, read_trajectory

__version__ = "0.1.0"
