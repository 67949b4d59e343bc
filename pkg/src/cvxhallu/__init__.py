"""Convex example-based super-resolution with a primal-dual solver."""

from .image_core import MultiImage, load_image, save_image
from .linops import DegradationModel, GaussianKernel, make_kernel
from .pd_solver import SolverConfig, SolveDiagnostics, energy, solve
from .pipeline import CandidateSet, bicubic_resize, degrade, hallucinate, synth_candidates
from .metrics import psnr, ssim

__all__ = [
    "MultiImage",
    "load_image",
    "save_image",
    "DegradationModel",
    "GaussianKernel",
    "make_kernel",
    "SolverConfig",
    "SolveDiagnostics",
    "energy",
    "solve",
    "CandidateSet",
    "bicubic_resize",
    "degrade",
    "hallucinate",
    "synth_candidates",
    "psnr",
    "ssim",
]

__version__ = "0.1.0"
