from .experiments import (ErrorEstimate, RefineEstimate, SweepRow, TrialSpec, estimate_error,
                          refine_pipeline, run_trial, sweep)

__all__ = ["ErrorEstimate", "RefineEstimate", "SweepRow", "TrialSpec", "estimate_error",
           "refine_pipeline", "run_trial", "sweep"]
