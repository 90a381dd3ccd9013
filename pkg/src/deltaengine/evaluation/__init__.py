from .acc import AccReport, Judge, LlmJudge, MockJudge, acc_rate
from .exe import ExeReport, ExeRoleResult, exe_rate
from .fuzz import ProgramGen, render_noisy
from .opponents import MoveDatabase, load_move_db, synth_opponent, synth_script
from .scaling import (
    ScalingHistogram,
    ScalingTrace,
    StepStat,
    scaling_histogram,
    scaling_run,
    smoke_battle,
)

__all__ = [
    "AccReport", "Judge", "LlmJudge", "MockJudge", "acc_rate",
    "ExeReport", "ExeRoleResult", "exe_rate",
    "ProgramGen", "render_noisy",
    "MoveDatabase", "load_move_db", "synth_opponent", "synth_script",
    "ScalingHistogram", "ScalingTrace", "StepStat",
    "scaling_histogram", "scaling_run", "smoke_battle",
]
