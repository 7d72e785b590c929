"""dramcheck: DRAM protocol models as timed Petri nets.

Parse a DRAMml model, elaborate it with a per-standard configuration,
then derive checkable properties, render SystemVerilog assertions, and
check command traces against the same net.
"""

from .frontend import (ArcDecl, ArcKind, Diagnostic, DrammlSyntaxError,
                       DrammlValidationError, FrontendError, HierarchyDecl,
                       NetSpec, PlaceDecl, Scope, TransitionDecl, parse,
                       render)
from .core import (Command, Config, CoreError, ElaboratedNet,
                   MarkingState, ReachabilitySummary, StepResult, Violation,
                   apply_command, check_command, elaborate, explore,
                   initial_state, run, step)
from .propgen import (Property, PropertySet, SignalMap, count_summary,
                      derive, emit_sva, render_property)
from .traces import (CommandTrace, ConfigMismatchError,
                     FeatureCoverageSummary, PropertyVerdict, Status,
                     TraceError, VerdictReport, Witness, check, coverage,
                     load_trace, merge_reports, render_trace,
                     trace_from_commands)
from .analysis import (DiffEntry, SlackEntry, SlackSweepResult, UpgradeDiff,
                       slack_sweep, upgrade_diff)
from .modellib import (BUNDLED_MODELS, BUNDLED_PRESETS, ConfigError,
                       ModelBundle, TimingPreset, load_bundle, load_config,
                       load_model, load_preset, load_signal_map,
                       model_source, parse_config_text)

__version__ = "0.1.0"

__all__ = [
    "ArcDecl", "ArcKind", "Diagnostic", "DrammlSyntaxError",
    "DrammlValidationError", "FrontendError", "HierarchyDecl", "NetSpec",
    "PlaceDecl", "Scope", "TransitionDecl", "parse", "render",
    "Command", "Config", "CoreError", "ElaboratedNet", "MarkingState",
    "ReachabilitySummary", "StepResult", "Violation", "apply_command",
    "check_command", "elaborate", "explore", "initial_state", "run", "step",
    "Property", "PropertySet", "SignalMap", "count_summary", "derive",
    "emit_sva", "render_property",
    "CommandTrace", "ConfigMismatchError", "FeatureCoverageSummary",
    "PropertyVerdict", "Status", "TraceError", "VerdictReport", "Witness",
    "check", "coverage", "load_trace", "merge_reports", "render_trace",
    "trace_from_commands",
    "DiffEntry", "SlackEntry", "SlackSweepResult", "UpgradeDiff",
    "slack_sweep", "upgrade_diff",
    "BUNDLED_MODELS", "BUNDLED_PRESETS", "ConfigError", "ModelBundle",
    "TimingPreset", "load_bundle", "load_config", "load_model",
    "load_preset", "load_signal_map", "model_source", "parse_config_text",
    "__version__",
]
