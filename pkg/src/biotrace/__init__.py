"""Validate recognition-pipeline traces of biometric systems, infer the system
kind and operating phase of recognition batches, and check instance data
against the class model."""

from .checks import (
    ValidationReport,
    Violation,
    check_extraction,
    check_preprocessing,
    check_quality,
    check_recognition,
    check_sampling,
    check_structure,
    validate_trace,
)
from .generator import GenConfig, generate_trace, mutate_trace
from .model import (
    ClassDecl,
    EntityId,
    ExtractEvent,
    PhenomenonDecl,
    PreprocessEvent,
    QualityEvent,
    RecognizeEvent,
    SampleEvent,
    StructureDecl,
    Trace,
    UsageError,
    cardinality,
    set_of,
)
from .modes import ModeReport, classify_kind, classify_mode, infer_phase
from .ontology import ConformanceReport, check_conformance, derive_status
from .oracle import brute_force_validate
from .traceio import ParseError, parse_trace, serialize_trace

__version__ = "0.1.0"
