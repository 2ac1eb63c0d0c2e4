"""Closed catalog of violation codes.

Codes are part of the stable interface: tools downstream match on them, so
entries are only ever added, never renamed.
"""
from __future__ import annotations

from dataclasses import dataclass

ERROR = "error"
WARNING = "warning"


@dataclass(frozen=True)
class CodeInfo:
    code: str
    namespace: str
    severity: str
    rule: str


_CATALOG = [
    CodeInfo("STRUCT_DUPLICATE_ID", "structural", ERROR,
             "Each (kind, name) pair is declared at most once, and the unrecognized "
             "class ν is never declared as a member of C."),
    CodeInfo("STRUCT_DANGLING_REF", "structural", ERROR,
             "Every entity a record refers to must be declared, or produced by an "
             "earlier event, before the record. A sample source must be a structure "
             "owned by some declared phenomenon: every sample is a sample of a real "
             "phenomenon."),
    CodeInfo("ORPHAN_ENTITY", "structural", WARNING,
             "A preprocessed sample or template is referenced but no event ever "
             "produces it. Co-domains are images of their mappings, so such an id "
             "cannot be a member of its set."),
    CodeInfo("S_BAD_ARITY", "S", ERROR,
             "Sampling takes a tuple of exactly mu structures when the system is "
             "multimodal at the sampling stage, and exactly one structure otherwise."),
    CodeInfo("P_NOT_TOTAL", "P", ERROR,
             "Preprocessing is a total function on S_m: every sample is mapped to "
             "some preprocessed sample."),
    CodeInfo("P_NOT_FUNCTION", "P", ERROR,
             "Preprocessing is a function: a sample has exactly one preprocessed "
             "image. Two samples sharing an image is fine (not injective)."),
    CodeInfo("F_NOT_TOTAL", "F", ERROR,
             "Feature extraction is a total function on S_p: every preprocessed "
             "sample is consumed by some extraction."),
    CodeInfo("F_NOT_FUNCTION", "F", ERROR,
             "Feature extraction is a function: a preprocessed sample feeds exactly "
             "one extraction. Shared templates are fine (not injective)."),
    CodeInfo("F_BAD_ARITY", "F", ERROR,
             "Extraction consumes a tuple of exactly mu preprocessed samples when the "
             "system is multimodal at the extraction stage, and exactly one otherwise."),
    CodeInfo("Q_NOT_PARTIAL_FUNCTION", "Q", ERROR,
             "Quality control maps each template to 0 or 1 values in T_q: a template "
             "is judged at most once."),
    CodeInfo("R_NOT_PARTIAL", "R", ERROR,
             "Within one recognition batch every input has 0 or 1 image in C: a "
             "template (or template/claim tuple) is recognized at most once per batch."),
    CodeInfo("R_INPUT_NOT_QUALIFIED", "R", ERROR,
             "Recognition is defined on T_q only: the input template must have "
             "passed quality control."),
    CodeInfo("R_VERIFY_CLASS_MISMATCH", "R", ERROR,
             "A verification input (template, claimed phenomenon) is mapped either "
             "to the unrecognized class or to the class bound to the claimed "
             "phenomenon."),
    CodeInfo("R_CLAIMED_UNKNOWN", "R", ERROR,
             "The claimed identity in a verification tuple must be a declared "
             "phenomenon (a member of B_p)."),
    CodeInfo("ONT_STRUCTURE_MULTI_OWNER", "ontology", ERROR,
             "A structure is part of exactly one phenomenon; zero owners or several "
             "owners both break the multiplicity."),
    CodeInfo("ONT_SAMPLE_NO_SOURCE", "ontology", ERROR,
             "A sample is made on behalf of one or more structures."),
    CodeInfo("ONT_SAMPLE_BAD_ARITY", "ontology", ERROR,
             "More than one structure per sample only occurs in systems multimodal at "
             "the sampling stage, and then the sample covers exactly mu structures."),
    CodeInfo("ONT_PREPROC_MULTI_SAMPLE", "ontology", WARNING,
             "A preprocessed sample instance is derived from exactly one sample. The "
             "set-level mapping tolerates shared images, so this is only a warning."),
    CodeInfo("ONT_TEMPLATE_NO_INPUT", "ontology", ERROR,
             "A template is extracted from one or more preprocessed samples."),
    CodeInfo("ONT_TEMPLATE_BAD_ARITY", "ontology", ERROR,
             "Extraction from several preprocessed samples only occurs in systems "
             "multimodal at the extraction stage, and then it uses exactly mu inputs."),
    CodeInfo("ONT_STATUS_INCONSISTENT", "ontology", ERROR,
             "A template's status is untested, failed or passed; quality events that "
             "disagree leave it without a single status."),
    CodeInfo("ONT_SUBSUMPTION_BROKEN", "ontology", ERROR,
             "Enrolled person is a Person and an Enrolled phenomenon; a class bound "
             "to a phenomenon treats it as enrolled, so the phenomenon must be "
             "enrolled, and repeated declarations must agree on the person/enrolled "
             "flags."),
]

CATALOG: dict[str, CodeInfo] = {info.code: info for info in _CATALOG}

MAPPING_CODES = tuple(c.code for c in _CATALOG if c.namespace != "ontology")
ONTOLOGY_CODES = tuple(c.code for c in _CATALOG if c.namespace == "ontology")

# what each checker is allowed to emit
CHECKER_CODES = {
    "structural": {"STRUCT_DUPLICATE_ID", "STRUCT_DANGLING_REF"},
    "S": {"S_BAD_ARITY", "STRUCT_DANGLING_REF"},
    "P": {"P_NOT_TOTAL", "P_NOT_FUNCTION", "STRUCT_DANGLING_REF", "ORPHAN_ENTITY"},
    "F": {"F_NOT_TOTAL", "F_NOT_FUNCTION", "F_BAD_ARITY", "STRUCT_DANGLING_REF", "ORPHAN_ENTITY"},
    "Q": {"Q_NOT_PARTIAL_FUNCTION", "STRUCT_DANGLING_REF"},
    "R": {"R_NOT_PARTIAL", "R_INPUT_NOT_QUALIFIED", "R_VERIFY_CLASS_MISMATCH",
          "R_CLAIMED_UNKNOWN", "STRUCT_DANGLING_REF"},
    "ontology": set(ONTOLOGY_CODES),
}


def severity(code: str) -> str:
    return CATALOG[code].severity


def explain(code: str) -> str:
    info = CATALOG.get(code)
    if info is None:
        raise KeyError(code)
    return f"{info.code} [{info.namespace}, {info.severity}]\n{info.rule}"
