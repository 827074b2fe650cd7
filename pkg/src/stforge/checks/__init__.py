"""Dialect profile, static checks, diagnostics, and defect injection."""

from .defects import INJECTABLE_CATEGORIES, InjectionError, inject_defect, inject_defects
from .diagnostics import (
    CATEGORY_FOR_CODE, CODE_FOR_CATEGORY, Category, CompileReport, Diagnostic,
    ReportStatus, Severity, report_from_diagnostics,
)
from .profile import (
    DEFAULT_PROFILE_ID, DialectProfile, IdentifierRules, ProfileInvariantViolation,
    ProfileParseError, bundled_profile_ids, load_bundled_profile, load_profile,
    load_profile_file,
)
from .validator import validate

__all__ = [
    "CATEGORY_FOR_CODE", "CODE_FOR_CATEGORY", "Category", "CompileReport",
    "DEFAULT_PROFILE_ID", "DialectProfile", "Diagnostic", "INJECTABLE_CATEGORIES",
    "IdentifierRules", "InjectionError", "ProfileInvariantViolation",
    "ProfileParseError", "ReportStatus", "Severity", "bundled_profile_ids",
    "inject_defect", "inject_defects", "load_bundled_profile", "load_profile",
    "load_profile_file", "report_from_diagnostics", "validate",
]
