"""Boolean-valued truth, witnesses and type realization over finite families of random variables."""

from .errors import RVForceError
from .evaluator import Evaluator, is_valid, truth_value
from .family import (
    Family,
    RandomVariable,
    apply_term,
    case_merge,
    eval_rv,
    filtration_level,
    term_closure,
)
from .logic import cantor_pair, cantor_unpair, classify_formula, free_variables, substitute
from .parser import parse_formula, parse_term, render_formula, render_term
from .report import emit_report
from .saturation import (
    SaturationReport,
    TypeSpec,
    check_satur,
    conjunction_chain,
    realize_existential_type,
    realize_open_type,
    term_type,
)
from .scenario import Scenario, dump_scenario, load_scenario, load_type_file, parse_scenario
from .space import Event, SampleSpace, distance, eq_mod_eps, le_mod_eps, measure
from .universal import build_universal_failure, minimal_failure
from .witnessing import (
    cowitness_universal,
    pack_tuple_witness,
    pairing_reduce,
    skolem_chain,
    witness_existential,
)

__all__ = [
    "Event", "Evaluator", "Family", "RVForceError", "RandomVariable", "SampleSpace",
    "SaturationReport", "Scenario", "TypeSpec", "apply_term", "build_universal_failure",
    "cantor_pair", "cantor_unpair", "case_merge", "check_satur", "classify_formula",
    "conjunction_chain", "cowitness_universal", "distance", "dump_scenario", "emit_report",
    "eq_mod_eps", "eval_rv", "filtration_level", "free_variables", "is_valid", "le_mod_eps",
    "load_scenario", "load_type_file", "measure", "minimal_failure", "pack_tuple_witness",
    "pairing_reduce", "parse_formula", "parse_scenario", "parse_term", "realize_existential_type",
    "realize_open_type", "render_formula", "render_term", "skolem_chain", "substitute",
    "term_closure", "term_type", "truth_value", "witness_existential",
]
