"""Transcribed densities, maps, brackets and constraints as diffalg builders."""
from .builders import (Env, ModelParams, Specialization, build_hf_density, build_K_generator,
                       build_quasitriviality_map, build_riem2_rhs, build_second_poisson,
                       build_string_density, check_p_domain, coefficient, literal_counts,
                       literal_values, p_constraint_poly, p_from_cq, specializations)
from .transcribe import FormulaError, Literals, Mutation, compile_formula

__all__ = [
    "ModelParams", "Specialization", "Mutation", "Literals", "Env", "FormulaError",
    "build_hf_density", "build_riem2_rhs", "build_K_generator", "build_quasitriviality_map",
    "build_second_poisson", "build_string_density", "p_from_cq", "p_constraint_poly",
    "check_p_domain", "specializations", "coefficient", "compile_formula",
    "literal_counts", "literal_values",
]
