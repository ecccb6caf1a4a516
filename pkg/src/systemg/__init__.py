"""Parsing, semantics and nesting-free normal forms for the dyadic deontic logic G."""
from .syntax import (BOT, TOP, Atom, Box, CanonicalConjunction, Formula, Neg, Ob, Or,
                     ParseError, ShapeFailure, Top, UdnfFormula, atoms_of, conj, dia,
                     iff, implies, modal_depth, parse, perm, render, size, udnf_shape)
from .semantics import (Globality, InvalidModelError, Model, ValidationReport, holds_at,
                        is_globally_true, opt_set, truth_set, validate_model)
from .normalize import (NodeLimitExceeded, RewriteStep, RewriteTrace, Rule, eliminate_box,
                        extract_prenex, normalize, pull_prenex, simplify,
                        to_propositional_dnf)
from .testkit import (Confirmation, Counterexample, check_equivalence, check_validity,
                      enumerate_models, random_formula, schema_suite)

__version__ = "0.1.0"
