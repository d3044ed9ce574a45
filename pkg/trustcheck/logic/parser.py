import logging
from fractions import Fraction

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, UnexpectedToken, VisitError

from ..errors import FormulaSyntaxError, UnknownSymbolError
from .formula import (
    QUERY,
    And,
    Atom,
    Belief,
    CapabilityOp,
    CompetenceTrust,
    Const,
    DispositionTrust,
    Eventually,
    Exists,
    ForAll,
    Formula,
    Globally,
    GoalOp,
    IntentionOp,
    Next,
    Not,
    Or,
    Prob,
    QualitativeDependence,
    Release,
    StrongDependence,
    Until,
    WeakDependence,
    implies,
)

log = logging.getLogger("trustcheck")

# Loosest to tightest: =>, |, &, U/R, prefix operators
FORMULA_GRAMMAR = r"""
    ?start: formula

    ?formula: disjunction "=>" formula -> imply
            | disjunction

    ?disjunction: disjunction "|" conjunction -> or_op
                | conjunction

    ?conjunction: conjunction "&" binary -> and_op
                | binary

    ?binary: unary "U" unary -> until
           | unary "U" "<=" INT unary -> bounded_until
           | unary "R" unary -> release
           | unary

    ?unary: "!" unary -> not_op
          | "X" unary -> next_op
          | "F" unary -> eventually
          | "F" "<=" INT unary -> bounded_eventually
          | "G" unary -> globally
          | "A" "[" formula "]" -> forall
          | "E" "[" formula "]" -> exists
          | "P" bound "[" formula "]" -> prob
          | "B" "{" NAME "}" bound "[" formula "]" -> belief
          | "CT" pair bound "[" formula "]" -> competence
          | "DT" pair bound "[" formula "]" -> disposition
          | "ST" pair bound "[" formula "]" -> strong
          | "ST" pair unary -> strong_qualitative
          | "WT" pair cmp "[" formula "]" -> weak
          | "GOAL" "{" NAME "}" unary -> goal
          | "INTN" "{" NAME "}" unary -> intention
          | "CAP" "{" NAME "}" unary -> capability
          | "(" formula ")"
          | "[" formula "]"
          | atom

    ?atom: "true" -> true
         | "false" -> false
         | NAME -> name
         | NAME "=" VALUE -> name_eq
         | ESCAPED_STRING -> quoted

    pair: "{" NAME "," NAME "}"

    bound: cmp NUMBER -> bound_value
         | cmp "?" -> bound_query
         | "=" "?" -> bound_plain_query

    !cmp: "<=" | ">=" | "<" | ">"

    NUMBER: /\d+(\.\d+)?(\/\d+)?/
    VALUE: /[A-Za-z0-9_.\-]+/

    %import common.CNAME -> NAME
    %import common.INT
    %import common.ESCAPED_STRING
    %import common.WS
    %ignore WS
"""

formula_parser = Lark(FORMULA_GRAMMAR, parser="lalr", lexer="contextual")


@v_args(inline=True)
class FormulaBuilder(Transformer):
    """Turn the lark tree into formula dataclasses, resolving names against a model."""

    def __init__(self, model=None):
        super().__init__()
        self.model = model

    def _agent(self, token: Token) -> str:
        name = str(token)
        if self.model is not None and name not in self.model.agents:
            raise UnknownSymbolError(f"unknown agent '{name}'", token.line, token.column)
        return name

    def _atom(self, name: str, token: Token) -> Atom:
        if self.model is not None and name not in self.model.all_propositions:
            raise UnknownSymbolError(f"unknown proposition '{name}'", token.line, token.column)
        return Atom(name)

    # Bounds

    def cmp(self, token):
        return str(token)

    def bound_value(self, cmp, number):
        try:
            value = Fraction(str(number))
        except ZeroDivisionError:
            raise FormulaSyntaxError(f"bound '{number}' has a zero denominator", number.line, number.column)
        if not 0 <= value <= 1:
            raise FormulaSyntaxError(f"bound '{number}' outside [0, 1]", number.line, number.column)
        return (cmp, value)

    def bound_query(self, cmp):
        return (cmp, None)

    def bound_plain_query(self):
        return (QUERY, None)

    def pair(self, truster, trustee):
        return (self._agent(truster), self._agent(trustee))

    # Atoms

    def true(self):
        return Const(True)

    def false(self):
        return Const(False)

    def name(self, token):
        return self._atom(str(token), token)

    def name_eq(self, token, value):
        return self._atom(f"{token}={value}", token)

    def quoted(self, token):
        text = str(token)[1:-1].replace('\\"', '"').replace("\\\\", "\\")
        return self._atom(text, token)

    # Connectives

    def imply(self, left, right):
        return implies(left, right)

    def or_op(self, left, right):
        return Or(left, right)

    def and_op(self, left, right):
        return And(left, right)

    def not_op(self, arg):
        return Not(arg)

    # Temporal

    def until(self, left, right):
        return Until(left, right)

    def bounded_until(self, left, k, right):
        return Until(left, right, int(k))

    def release(self, left, right):
        return Release(left, right)

    def next_op(self, arg):
        return Next(arg)

    def eventually(self, arg):
        return Eventually(arg)

    def bounded_eventually(self, k, arg):
        return Eventually(arg, int(k))

    def globally(self, arg):
        return Globally(arg)

    # Quantifiers, beliefs and trust

    def forall(self, arg):
        return ForAll(arg)

    def exists(self, arg):
        return Exists(arg)

    def prob(self, bound, arg):
        return Prob(bound[0], bound[1], arg)

    def belief(self, agent, bound, arg):
        return Belief(self._agent(agent), bound[0], bound[1], arg)

    def competence(self, pair, bound, arg):
        return CompetenceTrust(pair[0], pair[1], bound[0], bound[1], arg)

    def disposition(self, pair, bound, arg):
        return DispositionTrust(pair[0], pair[1], bound[0], bound[1], arg)

    def strong(self, pair, bound, arg):
        return StrongDependence(pair[0], pair[1], bound[0], bound[1], arg)

    def strong_qualitative(self, pair, arg):
        return QualitativeDependence(pair[0], pair[1], arg)

    def weak(self, pair, cmp, arg):
        return WeakDependence(pair[0], pair[1], cmp, arg)

    def goal(self, agent, arg):
        return GoalOp(self._agent(agent), arg)

    def intention(self, agent, arg):
        return IntentionOp(self._agent(agent), arg)

    def capability(self, agent, arg):
        return CapabilityOp(self._agent(agent), arg)


def parse_formula(text: str, model=None) -> Formula:
    """Parse a formula; with a model, agent and proposition names must resolve."""
    try:
        tree = formula_parser.parse(text)
    except UnexpectedCharacters as e:
        raise FormulaSyntaxError(f"unexpected character '{text[e.pos_in_stream]}'", e.line, e.column)
    except UnexpectedEOF:
        lines = text.splitlines() or [""]
        raise FormulaSyntaxError("unexpected end of formula", len(lines), len(lines[-1]) + 1)
    except UnexpectedToken as e:
        if e.token.type == "$END":
            lines = text.splitlines() or [""]
            raise FormulaSyntaxError("unexpected end of formula", len(lines), len(lines[-1]) + 1)
        raise FormulaSyntaxError(f"unexpected '{e.token}'", e.line, e.column)
    except UnexpectedInput as e:
        raise FormulaSyntaxError("malformed formula", e.line, e.column)
    try:
        formula = FormulaBuilder(model).transform(tree)
    except VisitError as e:
        raise e.orig_exc
    log.debug(f" parsed formula {formula}")
    return formula
