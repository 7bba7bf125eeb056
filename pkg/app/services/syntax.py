"""Concrete syntax for fluted formulas.

Grammar (whitespace insignificant, ``#`` starts a comment)::

    document := header formula
    header   := ["sig" "{" [decl ("," decl)*] "}"] ["trans" "{" [name ("," name)*] "}"] ["eq"]
    decl     := name "/" arity
    formula  := "true" | "false" | name | "=" | "!" formula
              | "forall" formula | "exists" formula
              | "(" formula ")"
              | "(" formula (op formula)+ ")"       op one of & | ^, not mixed
              | "(" formula "->" formula ")"
"""
import re
from dataclasses import dataclass
from typing import List, Optional, Tuple

from app.errors import ArityExceedsContext, FlutedSyntaxError
from app.models.formula import (
    EQUALITY, TRUE, FALSE, And, Atom, Bottom, Exists, Forall, Formula, Implies,
    Not, Or, Predicate, PredicateKind, Signature, Top, Xor,
)

KEYWORDS = {"true", "false", "forall", "exists", "sig", "trans", "eq"}

_TOKEN = re.compile(r"\s+|#[^\n]*|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<num>[0-9]+)|(?P<op>->|[!&|^()=,{}/])")

_BINARY = {"&": And, "|": Or, "^": Xor}
_SYMBOL = {And: "&", Or: "|", Xor: "^"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    position: int


@dataclass(frozen=True)
class Validation:
    quantifier_depth: int
    max_arity: int
    variable_bound: int


def tokenize(text: str) -> List[Token]:
    tokens = []
    position = 0
    while position < len(text):
        match = _TOKEN.match(text, position)
        if match is None:
            raise FlutedSyntaxError(f"unexpected character {text[position]!r}", position)
        if match.lastgroup:
            tokens.append(Token(match.lastgroup, match.group(), position))
        position = match.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, signature: Optional[Signature] = None):
        self.tokens = tokenize(text)
        self.index = 0
        self.signature = signature

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def advance(self) -> Token:
        token = self.current
        self.index += 1
        return token

    def accept(self, text: str) -> bool:
        if self.current.text == text and self.current.kind != "end":
            self.index += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if self.current.text != text or self.current.kind == "end":
            found = self.current.text or "end of input"
            raise FlutedSyntaxError(f"expected '{text}' but found '{found}'", self.current.position)
        return self.advance()

    def expect_name(self) -> Token:
        token = self.current
        if token.kind != "name" or token.text in KEYWORDS:
            raise FlutedSyntaxError("expected a predicate name", token.position)
        return self.advance()

    def header(self) -> Signature:
        ordinary: List[Tuple[str, int]] = []
        transitive: List[str] = []
        if self.accept("sig"):
            self.expect("{")
            if self.current.text != "}":
                while True:
                    name = self.expect_name().text
                    self.expect("/")
                    if self.current.kind != "num":
                        raise FlutedSyntaxError("expected an arity", self.current.position)
                    ordinary.append((name, int(self.advance().text)))
                    if not self.accept(","):
                        break
            self.expect("}")
        if self.accept("trans"):
            self.expect("{")
            if self.current.text != "}":
                while True:
                    transitive.append(self.expect_name().text)
                    if not self.accept(","):
                        break
            self.expect("}")
        equality = self.accept("eq")
        try:
            return Signature.build(ordinary, transitive, equality=equality)
        except ValueError as exc:
            raise FlutedSyntaxError(str(exc), 0) from exc

    def formula(self) -> Formula:
        token = self.current
        if token.kind == "end":
            raise FlutedSyntaxError("unexpected end of input", token.position)
        if token.text == "true":
            self.advance()
            return TRUE
        if token.text == "false":
            self.advance()
            return FALSE
        if token.text == "forall":
            self.advance()
            return Forall(self.formula())
        if token.text == "exists":
            self.advance()
            return Exists(self.formula())
        if token.text == "!":
            self.advance()
            return Not(self.formula())
        if token.text == "(":
            return self.group()
        if token.text == "=":
            self.advance()
            return Atom(self.predicate(EQUALITY, token.position))
        if token.kind == "name" and token.text not in KEYWORDS:
            self.advance()
            return Atom(self.predicate(token.text, token.position))
        raise FlutedSyntaxError(f"unexpected token '{token.text}'", token.position)

    def group(self) -> Formula:
        self.expect("(")
        first = self.formula()
        if self.accept(")"):
            return first
        op = self.current
        if op.text == "->":
            self.advance()
            right = self.formula()
            self.expect(")")
            return Implies(first, right)
        if op.text not in _BINARY:
            raise FlutedSyntaxError(f"expected a connective but found '{op.text}'", op.position)
        parts = [first]
        while self.accept(op.text):
            parts.append(self.formula())
        if self.current.text in _BINARY or self.current.text == "->":
            raise FlutedSyntaxError("connectives may not be mixed without parentheses", self.current.position)
        self.expect(")")
        return _BINARY[op.text](tuple(parts))

    def predicate(self, name: str, position: int) -> Predicate:
        if self.signature is None:
            raise FlutedSyntaxError("no signature in scope", position)
        return self.signature.lookup(name)

    def finish(self):
        if self.current.kind != "end":
            raise FlutedSyntaxError(f"trailing input '{self.current.text}'", self.current.position)


def parse(text: str, signature: Signature) -> Formula:
    """Parse a formula over a known signature"""
    parser = _Parser(text, signature)
    formula = parser.formula()
    parser.finish()
    return formula


def parse_document(text: str) -> Tuple[Signature, Formula]:
    """Parse a header followed by a formula"""
    parser = _Parser(text)
    parser.signature = parser.header()
    formula = parser.formula()
    parser.finish()
    return parser.signature, formula


def parse_header(text: str) -> Signature:
    parser = _Parser(text)
    signature = parser.header()
    parser.finish()
    return signature


def print_formula(formula: Formula) -> str:
    if isinstance(formula, Top):
        return "true"
    if isinstance(formula, Bottom):
        return "false"
    if isinstance(formula, Atom):
        return formula.pred.name
    if isinstance(formula, Not):
        return "!" + print_formula(formula.body)
    if isinstance(formula, Forall):
        return "forall " + print_formula(formula.body)
    if isinstance(formula, Exists):
        return "exists " + print_formula(formula.body)
    if isinstance(formula, Implies):
        return f"({print_formula(formula.left)} -> {print_formula(formula.right)})"
    if len(formula.parts) == 1:
        return print_formula(formula.parts[0])
    if not formula.parts:
        return "true" if isinstance(formula, And) else "false"
    symbol = f" {_SYMBOL[type(formula)]} "
    return "(" + symbol.join(print_formula(p) for p in formula.parts) + ")"


def print_header(signature: Signature) -> str:
    ordinary = [p for p in signature if p.kind == PredicateKind.ORDINARY]
    parts = ["sig { " + ", ".join(f"{p.name}/{p.arity}" for p in ordinary) + " }"]
    if signature.transitive:
        parts.append("trans { " + ", ".join(p.name for p in signature.transitive) + " }")
    if signature.equality is not None:
        parts.append("eq")
    return " ".join(parts)


def print_document(signature: Signature, formula: Formula) -> str:
    return print_header(signature) + "\n" + print_formula(formula) + "\n"


def validate(formula: Formula, free_prefix: int = 0) -> Validation:
    """Check every atom fits its context and report depth figures.

    Raises ArityExceedsContext naming the first offending atom.
    """
    depth = 0
    arity = 0
    stack = [(formula, free_prefix, 0)]
    while stack:
        node, context, nesting = stack.pop()
        depth = max(depth, nesting)
        if isinstance(node, Atom):
            if node.pred.arity > context:
                raise ArityExceedsContext(node.pred.name, node.pred.arity, context)
            arity = max(arity, node.pred.arity)
        elif isinstance(node, (Forall, Exists)):
            stack.append((node.body, context + 1, nesting + 1))
        elif isinstance(node, Not):
            stack.append((node.body, context, nesting))
        elif isinstance(node, Implies):
            stack.append((node.left, context, nesting))
            stack.append((node.right, context, nesting))
        elif isinstance(node, (And, Or, Xor)):
            stack.extend((p, context, nesting) for p in node.parts)
    return Validation(depth, arity, free_prefix + depth)


def render_with_variables(formula: Formula, start: int = 0) -> str:
    """Render with explicit variables x1, x2, ... for readers of ordinary first-order syntax"""

    def render(node: Formula, depth: int) -> str:
        if isinstance(node, Top):
            return "true"
        if isinstance(node, Bottom):
            return "false"
        if isinstance(node, Atom):
            pred = node.pred
            if pred.arity == 0:
                return pred.name
            args = [f"x{i}" for i in range(depth - pred.arity + 1, depth + 1)]
            if pred.kind == PredicateKind.EQUALITY:
                return f"({args[0]} = {args[1]})"
            return f"{pred.name}({','.join(args)})"
        if isinstance(node, Not):
            return "!" + render(node.body, depth)
        if isinstance(node, Forall):
            return f"forall x{depth + 1} " + render(node.body, depth + 1)
        if isinstance(node, Exists):
            return f"exists x{depth + 1} " + render(node.body, depth + 1)
        if isinstance(node, Implies):
            return f"({render(node.left, depth)} -> {render(node.right, depth)})"
        symbol = f" {_SYMBOL[type(node)]} "
        return "(" + symbol.join(render(p, depth) for p in node.parts) + ")"

    return render(formula, start)
