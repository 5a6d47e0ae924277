"""
Expression language for elements of a loop model.

    expr   := tterm (('+' | '-') tterm)*
    tterm  := term ('(x)' term)?
    term   := factor ('*' factor)*
    factor := '-' factor | primary ('^' '-'? INT)?
    primary:= NUMBER ('/' NUMBER)? | IDENT | '(' expr ')'

The literal token ``(x)`` is always the tensor separator. ``x^-n`` is accepted
for generators with an inverse partner and denotes the partner's n-th power.
"""
import logging
import re
from typing import List, NamedTuple, Optional, Sequence, Union

from src.exceptions import AlgebraMismatchError, ParseError, UnknownGeneratorError
from src.models import Element, LoopElement, LoopModel, PresentedAlgebra, Scalar

logger = logging.getLogger(__name__)

Value = Union[Scalar, Element, LoopElement]


class Token(NamedTuple):
    kind: str
    text: str
    position: int


_TOKEN = re.compile(r"""
    (?P<space>\s+)
  | (?P<tensor>\(x\))
  | (?P<number>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*^/()])
""", re.VERBOSE)


def tokenize(source: str) -> List[Token]:
    tokens: List[Token] = []
    position = 0
    while position < len(source):
        match = _TOKEN.match(source, position)
        if match is None:
            raise ParseError(f"Unexpected character {source[position]!r}", position)
        kind = match.lastgroup
        if kind != "space":
            tokens.append(Token(kind if kind != "op" else match.group(), match.group(), position))
        position = match.end()
    tokens.append(Token("end", "", len(source)))
    return tokens


class Parser:
    """Evaluates an expression directly against a model or a single algebra."""

    def __init__(self, source: str, target: Union[LoopModel, PresentedAlgebra]) -> None:
        self.source = source
        self.tokens = tokenize(source)
        self.index = 0
        if isinstance(target, LoopModel):
            self.model: Optional[LoopModel] = target
            self.algebras = {"omega": target.omega, "base": target.base}
            self.ring = target.ring
        else:
            self.model = None
            self.algebras = {"single": target}
            self.ring = target.ring
        self.side: Optional[str] = None

    # --- Token stream -------------------------------------------------------

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def advance(self) -> Token:
        token = self.current
        self.index += 1
        return token

    def expect(self, kind: str, expected: Sequence[str]) -> Token:
        if self.current.kind != kind:
            self.fail(expected)
        return self.advance()

    def fail(self, expected: Sequence[str]) -> None:
        token = self.current
        found = "end of input" if token.kind == "end" else repr(token.text)
        raise ParseError(f"Unexpected {found}", token.position, list(expected))

    # --- Grammar ------------------------------------------------------------

    def parse(self) -> Value:
        value = self.expr()
        if self.current.kind != "end":
            self.fail(["+", "-", "*", "(x)", "end of input"])
        return value

    def expr(self) -> Value:
        value = self.tterm()
        while self.current.kind in ("+", "-"):
            op = self.advance().kind
            right = self.tterm()
            value = self.add(value, right) if op == "+" else self.add(value, self.negate(right))
        return value

    def tterm(self) -> Value:
        start = self.current.position
        left = self.term()
        if self.current.kind != "tensor":
            return left
        if self.model is None or self.side is not None:
            self.fail(["+", "-", "*", ")"])
        self.advance()
        self.side = "base"
        try:
            right = self.term()
        finally:
            self.side = None
        return self.tensor(left, right, start)

    def term(self) -> Value:
        value = self.factor()
        while self.current.kind == "*":
            self.advance()
            value = self.multiply(value, self.factor())
        return value

    def factor(self) -> Value:
        if self.current.kind == "-":
            self.advance()
            return self.negate(self.factor())
        token = self.current
        if token.kind == "ident":
            self.advance()
            exponent = self.exponent()
            return self.generator(token, exponent)
        value = self.primary()
        exponent = self.exponent()
        if exponent is None:
            return value
        if exponent < 0:
            raise ParseError("Negative exponents apply to invertible generators only", token.position)
        return self.power(value, exponent)

    def exponent(self) -> Optional[int]:
        if self.current.kind != "^":
            return None
        self.advance()
        negative = False
        if self.current.kind == "-":
            self.advance()
            negative = True
        digits = self.expect("number", ["integer exponent"])
        return -int(digits.text) if negative else int(digits.text)

    def primary(self) -> Value:
        token = self.current
        if token.kind == "number":
            self.advance()
            text = token.text
            if self.current.kind == "/":
                self.advance()
                text += "/" + self.expect("number", ["denominator"]).text
            return Scalar(self.ring, self.ring.parse(text))
        if token.kind == "(":
            self.advance()
            value = self.expr()
            self.expect(")", [")"])
            return value
        self.fail(["number", "generator", "("])

    # --- Semantics ----------------------------------------------------------

    def generator(self, token: Token, exponent: Optional[int]) -> Element:
        name = token.text
        sides = [self.side] if self.side in self.algebras else list(self.algebras)
        for side in sides:
            algebra = self.algebras[side]
            if name not in algebra.index:
                continue
            i = algebra.index[name]
            if exponent is None:
                return algebra.gen(name)
            if exponent >= 0:
                return self.power(algebra.gen(name), exponent)
            partner = algebra.inverse_of.get(i)
            if partner is None:
                raise ParseError(f"Generator {name} has no inverse; negative exponent not allowed", token.position)
            return self.power(algebra.gen(algebra.names[partner]), -exponent)
        raise UnknownGeneratorError(name, token.position)

    def negate(self, value: Value) -> Value:
        return -value

    def promote(self, value: Value) -> Union[Element, LoopElement]:
        """Scalars become multiples of the unit; with a model, everything becomes a loop element."""
        if isinstance(value, Scalar):
            if self.model is None:
                return self.algebras["single"].one().scale(value)
            return self.model.unit().scale(value)
        if self.model is not None and isinstance(value, Element):
            return self.model.lift(value)
        return value

    def add(self, left: Value, right: Value) -> Value:
        if isinstance(left, Scalar) and isinstance(right, Scalar):
            return left + right
        if isinstance(left, Element) and isinstance(right, Element) and left.algebra is right.algebra:
            return left + right
        if isinstance(left, Element) and isinstance(right, Scalar):
            return left + left.algebra.one().scale(right)
        if isinstance(left, Scalar) and isinstance(right, Element):
            return right.algebra.one().scale(left) + right
        return self.promote(left) + self.promote(right)

    def multiply(self, left: Value, right: Value) -> Value:
        if isinstance(left, Scalar):
            return left * right if isinstance(right, Scalar) else right.scale(left)
        if isinstance(right, Scalar):
            return left.scale(right)
        if isinstance(left, Element) and isinstance(right, Element) and left.algebra is right.algebra:
            return left * right
        return self.promote(left) * self.promote(right)

    def power(self, value: Value, exponent: int) -> Value:
        if isinstance(value, Scalar):
            result = Scalar(self.ring, self.ring.one)
        elif isinstance(value, Element):
            result = value.algebra.one()
        else:
            result = value.model.unit()
        for _ in range(exponent):
            result = result * value
        return result

    def tensor(self, left: Value, right: Value, position: int) -> LoopElement:
        model = self.model
        if isinstance(left, Scalar):
            left = model.omega.one().scale(left)
        if isinstance(right, Scalar):
            right = model.base.one().scale(right)
        if not (isinstance(left, Element) and left.algebra is model.omega):
            raise ParseError("Left of (x) must be an element of the omega side", position)
        if not (isinstance(right, Element) and right.algebra is model.base):
            raise ParseError("Right of (x) must be an element of the base side", position)
        return model.tensor(left, right)


def parse(text: str, target: Union[LoopModel, PresentedAlgebra]) -> Value:
    """Parse and normalize an element; scalars come back as Scalar."""
    value = Parser(text, target).parse()
    logger.debug("Parsed %r as %s", text, value)
    return value


def as_loop_element(value: Value, model: LoopModel) -> LoopElement:
    if isinstance(value, LoopElement):
        if value.model is not model:
            raise AlgebraMismatchError("Loop element belongs to a different model")
        return value
    if isinstance(value, Scalar):
        return model.unit().scale(value)
    return model.lift(value)


def parse_loop(text: str, model: LoopModel) -> LoopElement:
    return as_loop_element(parse(text, model), model)


def parse_element(text: str, algebra: PresentedAlgebra) -> Element:
    value = parse(text, algebra)
    if isinstance(value, Scalar):
        return algebra.one().scale(value)
    return value
