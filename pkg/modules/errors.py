# modules/errors.py
# Exception types shared by the workbench modules


class MorextError(Exception):
    """Base class for every workbench failure"""


class FieldMismatch(MorextError):
    """Operands come from different fields or carry foreign entries"""


class DimensionMismatch(MorextError):
    """Shapes of operands do not fit together"""


class NotPrime(MorextError):
    """Modulus of a prime field is not prime"""


class AssociativityViolation(MorextError):
    """(e_i e_j) e_k != e_i (e_j e_k)"""

    def __init__(self, i: int, j: int, k: int):
        super().__init__(f"associativity fails on basis triple ({i}, {j}, {k})")
        self.i, self.j, self.k = i, j, k


class UnitViolation(MorextError):
    """Claimed unit does not act as identity on a basis vector"""

    def __init__(self, i: int):
        super().__init__(f"unit law fails on basis vector {i}")
        self.i = i


class NotAGroup(MorextError):
    pass


class ParentMismatch(MorextError):
    pass


class NotInCentralizer(MorextError):
    """Element is required to commute with the subalgebra B"""


class BimoduleActionError(MorextError):
    """Action tables are not associative, unital or commuting"""


class LeibnizViolation(MorextError):
    pass


class NotBimoduleMap(MorextError):
    pass


class NotIdempotent(MorextError):
    pass


class ProductNotWellDefined(MorextError):
    """A relation generator of a tensor quotient does not map to zero"""


class NotBPrimeCentral(MorextError):
    pass


class UnsupportedClass(MorextError):
    pass


class ImplicationViolation(MorextError):
    """A class report contradicts a known implication between classes"""


class ParseError(MorextError):
    """Malformed extension document"""

    def __init__(self, message: str, line: int = None, field: str = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field:
            where.append(f"field {field}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.line = line
        self.field = field


class ValidationError(MorextError):
    """Parsed document does not describe a valid extension"""


class UnknownCatalogEntry(MorextError):
    pass
