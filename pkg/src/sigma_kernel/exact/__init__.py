from .fields import QQ, GF, FunctionField, PrimeField, RatFunc, RationalField
from .poly import MultiPoly, grlex, lex, block_order
from .groebner import Membership, groebner, ideal_membership
