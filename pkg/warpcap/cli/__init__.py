from .expression import Expression, parse_expression, symbolic_s_derivative
