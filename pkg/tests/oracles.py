"""Reference implementations that share no code with the package internals."""
from equichern.reference import brute_product, dense_exp, left_mult_matrix, perm_sign, subset_list  # noqa: F401
