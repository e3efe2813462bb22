"""Group analysis toolkit for generalized Burgers-KdV equations
u_t + C(t,x) u u_x = sum_k A^k(t,x) u_k + B(t,x)."""

__version__ = "0.1.0"
