#pragma once

// Scalar special functions needed by the heavy-tailed margins: log-beta,
// the regularized incomplete beta function, and the Student t distribution
// pieces built on top of it.

namespace tailex::special {

// log B(a,b)
double lbeta(double a, double b);

// Regularized incomplete beta I_x(a,b) for a,b > 0, x in [0,1].
// Continued-fraction (modified Lentz) evaluation with the usual symmetry
// switch at x = (a+1)/(a+b+2); absolute accuracy ~1e-14.
double ibeta(double a, double b, double x);

// Student t with z > 0 degrees of freedom.
double student_pdf(double t, double z);
double student_cdf(double t, double z);
double student_survival(double t, double z);

// E[(T - x)_+] for T ~ t_z, z > 1. Equals ((z+x^2)/(z-1))*pdf(x) - x*sf(x).
double student_upper_partial_moment(double x, double z);

// K with student_survival(t,z) ~ K * t^{-z} as t -> +inf.
double student_tail_constant(double z);

// Inverse of student_survival in t for q in (0,1).
double student_quantile_from_survival(double q, double z);

} // namespace tailex::special
