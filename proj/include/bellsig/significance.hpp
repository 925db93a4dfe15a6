#pragma once

namespace bellsig {

// log Prob(X >= xi) for X ~ chi^2 with an even number of degrees of freedom.
// Stays finite for xi far beyond the double underflow of p itself.
double chi2_log_survival(double xi, int dof);

// log erfc(z) for z >= 0 without underflow.
double log_erfc(double z);

// log Prob(|Z| > s) for a standard normal Z.
double log_normal_two_sided_tail(double s);

// Inverse of log_normal_two_sided_tail: the s >= 0 with Prob(|Z| > s) = exp(log_p).
double sigma_from_log_p(double log_p);

}  // namespace bellsig
