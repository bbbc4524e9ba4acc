#pragma once

#include "wqed/types.hpp"

namespace wqed {

// Divided differences of exp: exp_dd1(a, b) = e[a, b], exp_dd2(a, b, c) = e[a, b, c].
// Stable for clustered and coincident nodes.
cplx exp_dd1(cplx a, cplx b);
cplx exp_dd2(cplx a, cplx b, cplx c);
// (e^z - 1) / z
cplx phi1(cplx z);

// Time-domain kernels of the incoherent part (gamma_1d = 1).
// The removable coincidences are handled by the confluent forms below
// whenever a separation drops under kConfluenceTolerance.
cplx kernel_L(cplx w_nu, cplx w_mu, cplx eps_r, double t1, double t2);
cplx kernel_M(cplx w_nu, cplx w_mu, cplx eps_r, cplx eps_s, double t1, double t2);

namespace detail {
// Closed forms with explicit 1/(eps - mean) denominators.
cplx kernel_L_generic(cplx w_nu, cplx w_mu, cplx eps_r, double t1, double t2);
cplx kernel_M_generic(cplx w_nu, cplx w_mu, cplx eps_r, cplx eps_s, double t1, double t2);
// Divided-difference forms; finite for every coincidence.
cplx kernel_L_confluent(cplx w_nu, cplx w_mu, cplx eps_r, double t1, double t2);
cplx kernel_M_confluent(cplx w_nu, cplx w_mu, cplx eps_r, cplx eps_s, double t1, double t2);
}  // namespace detail

}  // namespace wqed
