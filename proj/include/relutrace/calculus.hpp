#pragma once

// Products and products-of-compositions of emulated functions (real and
// complex), and the partition-of-unity gluing apparatus over the
// wavenumber-dependent interval I_kappa.
//
// Width accounting (documented; the assembled stats match these exactly):
//   product_nets:            max{2+M_beta, 2+M_alpha, 5}
//   multiply_compose:        max{2+M_beta, 2+M_omega, 2+M_alpha, 5}
//   product_nets_complex:    max{2+M_beta, 4+M_alpha, 20}
//   multiply_compose_complex max{2+M_beta, 2+M_omega, 4+M_alpha, 20}
// The real-case formulas agree with the governing lemmas whenever
// M_beta >= M_alpha; the complex cases reproduce the lemma values verbatim
// (the final stage runs the four cross multiplications in parallel).

#include "relutrace/net.hpp"

namespace rtr {

// |alpha*beta - out| <= eps on the interval, provided the sub-nets meet the
// eps/(3|beta|), eps/(6|alpha|) budgets. sup bounds are the declared ones.
ReluNetwork product_nets(const ReluNetwork& alpha_net, const ReluNetwork& beta_net,
                         double sup_alpha, double sup_beta, double eps);

ComplexNet product_nets_complex(const ComplexNet& alpha_net, const ComplexNet& beta_net,
                                double sup_alpha, double sup_beta, double eps);

// f = alpha * (omega o beta); omega_net must cover (-2|beta|, 2|beta|).
ReluNetwork multiply_compose(const ReluNetwork& alpha_net, const ReluNetwork& omega_net,
                             const ReluNetwork& beta_net, double sup_alpha, double sup_omega,
                             double sup_beta, double eps);

ComplexNet multiply_compose_complex(const ComplexNet& alpha_net, const ComplexNet& omega_net,
                                    const ReluNetwork& beta_net, double sup_alpha,
                                    double sup_omega, double sup_beta, double eps);

// Four-branch piecewise-affine map of I_kappa onto [-3,3] with breakpoints at
// -halfwidth, -D_minus, 0, D_plus, halfwidth.
struct PartitionSpec {
    double halfwidth = 0;  // kappa^{1/3} A
    double D_minus = 0;
    double D_plus = 0;
};

// Exact realization with unit-bounded weights (scale-in + simultaneous
// doubling of the four hinge units); depth <= log2(halfwidth) + 5, width 5.
ReluNetwork build_partition_map(const PartitionSpec& spec);

// sum over l of mu(chi_l o T, piece_l); pieces indexed l = -3..3. Each piece
// must be eps-accurate where chi_l o T is supported; the glued output is then
// within 6*eps of the target on I_kappa. lambda_sup bounds |pieces|.
ComplexNet glue_partition(const ReluNetwork& T, const std::vector<ComplexNet>& pieces,
                          double lambda_sup, double eps);

}  // namespace rtr
