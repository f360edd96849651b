#include "relutrace/calculus.hpp"

#include "relutrace/blocks.hpp"

#include <cmath>
#include <stdexcept>

namespace rtr {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

// (x) -> (x, beta(x)): the waiting operand rides as a +/- pair.
ReluNetwork with_input_carry(const ReluNetwork& net) {
    const int outs = net.output_dim();
    std::vector<ReluNetwork> parts;
    parts.push_back(select_inputs(build_identity(1), {0}, 1));
    parts.push_back(select_inputs(net, {0}, 1));
    (void)outs;
    return parallel(parts, true);
}

// (x, v...) -> (f(x), v...) consuming x (first coordinate), carrying the rest.
ReluNetwork apply_to_first(const ReluNetwork& net, int carries) {
    const int dim = 1 + carries;
    std::vector<ReluNetwork> parts;
    parts.push_back(select_inputs(net, {0}, dim));
    for (int i = 0; i < carries; ++i)
        parts.push_back(select_inputs(build_identity(1), {1 + i}, dim));
    return parallel(parts, true);
}

// (v..., x) -> (v..., f(x)) consuming the last coordinate.
ReluNetwork apply_to_last(const ReluNetwork& net, int carries) {
    const int dim = 1 + carries;
    std::vector<ReluNetwork> parts;
    for (int i = 0; i < carries; ++i)
        parts.push_back(select_inputs(build_identity(1), {i}, dim));
    parts.push_back(select_inputs(net, {carries}, dim));
    return parallel(parts, true);
}

}  // namespace

ReluNetwork product_nets(const ReluNetwork& alpha_net, const ReluNetwork& beta_net,
                         double sup_alpha, double sup_beta, double eps) {
    if (!(sup_alpha > 0 && sup_beta > 0)) fail("product_nets: sup bounds must be positive");
    if (alpha_net.input_dim() != 1 || beta_net.input_dim() != 1 ||
        alpha_net.output_dim() != 1 || beta_net.output_dim() != 1)
        fail("product_nets: expects 1->1 sub-networks");
    const double U = 2.0 * std::max(sup_alpha, sup_beta);
    ReluNetwork mu = build_multiply(std::max(U, 1.0), eps / 3.0);
    // (x) -> (x, beta) -> (alpha, beta) -> mu
    ChainBuilder chain(with_input_carry(beta_net));
    chain.then(apply_to_first(alpha_net, 1));
    chain.then(mu);
    return chain.finish();
}

ComplexNet product_nets_complex(const ComplexNet& alpha_net, const ComplexNet& beta_net,
                                double sup_alpha, double sup_beta, double eps) {
    if (!(sup_alpha > 0 && sup_beta > 0)) fail("product_nets_complex: sup bounds must be positive");
    const double U = 2.0 * std::max(sup_alpha, sup_beta);
    ReluNetwork mu = build_multiply(std::max(U, 1.0), eps / 4.0);
    // (x) -> (x, b1, b2) -> (a1, a2, b1, b2) -> four products -> combine
    std::vector<ReluNetwork> head;
    head.push_back(select_inputs(build_identity(1), {0}, 1));
    head.push_back(select_inputs(beta_net.net, {0}, 1));
    ChainBuilder chain(parallel(head, true));
    {
        std::vector<ReluNetwork> stage;
        stage.push_back(select_inputs(alpha_net.net, {0}, 3));
        stage.push_back(select_inputs(build_identity(1), {1}, 3));
        stage.push_back(select_inputs(build_identity(1), {2}, 3));
        chain.then(parallel(stage, true));
    }
    {
        std::vector<ReluNetwork> prods;
        prods.push_back(select_inputs(mu, {0, 2}, 4));  // a1 b1
        prods.push_back(select_inputs(mu, {1, 3}, 4));  // a2 b2
        prods.push_back(select_inputs(mu, {0, 3}, 4));  // a1 b2
        prods.push_back(select_inputs(mu, {1, 2}, 4));  // a2 b1
        chain.then(parallel(prods, true));
    }
    Matrix A(2, 4);
    A << 1, -1, 0, 0, 0, 0, 1, 1;
    chain.then_affine(A, Vector::Zero(2));
    return ComplexNet(chain.finish());
}

ReluNetwork multiply_compose(const ReluNetwork& alpha_net, const ReluNetwork& omega_net,
                             const ReluNetwork& beta_net, double sup_alpha, double sup_omega,
                             double sup_beta, double eps) {
    if (!(sup_alpha > 0 && sup_omega > 0 && sup_beta > 0))
        fail("multiply_compose: sup bounds must be positive");
    const double U = 2.0 * std::max(sup_alpha, sup_omega);
    ReluNetwork mu = build_multiply(std::max(U, 1.0), eps / 3.0);
    // (x) -> (x, beta) -> (x, omega(beta)) -> (alpha(x), omega) -> mu
    ChainBuilder chain(with_input_carry(beta_net));
    chain.then(apply_to_last(omega_net, 1));
    chain.then(apply_to_first(alpha_net, 1));
    chain.then(mu);
    return chain.finish();
}

ComplexNet multiply_compose_complex(const ComplexNet& alpha_net, const ComplexNet& omega_net,
                                    const ReluNetwork& beta_net, double sup_alpha,
                                    double sup_omega, double sup_beta, double eps) {
    if (!(sup_alpha > 0 && sup_omega > 0 && sup_beta > 0))
        fail("multiply_compose_complex: sup bounds must be positive");
    const double U = 2.0 * std::max(sup_alpha, sup_omega);
    ReluNetwork mu = build_multiply(std::max(U, 1.0), eps / 12.0);
    // (x) -> (x, beta) -> (x, w1, w2) -> (a1, a2, w1, w2) -> 4 products -> combine
    ChainBuilder chain(with_input_carry(beta_net));
    {
        std::vector<ReluNetwork> stage;
        stage.push_back(select_inputs(build_identity(1), {0}, 2));
        stage.push_back(select_inputs(omega_net.net, {1}, 2));
        chain.then(parallel(stage, true));
    }
    {
        std::vector<ReluNetwork> stage;
        stage.push_back(select_inputs(alpha_net.net, {0}, 3));
        stage.push_back(select_inputs(build_identity(1), {1}, 3));
        stage.push_back(select_inputs(build_identity(1), {2}, 3));
        chain.then(parallel(stage, true));
    }
    {
        std::vector<ReluNetwork> prods;
        prods.push_back(select_inputs(mu, {0, 2}, 4));  // a1 w1
        prods.push_back(select_inputs(mu, {1, 3}, 4));  // a2 w2
        prods.push_back(select_inputs(mu, {0, 3}, 4));  // a1 w2
        prods.push_back(select_inputs(mu, {1, 2}, 4));  // a2 w1
        chain.then(parallel(prods, true));
    }
    Matrix A(2, 4);
    A << 1, -1, 0, 0, 0, 0, 1, 1;
    chain.then_affine(A, Vector::Zero(2));
    return ComplexNet(chain.finish());
}

ReluNetwork build_partition_map(const PartitionSpec& spec) {
    const double H = spec.halfwidth, Dm = spec.D_minus, Dp = spec.D_plus;
    if (!(Dm > 0 && Dp > 0)) fail("partition map: breakpoints must be positive");
    if (!(H >= std::max(Dp, Dm))) fail("partition map: halfwidth below breakpoints (map ill-posed)");
    int m = 2;
    while (H > std::ldexp(1.0, m)) ++m;
    const double s = std::ldexp(1.0, -m);

    std::vector<AffineLayer> layers;
    {
        // four hinge units at the breakpoints plus a constant channel carrying
        // the -3 offset, all in the 2^-m scale
        Matrix W(5, 1);
        W << s, s, s, s, 0;
        Vector b(5);
        b << s * H, s * Dm, 0.0, -s * Dp, 3.0 * s;
        layers.emplace_back(W, b);
    }
    {
        // simultaneous doubling of the five nonnegative units via a shared sum
        Matrix lift = Matrix::Zero(6, 5);
        lift.topLeftCorner(5, 5).setIdentity();
        lift.row(5) << 1, 1, 1, 1, 1;
        layers.emplace_back(lift, Vector::Zero(6));
        Matrix dbl(6, 6);
        for (int i = 0; i < 5; ++i) {
            for (int j = 0; j < 5; ++j) dbl(i, j) = (i == j) ? 1.0 : -1.0;
            dbl(i, 5) = 1.0;
        }
        dbl.row(5).setOnes();
        for (int j = 0; j < m; ++j) layers.emplace_back(dbl, Vector::Zero(6));
    }
    // Hinge coefficients are slope differences of the four branches, with the
    // middle branches mapping (-D-,0) onto (-2,0) and (0,D+) onto (0,2).
    const double s1 = 1.0 / (H - Dm), s2 = 2.0 / Dm, s3 = 2.0 / Dp, s4 = 1.0 / (H - Dp);
    Matrix Wo = Matrix::Zero(1, 6);
    Wo(0, 0) = s1;
    Wo(0, 1) = s2 - s1;
    Wo(0, 2) = s3 - s2;
    Wo(0, 3) = s4 - s3;
    Wo(0, 4) = -1.0;
    layers.emplace_back(Wo, Vector::Zero(1));
    return ReluNetwork(std::move(layers));
}

ComplexNet glue_partition(const ReluNetwork& T, const std::vector<ComplexNet>& pieces,
                          double lambda_sup, double eps) {
    if (pieces.size() != 7) fail("glue_partition: expects 7 pieces for l = -3..3");
    const double mu_dom = 2.0 * std::max(lambda_sup, 1.0);
    ReluNetwork mu = build_multiply(mu_dom, eps);

    // state (x_keep, x_use, S_re, S_im)
    Matrix A0(4, 1);
    A0 << 1, 1, 0, 0;
    ChainBuilder chain(affine_network(A0, Vector::Zero(4)));
    for (int l = -3; l <= 3; ++l) {
        const ComplexNet& piece = pieces[static_cast<size_t>(l + 3)];
        ReluNetwork chiT = compose(build_hat(static_cast<double>(l)), T);
        {
            // (x_keep, x_use, S) -> (x_keep, chiT(x_use), piece(x_use), S)
            std::vector<ReluNetwork> stage;
            stage.push_back(select_inputs(build_identity(1), {0}, 4));
            stage.push_back(select_inputs(chiT, {1}, 4));
            stage.push_back(select_inputs(piece.net, {1}, 4));
            stage.push_back(select_inputs(build_identity(1), {2}, 4));
            stage.push_back(select_inputs(build_identity(1), {3}, 4));
            chain.then(parallel(stage, true));
        }
        {
            // (x, u, p1, p2, S1, S2) -> (x, mu(u,p1), mu(u,p2), S1, S2)
            std::vector<ReluNetwork> stage;
            stage.push_back(select_inputs(build_identity(1), {0}, 6));
            stage.push_back(select_inputs(mu, {1, 2}, 6));
            stage.push_back(select_inputs(mu, {1, 3}, 6));
            stage.push_back(select_inputs(build_identity(1), {4}, 6));
            stage.push_back(select_inputs(build_identity(1), {5}, 6));
            chain.then(parallel(stage, true));
        }
        // accumulate and refan x into (x_keep, x_use)
        Matrix A = Matrix::Zero(4, 5);
        A(0, 0) = 1;
        A(1, 0) = 1;
        A(2, 1) = 1;
        A(2, 3) = 1;
        A(3, 2) = 1;
        A(3, 4) = 1;
        chain.then_affine(A, Vector::Zero(4));
    }
    Matrix P(2, 4);
    P << 0, 0, 1, 0, 0, 0, 0, 1;
    chain.then_affine(P, Vector::Zero(2));
    return ComplexNet(chain.finish());
}

}  // namespace rtr
