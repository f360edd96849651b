#pragma once

// Feedforward ReLU networks: representation, evaluation, algebra and
// accounting. A network is a finite list of affine layers; ReLU is applied
// between consecutive layers and never after the last one.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace rtr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Complex = std::complex<double>;

struct AffineLayer {
    Matrix W;  // shape (out x in)
    Vector b;  // length out

    AffineLayer() = default;
    AffineLayer(Matrix w, Vector bias) : W(std::move(w)), b(std::move(bias)) {}
    int in_dim() const { return static_cast<int>(W.cols()); }
    int out_dim() const { return static_cast<int>(W.rows()); }
};

struct NetworkStats {
    std::int64_t depth = 0;       // number of affine maps L
    std::int64_t width = 0;       // max(l_1..l_L)
    double weight_bound = 0.0;    // max |entry| over all W_k, b_k
};

// Immutable after construction by convention; evaluation is pure.
class ReluNetwork {
  public:
    ReluNetwork() = default;
    explicit ReluNetwork(std::vector<AffineLayer> layers);

    int input_dim() const { return layers_.empty() ? 0 : layers_.front().in_dim(); }
    int output_dim() const { return layers_.empty() ? 0 : layers_.back().out_dim(); }
    std::int64_t depth() const { return static_cast<std::int64_t>(layers_.size()); }
    bool empty() const { return layers_.empty(); }
    const std::vector<AffineLayer>& layers() const { return layers_; }

    // Forward pass on a batch; columns are input points.
    Matrix evaluate(const Matrix& points) const;
    Vector evaluate(const Vector& point) const;
    double evaluate1(double x) const;  // 1->1 convenience

    void validate() const;  // throws std::invalid_argument on malformed nets

  private:
    std::vector<AffineLayer> layers_;
};

// Network with two outputs by the Re/Im convention.
struct ComplexNet {
    ReluNetwork net;

    ComplexNet() = default;
    explicit ComplexNet(ReluNetwork n);
    Complex evaluate(double x) const;
    std::vector<Complex> evaluate(const std::vector<double>& xs) const;
};

NetworkStats stats(const ReluNetwork& net);
inline NetworkStats stats(const ComplexNet& net) { return stats(net.net); }

// g after f with the boundary affines merged (no ReLU between them), so
// depth(compose(g,f)) = depth(g) + depth(f) - 1.
ReluNetwork compose(const ReluNetwork& outer, const ReluNetwork& inner);

// Stacks networks side by side. With shared_input=true all sub-nets read the
// same input vector; otherwise inputs are concatenated block-wise. Sub-nets of
// unequal depth are padded at the output end with exact identity (rho(x),
// rho(-x)) pairs, so depth(parallel(...)) = max_i depth_i and the padded
// layers have width 2*out_dim_i.
ReluNetwork parallel(const std::vector<ReluNetwork>& nets, bool shared_input);

// Exactly representable primitives.
ReluNetwork build_identity(int dim = 1);            // rho(x) - rho(-x), L=2, M=2*dim
ReluNetwork build_const_one();                      // constant 1 on all of R, L=2, M=4
ReluNetwork build_linear(double alpha, double beta);  // (x,y) -> alpha*x + beta*y, L=2, M=4
ReluNetwork build_hat(double center);               // chi(x - center), L=2, M=3

// x -> A x + b realized exactly with weights bounded by 1
// (repeated-doubling decomposition; L <= floor(log2(max|entry|)) + 5,
// M <= max(in_dim, 3*out_dim)).
ReluNetwork bounded_affine(const Matrix& A, const Vector& b);

// Exact multiplication by 2^m (m>=0) with unit weights, width 3 per
// coordinate; used to trade large scale factors for depth.
ReluNetwork scale_by_pow2(int m, int dim = 1);

// Rewires the first layer to read the given coordinates of a wider input
// vector (exact, no depth/width change).
ReluNetwork select_inputs(const ReluNetwork& net, const std::vector<int>& coords, int total_in);

// Exact affine maps fused onto a network boundary (depth unchanged: the
// affine merges into the adjacent layer).
ReluNetwork append_affine(const Matrix& A, const Vector& b, const ReluNetwork& net);   // x -> A net(x) + b
ReluNetwork prepend_affine(const ReluNetwork& net, const Matrix& A, const Vector& b);  // x -> net(A x + b)

// Single affine map as a depth-1 network.
ReluNetwork affine_network(const Matrix& A, const Vector& b);

// Incremental chain assembly with boundary merging; equivalent to repeated
// compose() but without quadratic copying of the accumulated layer list.
class ChainBuilder {
  public:
    explicit ChainBuilder(const ReluNetwork& init);
    void then(const ReluNetwork& next);                 // chain := next o chain
    void then_affine(const Matrix& A, const Vector& b); // chain := (Ax+b) o chain
    ReluNetwork finish();
    int output_dim() const { return layers_.empty() ? 0 : layers_.back().out_dim(); }

  private:
    std::vector<AffineLayer> layers_;
};

// Canonical text serialization (.relunet): versioned header, row-major
// weights then bias per layer, shortest round-trip decimal rendering.
std::string serialize(const ReluNetwork& net);
ReluNetwork deserialize(const std::string& text);
void save_network(const ReluNetwork& net, const std::string& path);
ReluNetwork load_network(const std::string& path);

}  // namespace rtr
