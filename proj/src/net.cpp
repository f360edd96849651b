#include "relutrace/net.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace rtr {

namespace {

void relu_inplace(Matrix& m) { m = m.cwiseMax(0.0); }

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

}  // namespace

ReluNetwork::ReluNetwork(std::vector<AffineLayer> layers) : layers_(std::move(layers)) {
    validate();
}

void ReluNetwork::validate() const {
    if (layers_.empty()) fail("ReluNetwork: no layers");
    for (size_t k = 0; k < layers_.size(); ++k) {
        const auto& l = layers_[k];
        if (l.W.rows() != l.b.size()) fail("ReluNetwork: bias length mismatch");
        if (l.W.rows() == 0 || l.W.cols() == 0) fail("ReluNetwork: empty layer");
        if (k > 0 && layers_[k - 1].out_dim() != l.in_dim())
            fail("ReluNetwork: layer dimension chain broken at layer " + std::to_string(k));
        if (!l.W.allFinite() || !l.b.allFinite()) fail("ReluNetwork: non-finite entry");
    }
}

Matrix ReluNetwork::evaluate(const Matrix& points) const {
    if (layers_.empty()) fail("evaluate: empty network");
    if (points.rows() != input_dim()) fail("evaluate: input dimension mismatch");
    // Points are processed as rows: (n x in) * W^T keeps the large dimension
    // first, which is the fast GEMM orientation for the narrow chains here.
    const Eigen::Index n = points.cols();
    Eigen::Index maxw = points.rows();
    for (const auto& l : layers_) maxw = std::max<Eigen::Index>(maxw, l.out_dim());
    Matrix bufa(n, maxw), bufb(n, maxw);
    bufa.leftCols(points.rows()) = points.transpose();
    Matrix* in = &bufa;
    Matrix* out = &bufb;
    for (size_t k = 0; k < layers_.size(); ++k) {
        const auto& l = layers_[k];
        if (k > 0) in->leftCols(l.in_dim()) = in->leftCols(l.in_dim()).cwiseMax(0.0);
        out->leftCols(l.out_dim()).noalias() = in->leftCols(l.in_dim()) * l.W.transpose();
        out->leftCols(l.out_dim()).rowwise() += l.b.transpose();
        std::swap(in, out);
    }
    return in->leftCols(output_dim()).transpose();
}

Vector ReluNetwork::evaluate(const Vector& point) const {
    Matrix m = evaluate(Matrix(point));
    return m.col(0);
}

double ReluNetwork::evaluate1(double x) const {
    if (input_dim() != 1 || output_dim() != 1) fail("evaluate1: not a 1->1 network");
    Vector v(1);
    v << x;
    return evaluate(v)(0);
}

ComplexNet::ComplexNet(ReluNetwork n) : net(std::move(n)) {
    if (net.output_dim() != 2) fail("ComplexNet: output_dim must be 2");
}

Complex ComplexNet::evaluate(double x) const {
    Vector v(1);
    v << x;
    Vector out = net.evaluate(v);
    return {out(0), out(1)};
}

std::vector<Complex> ComplexNet::evaluate(const std::vector<double>& xs) const {
    Matrix pts(1, static_cast<Eigen::Index>(xs.size()));
    for (size_t i = 0; i < xs.size(); ++i) pts(0, static_cast<Eigen::Index>(i)) = xs[i];
    Matrix out = net.evaluate(pts);
    std::vector<Complex> r(xs.size());
    for (size_t i = 0; i < xs.size(); ++i)
        r[i] = {out(0, static_cast<Eigen::Index>(i)), out(1, static_cast<Eigen::Index>(i))};
    return r;
}

NetworkStats stats(const ReluNetwork& net) {
    NetworkStats s;
    s.depth = net.depth();
    for (const auto& l : net.layers()) {
        s.width = std::max<std::int64_t>(s.width, l.out_dim());
        s.weight_bound = std::max(s.weight_bound, l.W.cwiseAbs().maxCoeff());
        if (l.b.size() > 0) s.weight_bound = std::max(s.weight_bound, l.b.cwiseAbs().maxCoeff());
    }
    return s;
}

ReluNetwork compose(const ReluNetwork& outer, const ReluNetwork& inner) {
    if (outer.input_dim() != inner.output_dim()) fail("compose: dimension mismatch");
    std::vector<AffineLayer> layers;
    layers.reserve(inner.depth() + outer.depth() - 1);
    for (std::int64_t k = 0; k + 1 < inner.depth(); ++k) layers.push_back(inner.layers()[k]);
    const AffineLayer& fl = inner.layers().back();
    const AffineLayer& g0 = outer.layers().front();
    layers.emplace_back(Matrix(g0.W * fl.W), Vector(g0.W * fl.b + g0.b));
    for (std::int64_t k = 1; k < outer.depth(); ++k) layers.push_back(outer.layers()[k]);
    return ReluNetwork(std::move(layers));
}

namespace {

// Pads `net` with exact identity layers at the output end until it has the
// requested depth. Each padding layer carries the outputs as (rho(y), rho(-y))
// pairs; the final affine recombines.
ReluNetwork pad_to_depth(const ReluNetwork& net, std::int64_t depth) {
    if (net.depth() == depth) return net;
    if (net.depth() > depth) fail("pad_to_depth: already deeper");
    const int d = net.output_dim();
    std::vector<AffineLayer> layers(net.layers().begin(), net.layers().end());
    Matrix split(2 * d, d);
    split.setZero();
    for (int i = 0; i < d; ++i) {
        split(2 * i, i) = 1.0;
        split(2 * i + 1, i) = -1.0;
    }
    Matrix merge(d, 2 * d);
    merge.setZero();
    for (int i = 0; i < d; ++i) {
        merge(i, 2 * i) = 1.0;
        merge(i, 2 * i + 1) = -1.0;
    }
    Matrix keep(2 * d, 2 * d);  // (p,q) -> (p,q), valid since p,q >= 0 after rho
    keep.setIdentity();

    AffineLayer& last = layers.back();
    Matrix w0 = split * last.W;
    Vector b0 = split * last.b;
    last = AffineLayer(std::move(w0), std::move(b0));
    for (std::int64_t k = net.depth() + 1; k < depth; ++k)
        layers.emplace_back(keep, Vector::Zero(2 * d));
    layers.emplace_back(merge, Vector::Zero(d));
    return ReluNetwork(std::move(layers));
}

}  // namespace

ReluNetwork parallel(const std::vector<ReluNetwork>& nets, bool shared_input) {
    if (nets.empty()) fail("parallel: no sub-networks");
    std::int64_t depth = 0;
    for (const auto& n : nets) depth = std::max(depth, n.depth());
    std::vector<ReluNetwork> padded;
    padded.reserve(nets.size());
    for (const auto& n : nets) padded.push_back(pad_to_depth(n, depth));

    if (shared_input) {
        const int din = padded.front().input_dim();
        for (const auto& n : padded)
            if (n.input_dim() != din) fail("parallel: shared input dimension mismatch");
    }

    std::vector<AffineLayer> layers;
    layers.reserve(depth);
    for (std::int64_t k = 0; k < depth; ++k) {
        int rows = 0, cols = 0;
        for (const auto& n : padded) rows += n.layers()[k].out_dim();
        if (k == 0 && shared_input) {
            cols = padded.front().input_dim();
        } else {
            for (const auto& n : padded) cols += n.layers()[k].in_dim();
        }
        Matrix W = Matrix::Zero(rows, cols);
        Vector b(rows);
        int r0 = 0, c0 = 0;
        for (const auto& n : padded) {
            const auto& l = n.layers()[k];
            if (k == 0 && shared_input) {
                W.block(r0, 0, l.out_dim(), cols) = l.W;
            } else {
                W.block(r0, c0, l.out_dim(), l.in_dim()) = l.W;
                c0 += l.in_dim();
            }
            b.segment(r0, l.out_dim()) = l.b;
            r0 += l.out_dim();
        }
        layers.emplace_back(std::move(W), std::move(b));
    }
    return ReluNetwork(std::move(layers));
}

ReluNetwork build_identity(int dim) {
    Matrix split(2 * dim, dim), merge(dim, 2 * dim);
    split.setZero();
    merge.setZero();
    for (int i = 0; i < dim; ++i) {
        split(2 * i, i) = 1.0;
        split(2 * i + 1, i) = -1.0;
        merge(i, 2 * i) = 1.0;
        merge(i, 2 * i + 1) = -1.0;
    }
    std::vector<AffineLayer> layers;
    layers.emplace_back(split, Vector::Zero(2 * dim));
    layers.emplace_back(merge, Vector::Zero(dim));
    return ReluNetwork(std::move(layers));
}

ReluNetwork build_const_one() {
    // Keeps the 2-layer, 4-unit shape of the p0 display; the zero output row
    // plus unit bias makes the constant exact on all of R, not only [-1,1].
    Matrix w1(4, 1);
    w1 << 1, 1, 1, 1;
    Vector b1(4);
    b1 << 2, 1, -1, -2;
    Matrix w2(1, 4);
    w2.setZero();
    Vector b2(1);
    b2 << 1;
    std::vector<AffineLayer> layers;
    layers.emplace_back(w1, b1);
    layers.emplace_back(w2, b2);
    return ReluNetwork(std::move(layers));
}

ReluNetwork build_linear(double alpha, double beta) {
    Matrix w1(4, 2);
    w1 << 1, 0, -1, 0, 0, 1, 0, -1;
    Matrix w2(1, 4);
    w2 << alpha, -alpha, beta, -beta;
    std::vector<AffineLayer> layers;
    layers.emplace_back(w1, Vector::Zero(4));
    layers.emplace_back(w2, Vector::Zero(1));
    return ReluNetwork(std::move(layers));
}

ReluNetwork build_hat(double center) {
    Matrix w1(3, 1);
    w1 << 1, 1, 1;
    Vector b1(3);
    b1 << -center + 1.0, -center, -center - 1.0;
    Matrix w2(1, 3);
    w2 << 1, -2, 1;
    std::vector<AffineLayer> layers;
    layers.emplace_back(w1, b1);
    layers.emplace_back(w2, Vector::Zero(1));
    return ReluNetwork(std::move(layers));
}

namespace {

// Core of scale_by_pow2/bounded_affine. Realizes x -> 2^m * (S x + c) exactly
// with all weights/biases bounded by max(1, B(S,c)). Layer plan:
//   split:  (rho(v_i), rho(-v_i)) pairs, v = S x + c          [width 2*dout]
//   triple: (p, q, a) = (rho(v), rho(-v), |v|) per coordinate  [width 3*dout]
//   m x double: (p,q,a) -> (rho(p-q+a), rho(q-p+a), rho(p+q+a)) = doubled triple
//   merge:  v_i = p_i - q_i
// The doubling step uses rho(v + |v|) = 2 rho(v) with unit weights only.
ReluNetwork pow2_affine(const Matrix& S, const Vector& c, int m) {
    const int dout = static_cast<int>(S.rows());
    std::vector<AffineLayer> layers;
    Matrix split(2 * dout, S.cols());
    Vector bs(2 * dout);
    for (int i = 0; i < dout; ++i) {
        split.row(2 * i) = S.row(i);
        split.row(2 * i + 1) = -S.row(i);
        bs(2 * i) = c(i);
        bs(2 * i + 1) = -c(i);
    }
    layers.emplace_back(std::move(split), std::move(bs));

    if (m > 0) {
        Matrix triple = Matrix::Zero(3 * dout, 2 * dout);
        for (int i = 0; i < dout; ++i) {
            triple(3 * i, 2 * i) = 1.0;
            triple(3 * i + 1, 2 * i + 1) = 1.0;
            triple(3 * i + 2, 2 * i) = 1.0;
            triple(3 * i + 2, 2 * i + 1) = 1.0;
        }
        layers.emplace_back(triple, Vector::Zero(3 * dout));
        Matrix dbl = Matrix::Zero(3 * dout, 3 * dout);
        for (int i = 0; i < dout; ++i) {
            const int p = 3 * i, q = 3 * i + 1, a = 3 * i + 2;
            dbl(p, p) = 1;  dbl(p, q) = -1; dbl(p, a) = 1;
            dbl(q, p) = -1; dbl(q, q) = 1;  dbl(q, a) = 1;
            dbl(a, p) = 1;  dbl(a, q) = 1;  dbl(a, a) = 1;
        }
        for (int step = 0; step < m; ++step) layers.emplace_back(dbl, Vector::Zero(3 * dout));
    }

    const int last = (m > 0) ? 3 : 2;
    Matrix out = Matrix::Zero(dout, last * dout);
    for (int i = 0; i < dout; ++i) {
        out(i, last * i) = 1.0;
        out(i, last * i + 1) = -1.0;
    }
    layers.emplace_back(std::move(out), Vector::Zero(dout));
    return ReluNetwork(std::move(layers));
}

}  // namespace

ReluNetwork scale_by_pow2(int m, int dim) {
    if (m < 0) fail("scale_by_pow2: negative exponent");
    return pow2_affine(Matrix::Identity(dim, dim), Vector::Zero(dim), m);
}

ReluNetwork bounded_affine(const Matrix& A, const Vector& b) {
    if (A.rows() != b.size()) fail("bounded_affine: shape mismatch");
    if (A.size() == 0) fail("bounded_affine: empty matrix");
    double amax = std::max(A.cwiseAbs().maxCoeff(), b.size() ? b.cwiseAbs().maxCoeff() : 0.0);
    int m = 0;
    while (amax > std::ldexp(1.0, m)) ++m;  // smallest m with max|entry| <= 2^m
    const double scale = std::ldexp(1.0, -m);
    return pow2_affine(Matrix(scale * A), Vector(scale * b), m);
}

ReluNetwork select_inputs(const ReluNetwork& net, const std::vector<int>& coords, int total_in) {
    if (static_cast<int>(coords.size()) != net.input_dim()) fail("select_inputs: coord count mismatch");
    Matrix P = Matrix::Zero(net.input_dim(), total_in);
    for (size_t i = 0; i < coords.size(); ++i) {
        if (coords[i] < 0 || coords[i] >= total_in) fail("select_inputs: coordinate out of range");
        P(static_cast<Eigen::Index>(i), coords[i]) = 1.0;
    }
    std::vector<AffineLayer> layers(net.layers().begin(), net.layers().end());
    layers.front() = AffineLayer(Matrix(layers.front().W * P), layers.front().b);
    return ReluNetwork(std::move(layers));
}

ReluNetwork affine_network(const Matrix& A, const Vector& b) {
    std::vector<AffineLayer> layers;
    layers.emplace_back(A, b);
    return ReluNetwork(std::move(layers));
}

ReluNetwork append_affine(const Matrix& A, const Vector& b, const ReluNetwork& net) {
    return compose(affine_network(A, b), net);
}

ChainBuilder::ChainBuilder(const ReluNetwork& init)
    : layers_(init.layers().begin(), init.layers().end()) {}

void ChainBuilder::then(const ReluNetwork& next) {
    if (layers_.empty()) fail("ChainBuilder: empty chain");
    if (next.input_dim() != layers_.back().out_dim()) fail("ChainBuilder: dimension mismatch");
    const AffineLayer& g0 = next.layers().front();
    AffineLayer& last = layers_.back();
    Vector nb = g0.W * last.b + g0.b;
    Matrix nW = g0.W * last.W;
    last = AffineLayer(std::move(nW), std::move(nb));
    for (std::int64_t k = 1; k < next.depth(); ++k) layers_.push_back(next.layers()[k]);
}

void ChainBuilder::then_affine(const Matrix& A, const Vector& b) {
    then(affine_network(A, b));
}

ReluNetwork ChainBuilder::finish() { return ReluNetwork(std::move(layers_)); }

ReluNetwork prepend_affine(const ReluNetwork& net, const Matrix& A, const Vector& b) {
    return compose(net, affine_network(A, b));
}

// --- serialization ------------------------------------------------------

namespace {

void append_double(std::string& out, double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

double parse_double(const char*& p, const char* end, size_t& line) {
    while (p < end && (*p == ' ' || *p == '\n')) {
        if (*p == '\n') ++line;
        ++p;
    }
    double v = 0;
    auto res = std::from_chars(p, end, v);
    if (res.ec != std::errc()) throw std::runtime_error("relunet parse error at line " + std::to_string(line));
    p = res.ptr;
    return v;
}

long parse_long(const char*& p, const char* end, size_t& line) {
    while (p < end && (*p == ' ' || *p == '\n')) {
        if (*p == '\n') ++line;
        ++p;
    }
    long v = 0;
    auto res = std::from_chars(p, end, v);
    if (res.ec != std::errc()) throw std::runtime_error("relunet parse error at line " + std::to_string(line));
    p = res.ptr;
    return v;
}

}  // namespace

std::string serialize(const ReluNetwork& net) {
    std::string out;
    out.reserve(64 + static_cast<size_t>(net.depth()) * 64);
    out += "relunet 1\n";
    out += std::to_string(net.depth());
    out += ' ';
    out += std::to_string(net.input_dim());
    out += ' ';
    out += std::to_string(net.output_dim());
    out += '\n';
    for (const auto& l : net.layers()) {
        out += "layer ";
        out += std::to_string(l.out_dim());
        out += ' ';
        out += std::to_string(l.in_dim());
        out += '\n';
        for (int r = 0; r < l.out_dim(); ++r) {
            for (int c = 0; c < l.in_dim(); ++c) {
                if (c) out += ' ';
                append_double(out, l.W(r, c));
            }
            out += '\n';
        }
        for (int r = 0; r < l.out_dim(); ++r) {
            if (r) out += ' ';
            append_double(out, l.b(r));
        }
        out += '\n';
    }
    return out;
}

ReluNetwork deserialize(const std::string& text) {
    const char* p = text.data();
    const char* end = p + text.size();
    size_t line = 1;
    auto expect_word = [&](const char* w) {
        while (p < end && (*p == ' ' || *p == '\n')) {
            if (*p == '\n') ++line;
            ++p;
        }
        size_t n = std::strlen(w);
        if (static_cast<size_t>(end - p) < n || std::strncmp(p, w, n) != 0)
            throw std::runtime_error("relunet parse error at line " + std::to_string(line) +
                                     ": expected '" + w + "'");
        p += n;
    };
    expect_word("relunet");
    long version = parse_long(p, end, line);
    if (version != 1) throw std::runtime_error("relunet: unsupported version");
    long depth = parse_long(p, end, line);
    long din = parse_long(p, end, line);
    long dout = parse_long(p, end, line);
    if (depth <= 0 || din <= 0 || dout <= 0) throw std::runtime_error("relunet: bad header");
    std::vector<AffineLayer> layers;
    layers.reserve(static_cast<size_t>(depth));
    for (long k = 0; k < depth; ++k) {
        expect_word("layer");
        long r = parse_long(p, end, line);
        long c = parse_long(p, end, line);
        if (r <= 0 || c <= 0) throw std::runtime_error("relunet parse error at line " + std::to_string(line));
        Matrix W(r, c);
        for (long i = 0; i < r; ++i)
            for (long j = 0; j < c; ++j) W(i, j) = parse_double(p, end, line);
        Vector b(r);
        for (long i = 0; i < r; ++i) b(i) = parse_double(p, end, line);
        layers.emplace_back(std::move(W), std::move(b));
    }
    ReluNetwork net(std::move(layers));
    if (net.input_dim() != din || net.output_dim() != dout)
        throw std::runtime_error("relunet: header/layer dimension mismatch");
    return net;
}

void save_network(const ReluNetwork& net, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    std::string s = serialize(net);
    f.write(s.data(), static_cast<std::streamsize>(s.size()));
    if (!f) throw std::runtime_error("write failed: " + path);
}

ReluNetwork load_network(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return deserialize(ss.str());
}

}  // namespace rtr
