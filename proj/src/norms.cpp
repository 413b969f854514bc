#include "pwlip/norms.hpp"

#include "pwlip/error.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cctype>

namespace pwlip {

namespace {

NormOrder parse_order(std::string_view s) {
    std::string t;
    for (char ch : s) t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    if (t == "1") return NormOrder::One;
    if (t == "2") return NormOrder::Two;
    if (t == "inf" || t == "infinity" || t == "oo") return NormOrder::Inf;
    throw Error(ErrorKind::UnsupportedNorm, "unknown norm order '" + std::string(s) + "'");
}

double spectral_norm(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    if (a.rows() == 1 || a.cols() == 1) return a.norm();
    Eigen::JacobiSVD<Matrix> svd(a);
    return svd.singularValues()(0);
}

}  // namespace

NormPair::NormPair(NormOrder p, NormOrder q) : p_(p), q_(q) {
    if (!supported(p, q)) {
        throw Error(ErrorKind::UnsupportedNorm,
                    "unsupported norm pair " + pwlip::to_string(p) + "->" + pwlip::to_string(q));
    }
}

bool NormPair::supported(NormOrder p, NormOrder q) noexcept {
    return p == q || p == NormOrder::One || q == NormOrder::Inf;
}

NormPair NormPair::parse(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) return NormPair(parse_order(text));
    return NormPair(parse_order(text.substr(0, colon)), parse_order(text.substr(colon + 1)));
}

std::string NormPair::to_string() const {
    if (p_ == q_) return pwlip::to_string(p_);
    return pwlip::to_string(p_) + ":" + pwlip::to_string(q_);
}

std::string to_string(NormOrder order) {
    switch (order) {
        case NormOrder::One: return "1";
        case NormOrder::Two: return "2";
        case NormOrder::Inf: return "inf";
    }
    return "?";
}

NormOrder dual(NormOrder order) noexcept {
    switch (order) {
        case NormOrder::One: return NormOrder::Inf;
        case NormOrder::Two: return NormOrder::Two;
        case NormOrder::Inf: return NormOrder::One;
    }
    return NormOrder::Two;
}

double vector_norm(const Vector& v, NormOrder order) {
    if (v.size() == 0) return 0.0;
    switch (order) {
        case NormOrder::One: return v.lpNorm<1>();
        case NormOrder::Two: return v.norm();
        case NormOrder::Inf: return v.lpNorm<Eigen::Infinity>();
    }
    return 0.0;
}

double induced_norm(const Matrix& a, const NormPair& np) {
    if (!a.allFinite()) throw Error(ErrorKind::InvalidInput, "induced_norm of a non-finite matrix");
    if (a.size() == 0) return 0.0;
    const NormOrder p = np.p(), q = np.q();
    if (p == NormOrder::Two && q == NormOrder::Two) return spectral_norm(a);
    if (p == NormOrder::One) {
        // Extreme points of the 1-ball are signed unit vectors: best column.
        double best = 0.0;
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            best = std::max(best, vector_norm(a.col(j), q));
        }
        return best;
    }
    // q = inf: each output row is maximized independently by the dual norm.
    double best = 0.0;
    const NormOrder pd = dual(p);
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        best = std::max(best, vector_norm(a.row(i).transpose(), pd));
    }
    return best;
}

}  // namespace pwlip
