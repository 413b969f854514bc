#pragma once

#include "pwlip/interval_matrix.hpp"

#include <string>
#include <string_view>

namespace pwlip {

enum class NormOrder { One, Two, Inf };

/// Input/output vector norm orders of an induced norm ||A||_{p->q}.
/// Supported: p = q, p = 1 with any q, q = inf with any p.
class NormPair {
public:
    /// Throws ErrorKind::UnsupportedNorm for pairs outside the supported set.
    NormPair(NormOrder p, NormOrder q);
    explicit NormPair(NormOrder pq) : NormPair(pq, pq) {}

    /// Parses "2", "inf", "1:2", "2:inf".
    static NormPair parse(std::string_view text);

    static bool supported(NormOrder p, NormOrder q) noexcept;

    NormOrder p() const noexcept { return p_; }
    NormOrder q() const noexcept { return q_; }
    bool symmetric() const noexcept { return p_ == q_; }
    std::string to_string() const;

    friend bool operator==(const NormPair&, const NormPair&) = default;

private:
    NormOrder p_;
    NormOrder q_;
};

std::string to_string(NormOrder order);
NormOrder dual(NormOrder order) noexcept;
double vector_norm(const Vector& v, NormOrder order);

/// ||A||_{p->q} = max_{x != 0} ||Ax||_q / ||x||_p.
double induced_norm(const Matrix& a, const NormPair& np);

}  // namespace pwlip
