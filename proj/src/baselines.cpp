#include "pwlip/baselines.hpp"

#include "pwlip/bnb.hpp"
#include "pwlip/error.hpp"

#include <algorithm>
#include <cmath>

namespace pwlip {

double layerwise_bound(const Network& net, const NormPair& np) {
    if (!np.symmetric()) {
        throw Error(ErrorKind::UnsupportedNorm,
                    "layerwise bound needs p = q to chain norms, got " + np.to_string());
    }
    double bound = 1.0;
    for (const Layer& ly : net.layers()) bound *= induced_norm(ly.W, np) * ly.activation->lipschitz(np);
    return bound;
}

double symprop_bound(const Network& net, const Polyhedron& omega, const NormPair& np) {
    return make_root(net, omega, np).upper;
}

RegionSampler::RegionSampler(const Polyhedron& region, std::uint64_t seed, double unbounded_radius)
    : region_(region), rng_(seed) {
    const BoxBounds box = bounding_box(region);
    lower_ = box.lower;
    upper_ = box.upper;
    for (Eigen::Index i = 0; i < lower_.size(); ++i) {
        const bool lo_inf = !std::isfinite(lower_(i)), hi_inf = !std::isfinite(upper_(i));
        if (lo_inf && hi_inf) {
            lower_(i) = -unbounded_radius;
            upper_(i) = unbounded_radius;
        } else if (lo_inf) {
            lower_(i) = std::min(-unbounded_radius, upper_(i) - 2.0 * unbounded_radius);
        } else if (hi_inf) {
            upper_(i) = std::max(unbounded_radius, lower_(i) + 2.0 * unbounded_radius);
        }
    }
}

Vector RegionSampler::draw(std::size_t max_rejections) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Vector x(lower_.size());
    while (true) {
        for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = lower_(i) + (upper_(i) - lower_(i)) * unit(rng_);
        if (region_.contains(x, 0.0)) return x;
        if (++rejections_ > max_rejections) {
            throw Error(ErrorKind::InvalidInput,
                        "rejection sampling exceeded " + std::to_string(max_rejections) + " rejected draws");
        }
    }
}

double sampled_lower_bound(const Network& net, const Polyhedron& omega, const NormPair& np, std::size_t n_samples,
                           std::uint64_t seed, double unbounded_radius) {
    if (omega.dim() != net.input_dim()) throw Error(ErrorKind::Dimension, "region dimension does not match the network");
    if (n_samples == 0) return 0.0;
    RegionSampler sampler(omega, seed, unbounded_radius);
    double best = 0.0;
    for (std::size_t i = 0; i < n_samples; ++i) {
        const Vector x = sampler.draw(100 * n_samples);
        const PointJacobian pj = jacobian_at(net, x);
        if (pj.near_boundary) continue;
        best = std::max(best, induced_norm(pj.J, np));
    }
    return best;
}

}  // namespace pwlip
