#pragma once

#include "pwlip/network.hpp"
#include "pwlip/norms.hpp"
#include "pwlip/polyhedron.hpp"

#include <cstdint>
#include <random>

namespace pwlip {

/// prod_l ||W_l||_{p->p} * Lip(alpha_l). Only defined for p = q.
double layerwise_bound(const Network& net, const NormPair& np);

/// Upper bound of the initial branch-and-bound subproblem.
double symprop_bound(const Network& net, const Polyhedron& omega, const NormPair& np);

/// Max of the Jacobian norm over `n_samples` uniform points of omega,
/// skipping points near a piece boundary. Zero when nothing was sampled.
double sampled_lower_bound(const Network& net, const Polyhedron& omega, const NormPair& np, std::size_t n_samples,
                           std::uint64_t seed, double unbounded_radius = 10.0);

/// Rejection sampler over the bounding box of a polyhedron. Unbounded box
/// sides are replaced using `unbounded_radius`.
class RegionSampler {
public:
    RegionSampler(const Polyhedron& region, std::uint64_t seed, double unbounded_radius = 10.0);

    /// Throws ErrorKind::InvalidInput once more than `max_rejections` draws in
    /// total have fallen outside the region.
    Vector draw(std::size_t max_rejections);
    std::size_t rejections() const noexcept { return rejections_; }

private:
    Polyhedron region_;
    Vector lower_;
    Vector upper_;
    std::mt19937_64 rng_;
    std::size_t rejections_ = 0;
};

}  // namespace pwlip
