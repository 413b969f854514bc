#pragma once

#include "pwlip/network.hpp"
#include "pwlip/norms.hpp"
#include "pwlip/polyhedron.hpp"
#include "pwlip/symbolic.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace pwlip {

/// A branch-and-bound node: an input-space region, the activation pattern on
/// it and the affine map x -> J x + b of the network up to W_{first_star}.
struct Subproblem {
    Polyhedron region;
    ActivationPattern pattern;
    LinearPrefix prefix;
    double upper = 0.0;
    std::uint64_t id = 0;

    int first_star() const noexcept { return pattern.first_star; }
};

/// Norm of the interval Jacobian envelope of the subproblem; exact norm of
/// the prefix when the network is fixed linear on the region.
double upper_bound(const Subproblem& sub, const Network& net, const NormPair& np);

/// Re-tests star neurons from the first star layer on, folding every layer
/// that became fixed linear into the prefix. Deeper layers are left as is.
Subproblem ffilter(Subproblem sub, const Network& net);

/// Initial subproblem over omega (symbolic propagation, prefix, bound).
Subproblem make_root(const Network& net, const Polyhedron& omega, const NormPair& np);

struct BranchChild {
    Subproblem sub;
    bool solved = false;             // fixed linear on its region: upper is exact
    bool fathomed_by_bounds = false; // unsolved and upper <= glb
};

struct BranchResult {
    std::vector<BranchChild> children;
    double glb = 0.0;
};

/// Splits on the lowest-index star neuron of the first star layer, one child
/// per piece whose region meets the subproblem region with interior.
/// Throws ErrorKind::ContractViolation on a subproblem without stars.
BranchResult branch(const Subproblem& sub, const Network& net, double glb, const NormPair& np);

enum class SolveStatus { Exact, ApproxReached, TimeLimit, IterationLimit };
std::string to_string(SolveStatus status);

struct IterationTrace {
    long iteration;
    double glb;
    double gub;
    std::size_t heap_size;
};

struct SolverConfig {
    NormPair norm{NormOrder::Two};
    double theta = 1.0;
    std::optional<double> time_limit;       // seconds
    std::size_t sample_count = 0;
    std::uint64_t seed = 0;
    std::optional<long> max_iterations;
    int threads = 1;
    /// 0 keeps FIFO order among equal bounds; other values shuffle ties.
    std::uint64_t tie_break_seed = 0;
    /// Half-width of the sampling box used along unbounded region directions.
    double sample_box_radius = 10.0;

    std::function<void(const IterationTrace&)> on_iteration;
    std::function<void(const Subproblem&)> on_subproblem;

    void validate() const;
};

struct SolveResult {
    double glb = 0.0;
    double gub = 0.0;
    long iterations = 0;
    long subproblems_created = 0;
    long subproblems_fathomed_bounds = 0;
    long subproblems_fathomed_optimality = 0;
    std::size_t peak_heap_size = 0;
    double wall_time = 0.0;
    double initial_glb = 0.0;
    SolveStatus status = SolveStatus::Exact;
};

/// Best-first branch and bound for L_{p->q}(net, omega). glb <= L <= gub on
/// return. Exact: the gap is closed (glb == gub). ApproxReached: stopped on
/// gub <= theta * glb with theta > 1.
SolveResult solve(const Network& net, const Polyhedron& omega, const SolverConfig& cfg);

struct OracleResult {
    double value = 0.0;
    double combinations = 0.0;      // size of the full enumeration
    std::size_t feasible = 0;       // combinations whose region has interior
};

inline constexpr double kOracleGuardrail = 1e6;

/// Exhaustive maximum of the composed piece norm over every full-dimensional
/// combination of one piece per neuron group. Throws ErrorKind::Guardrail
/// when the combination count exceeds `max_combinations`.
OracleResult brute_force_oracle(const Network& net, const Polyhedron& omega, const NormPair& np,
                                double max_combinations = kOracleGuardrail);

/// Total number of piece combinations the oracle would enumerate.
double oracle_combinations(const Network& net);

}  // namespace pwlip
