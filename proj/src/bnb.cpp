#include "pwlip/bnb.hpp"

#include "pwlip/baselines.hpp"
#include "pwlip/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <queue>

namespace pwlip {

namespace {

struct PieceState {
    Eigen::RowVectorXd row;
    double bias;
};

/// Pieces of group g that meet `region` with interior, through x -> J x + b.
std::vector<std::size_t> feasible_pieces(const PwlActivation& act, Eigen::Index g, const Polyhedron& region,
                                         const LinearPrefix& prefix) {
    const auto pieces = act.group_pieces(g);
    std::vector<std::size_t> feas;
    if (pieces.size() == 1) return {0};
    std::vector<Polyhedron> regs;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        regs.push_back(stack(region, affine_preimage(pieces[i].region, prefix.J, prefix.b)));
        if (has_interior(regs.back())) feas.push_back(i);
    }
    if (feas.empty()) {
        for (std::size_t i = 0; i < pieces.size(); ++i) {
            if (is_feasible(regs[i])) feas.push_back(i);
        }
    }
    if (feas.empty()) {
        // Numerically lost region: keep every piece so the hull stays sound.
        for (std::size_t i = 0; i < pieces.size(); ++i) feas.push_back(i);
    }
    return feas;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::string to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::Exact: return "exact";
        case SolveStatus::ApproxReached: return "approx_reached";
        case SolveStatus::TimeLimit: return "time_limit";
        case SolveStatus::IterationLimit: return "iteration_limit";
    }
    return "unknown";
}

void SolverConfig::validate() const {
    if (!(theta >= 1.0) || !std::isfinite(theta)) {
        throw Error(ErrorKind::InvalidInput, "approximation factor theta must be a finite value >= 1");
    }
    if (time_limit && !(*time_limit >= 0.0)) throw Error(ErrorKind::InvalidInput, "time limit must be >= 0");
    if (max_iterations && *max_iterations < 0) throw Error(ErrorKind::InvalidInput, "max iterations must be >= 0");
    if (threads < 1) throw Error(ErrorKind::InvalidInput, "thread count must be >= 1");
    if (!(sample_box_radius > 0.0)) throw Error(ErrorKind::InvalidInput, "sampling box radius must be positive");
}

double upper_bound(const Subproblem& sub, const Network& net, const NormPair& np) {
    const int L = net.depth();
    const int first = sub.first_star();
    if (first > L) return induced_norm(sub.prefix.J, np);
    IntervalMatrix M = interval_matmul(sub.pattern.lambda_mat[static_cast<std::size_t>(first - 1)],
                                       IntervalMatrix::exact(sub.prefix.J));
    for (int l = first + 1; l <= L; ++l) {
        M = interval_matmul(IntervalMatrix::exact(net.layer(l).W), M);
        M = interval_matmul(sub.pattern.lambda_mat[static_cast<std::size_t>(l - 1)], M);
    }
    return induced_norm(abs_upper_envelope(M), np);
}

Subproblem ffilter(Subproblem sub, const Network& net) {
    const int L = net.depth();
    ActivationPattern& pat = sub.pattern;
    while (pat.first_star <= L) {
        const int l = pat.first_star;
        const auto li = static_cast<std::size_t>(l - 1);
        const PwlActivation& act = *net.layer(l).activation;
        std::vector<Eigen::Index> remaining;
        std::vector<std::optional<std::vector<std::size_t>>> memo(static_cast<std::size_t>(act.num_groups()));
        for (Eigen::Index n : pat.stars[li]) {
            const Eigen::Index g = act.group_of(n);
            auto& feas = memo[static_cast<std::size_t>(g)];
            if (!feas) feas = feasible_pieces(act, g, sub.region, sub.prefix);
            const auto pieces = act.group_pieces(g);
            const NeuronPiece& first_piece = pieces[feas->front()];
            Eigen::RowVectorXd lo = first_piece.row(n), hi = lo;
            double blo = first_piece.bias(n), bhi = blo;
            bool star = false;
            for (std::size_t i : *feas) {
                const Eigen::RowVectorXd r = pieces[i].row(n);
                const double b = pieces[i].bias(n);
                star = star || b != first_piece.bias(n) || r != first_piece.row(n);
                lo = lo.cwiseMin(r);
                hi = hi.cwiseMax(r);
                blo = std::min(blo, b);
                bhi = std::max(bhi, b);
            }
            pat.lambda_mat[li].set_row(n, lo, hi);
            pat.lambda_vec[li].set_row(n, Eigen::RowVectorXd::Constant(1, blo), Eigen::RowVectorXd::Constant(1, bhi));
            if (star) remaining.push_back(n);
        }
        pat.stars[li] = std::move(remaining);
        if (!pat.stars[li].empty()) break;
        sub.prefix = fold_layer(net, sub.prefix, l, pat.lambda_mat[li], pat.lambda_vec[li]);
        ++pat.first_star;
    }
    return sub;
}

Subproblem make_root(const Network& net, const Polyhedron& omega, const NormPair& np) {
    SymPropResult sp = symprop(net, omega);
    Subproblem root{omega, std::move(sp.pattern), {}, 0.0, 0};
    root.prefix = lin_prop(net, root.pattern.lambda_mat, root.pattern.lambda_vec, root.pattern.first_star);
    root.upper = upper_bound(root, net, np);
    return root;
}

BranchResult branch(const Subproblem& sub, const Network& net, double glb, const NormPair& np) {
    const int L = net.depth();
    const int l = sub.first_star();
    if (l > L || sub.pattern.stars[static_cast<std::size_t>(l - 1)].empty()) {
        throw Error(ErrorKind::ContractViolation, "branch called on a subproblem without star neurons");
    }
    const auto li = static_cast<std::size_t>(l - 1);
    const Eigen::Index n = sub.pattern.stars[li].front();
    const PwlActivation& act = *net.layer(l).activation;

    BranchResult out;
    out.glb = glb;
    for (const NeuronPiece& piece : act.neuron_decomposition(n)) {
        Polyhedron region = stack(sub.region, affine_preimage(piece.region, sub.prefix.J, sub.prefix.b));
        if (!has_interior(region)) continue;
        Subproblem child{std::move(region), sub.pattern, sub.prefix, 0.0, 0};
        auto& stars = child.pattern.stars[li];
        for (std::size_t k = 0; k < piece.fixed_neurons.size(); ++k) {
            const Eigen::Index m = piece.fixed_neurons[k];
            child.pattern.lambda_mat[li].set_row_exact(m, piece.T.row(static_cast<Eigen::Index>(k)));
            child.pattern.lambda_vec[li].set_row_exact(m, Eigen::RowVectorXd::Constant(1, piece.t(static_cast<Eigen::Index>(k))));
            stars.erase(std::remove(stars.begin(), stars.end(), m), stars.end());
        }
        child = ffilter(std::move(child), net);
        child.upper = upper_bound(child, net, np);
        const bool solved = child.first_star() > L;
        if (solved) out.glb = std::max(out.glb, child.upper);
        out.children.push_back(BranchChild{std::move(child), solved, false});
    }
    for (BranchChild& c : out.children) c.fathomed_by_bounds = !c.solved && c.sub.upper <= out.glb;
    return out;
}

SolveResult solve(const Network& net, const Polyhedron& omega, const SolverConfig& cfg) {
    cfg.validate();
    using Clock = std::chrono::steady_clock;
    const auto start = Clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

    SolveResult res;
    Subproblem root = make_root(net, omega, cfg.norm);
    res.subproblems_created = 1;
    if (cfg.on_subproblem) cfg.on_subproblem(root);
    double gub = root.upper;
    double glb = 0.0;
    if (cfg.sample_count > 0) {
        glb = std::min(sampled_lower_bound(net, omega, cfg.norm, cfg.sample_count, cfg.seed, cfg.sample_box_radius), gub);
    }
    const bool trivial = root.first_star() > net.depth();
    if (trivial) glb = gub;
    res.initial_glb = glb;

    auto key = [&](std::uint64_t id) { return cfg.tie_break_seed == 0 ? id : splitmix64(id ^ cfg.tie_break_seed); };
    auto less = [&](const Subproblem& a, const Subproblem& b) {
        if (a.upper != b.upper) return a.upper < b.upper;
        return key(a.id) > key(b.id);
    };
    std::priority_queue<Subproblem, std::vector<Subproblem>, decltype(less)> heap(less);
    std::uint64_t next_id = 1;
    if (!trivial && root.upper > glb) heap.push(std::move(root));
    res.peak_heap_size = heap.size();

    long iteration = 0;
    SolveStatus status = SolveStatus::Exact;
    const std::size_t batch = static_cast<std::size_t>(cfg.threads);
    while (true) {
        while (!heap.empty() && heap.top().upper <= glb) {
            heap.pop();
            ++res.subproblems_fathomed_bounds;
        }
        gub = std::min(gub, heap.empty() ? glb : std::max(heap.top().upper, glb));
        if (cfg.on_iteration) cfg.on_iteration({iteration, glb, gub, heap.size()});
        // an empty heap leaves gub == glb, so this also ends exhausted searches
        if (gub <= cfg.theta * glb) {
            status = cfg.theta == 1.0 || trivial ? SolveStatus::Exact : SolveStatus::ApproxReached;
            break;
        }
        if (cfg.time_limit && elapsed() >= *cfg.time_limit) {
            status = SolveStatus::TimeLimit;
            break;
        }
        if (cfg.max_iterations && iteration >= *cfg.max_iterations) {
            status = SolveStatus::IterationLimit;
            break;
        }

        std::vector<Subproblem> popped;
        while (!heap.empty() && popped.size() < batch) {
            if (heap.top().upper > glb) popped.push_back(heap.top());
            else ++res.subproblems_fathomed_bounds;
            heap.pop();
        }
        std::vector<BranchResult> results(popped.size());
        if (popped.size() == 1) {
            results[0] = branch(popped[0], net, glb, cfg.norm);
        } else {
            std::vector<std::future<BranchResult>> jobs;
            for (const Subproblem& p : popped) {
                jobs.push_back(std::async(std::launch::async, [&net, &cfg, glb, &p] { return branch(p, net, glb, cfg.norm); }));
            }
            for (std::size_t i = 0; i < jobs.size(); ++i) results[i] = jobs[i].get();
        }
        for (BranchResult& r : results) {
            ++iteration;
            glb = std::max(glb, r.glb);
            for (BranchChild& c : r.children) {
                c.sub.id = next_id++;
                ++res.subproblems_created;
                if (cfg.on_subproblem) cfg.on_subproblem(c.sub);
                if (c.solved) {
                    ++res.subproblems_fathomed_optimality;
                } else if (c.sub.upper <= glb) {
                    ++res.subproblems_fathomed_bounds;
                } else {
                    heap.push(std::move(c.sub));
                }
            }
        }
        res.peak_heap_size = std::max(res.peak_heap_size, heap.size());
    }
    res.glb = glb;
    res.gub = gub;
    res.iterations = iteration;
    res.status = status;
    res.wall_time = elapsed();
    return res;
}

}  // namespace pwlip
