#include "cli.hpp"

#include "pwlip/baselines.hpp"
#include "pwlip/bnb.hpp"
#include "pwlip/error.hpp"
#include "pwlip/model_io.hpp"
#include "pwlip/region_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>

namespace pwlip::cli {

namespace {

using json = nlohmann::ordered_json;

struct CommonArgs {
    std::string model;
    std::string norm = "2";
    bool global = false;
    std::string box;
    std::string region;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    double sample_box = 10.0;
};

struct ComputeArgs {
    double theta = 1.0;
    std::optional<double> time_limit;
    int threads = 1;
    std::optional<long> max_iterations;
};

void add_common(CLI::App& cmd, CommonArgs& a) {
    cmd.add_option("--model", a.model, "Model JSON file")->required();
    cmd.add_option("--norm", a.norm, "Norm pair P[:Q] with P, Q in {1, 2, inf}")->capture_default_str();
    auto* g = cmd.add_flag("--global", a.global, "Whole input space");
    auto* b = cmd.add_option("--box", a.box, "Hypercube [LO, HI]^d0 given as LO,HI");
    auto* r = cmd.add_option("--region", a.region, "Region JSON file");
    g->excludes(b, r);
    b->excludes(r);
    cmd.add_option("--samples", a.samples, "Random points for the sampled lower bound")->capture_default_str();
    cmd.add_option("--seed", a.seed, "Random seed")->capture_default_str();
    cmd.add_option("--sample-box", a.sample_box, "Sampling half-width along unbounded directions")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
}

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Model or region file problems.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

NormPair parse_norm(const std::string& text) {
    try {
        return NormPair::parse(text);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::UnsupportedNorm) throw;
        throw UsageError(e.what());
    }
}

struct Problem {
    Network net;
    Polyhedron omega;
    std::string region_desc;
};

Problem load_problem(const CommonArgs& a) {
    const int chosen = (a.global ? 1 : 0) + (a.box.empty() ? 0 : 1) + (a.region.empty() ? 0 : 1);
    if (chosen != 1) throw UsageError("exactly one of --global, --box or --region is required");
    std::optional<std::pair<double, double>> box;
    if (!a.box.empty()) {
        const auto comma = a.box.find(',');
        try {
            if (comma == std::string::npos) throw std::invalid_argument("no comma");
            std::size_t used = 0;
            const std::string lo_s = a.box.substr(0, comma), hi_s = a.box.substr(comma + 1);
            const double lo = std::stod(lo_s, &used);
            if (used != lo_s.size()) throw std::invalid_argument("trailing");
            const double hi = std::stod(hi_s, &used);
            if (used != hi_s.size()) throw std::invalid_argument("trailing");
            box.emplace(lo, hi);
        } catch (const std::exception&) {
            throw UsageError("--box expects LO,HI, got '" + a.box + "'");
        }
    }
    try {
        Network net = load_model(a.model);
        Polyhedron omega(net.input_dim());
        std::string desc = "global";
        if (box) {
            omega = Polyhedron::hypercube(net.input_dim(), box->first, box->second);
            desc = "box:" + a.box;
        } else if (!a.region.empty()) {
            omega = load_region(a.region);
            desc = "region:" + a.region;
        }
        require_full_dimensional(omega, net.input_dim());
        return {std::move(net), std::move(omega), desc};
    } catch (const Error& e) {
        throw InputError(e.what());
    }
}

json common_config(const CommonArgs& a, const NormPair& np, const std::string& region) {
    return json{{"model", a.model}, {"norm", np.to_string()}, {"region", region},
                {"samples", a.samples}, {"seed", a.seed}, {"sample_box", a.sample_box}};
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int cmd_compute(const CommonArgs& a, const ComputeArgs& c, std::ostream& out) {
    const NormPair np = parse_norm(a.norm);
    Problem pb = load_problem(a);
    SolverConfig cfg;
    cfg.norm = np;
    cfg.theta = c.theta;
    cfg.time_limit = c.time_limit;
    cfg.sample_count = a.samples;
    cfg.seed = a.seed;
    cfg.threads = c.threads;
    cfg.max_iterations = c.max_iterations;
    cfg.sample_box_radius = a.sample_box;
    const SolveResult r = solve(pb.net, pb.omega, cfg);

    json config = common_config(a, np, pb.region_desc);
    config["theta"] = c.theta;
    config["time_limit"] = c.time_limit ? json(*c.time_limit) : json(nullptr);
    config["threads"] = c.threads;
    config["max_iterations"] = c.max_iterations ? json(*c.max_iterations) : json(nullptr);
    const json report{{"schema", 1},
                      {"glb", r.glb},
                      {"gub", r.gub},
                      {"status", to_string(r.status)},
                      {"iterations", r.iterations},
                      {"subproblems_created", r.subproblems_created},
                      {"fathomed_bounds", r.subproblems_fathomed_bounds},
                      {"fathomed_optimality", r.subproblems_fathomed_optimality},
                      {"peak_heap_size", r.peak_heap_size},
                      {"initial_glb", r.initial_glb},
                      {"wall_time_s", r.wall_time},
                      {"config", config}};
    out << report.dump(2) << '\n';
    const bool limited = r.status == SolveStatus::TimeLimit || r.status == SolveStatus::IterationLimit;
    return limited ? kLimitReached : kOk;
}

int cmd_bounds(const CommonArgs& a, std::ostream& out) {
    const NormPair np = parse_norm(a.norm);
    Problem pb = load_problem(a);
    json report{{"schema", 1}};
    json times = json::object();

    auto t0 = std::chrono::steady_clock::now();
    try {
        report["layerwise"] = layerwise_bound(pb.net, np);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::UnsupportedNorm) throw;
        report["layerwise"] = nullptr;
        report["layerwise_reason"] = e.what();
    }
    times["layerwise"] = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    report["symprop"] = symprop_bound(pb.net, pb.omega, np);
    times["symprop"] = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    report["sampled_lower"] = sampled_lower_bound(pb.net, pb.omega, np, a.samples, a.seed, a.sample_box);
    times["sampled_lower"] = seconds_since(t0);

    report["wall_time_s"] = times;
    report["config"] = common_config(a, np, pb.region_desc);
    out << report.dump(2) << '\n';
    return kOk;
}

int cmd_oracle(const CommonArgs& a, std::ostream& out) {
    const NormPair np = parse_norm(a.norm);
    Problem pb = load_problem(a);
    const auto t0 = std::chrono::steady_clock::now();
    const OracleResult r = brute_force_oracle(pb.net, pb.omega, np);
    const json report{{"schema", 1},
                      {"exact", r.value},
                      {"combinations", static_cast<std::uint64_t>(r.combinations)},
                      {"feasible_combinations", r.feasible},
                      {"wall_time_s", seconds_since(t0)},
                      {"config", common_config(a, np, pb.region_desc)}};
    out << report.dump(2) << '\n';
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact Lipschitz constants of piecewise-linear networks", "pwlip"};
    app.require_subcommand(1);
    CommonArgs common;
    ComputeArgs compute;

    auto* c = app.add_subcommand("compute", "Branch and bound for the exact constant");
    add_common(*c, common);
    c->add_option("--theta", compute.theta, "Stop once gub <= theta * glb")
        ->capture_default_str()
        ->check(CLI::Range(1.0, std::numeric_limits<double>::max()));
    c->add_option("--time-limit", compute.time_limit, "Wall-clock limit in seconds")->check(CLI::NonNegativeNumber);
    c->add_option("--threads", compute.threads, "Subproblems branched concurrently")
        ->capture_default_str()
        ->check(CLI::Range(1, 256));
    c->add_option("--max-iterations", compute.max_iterations, "Branching iteration limit")
        ->check(CLI::NonNegativeNumber);
    auto* b = app.add_subcommand("bounds", "Layerwise, symbolic and sampled estimates");
    add_common(*b, common);
    auto* o = app.add_subcommand("oracle", "Exhaustive enumeration of activation pieces");
    add_common(*o, common);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (c->parsed()) return cmd_compute(common, compute, out);
        if (b->parsed()) return cmd_bounds(common, out);
        return cmd_oracle(common, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kBadInput;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.kind() == ErrorKind::Guardrail ? kGuardrail : kError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kError;
    }
}

}  // namespace pwlip::cli
