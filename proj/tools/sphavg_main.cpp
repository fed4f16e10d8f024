// Command-line front end: ball enumeration, norm estimates, cocycle bounds,
// expansion reports and batch recipes over JSON-specified groups.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sphavg/ball.hpp"
#include "sphavg/cocycle.hpp"
#include "sphavg/errors.hpp"
#include "sphavg/expansion.hpp"
#include "sphavg/group_io.hpp"
#include "sphavg/norms.hpp"
#include "sphavg/recipes.hpp"

namespace {

using namespace sphavg;

struct SetSpec {
    enum class Kind { sphere, ball, annulus } kind = Kind::sphere;
    int n = 1;
    int theta = 0;

    int outer_radius() const { return kind == Kind::annulus ? n + theta : n; }

    std::string descriptor() const {
        switch (kind) {
            case Kind::sphere: return "sphere:" + std::to_string(n);
            case Kind::ball: return "ball:" + std::to_string(n);
            default: return "annulus:" + std::to_string(n) + ":" + std::to_string(theta);
        }
    }

    std::span<const Element> members(const BallIndex& ball) const {
        switch (kind) {
            case Kind::sphere: return ball.sphere(n).members();
            case Kind::ball: return ball.prefix(n);
            default: return ball.annulus(n, theta).members();
        }
    }
};

SetSpec parse_set(const std::string& text) {
    SetSpec spec;
    auto fail = [&] {
        throw input_error("invalid --set '" + text +
                          "' (expected sphere:n | ball:n | annulus:n:theta)");
    };
    auto c1 = text.find(':');
    if (c1 == std::string::npos) fail();
    std::string kind = text.substr(0, c1);
    try {
        if (kind == "sphere" || kind == "ball") {
            spec.kind = kind == "sphere" ? SetSpec::Kind::sphere : SetSpec::Kind::ball;
            spec.n = std::stoi(text.substr(c1 + 1));
        } else if (kind == "annulus") {
            auto c2 = text.find(':', c1 + 1);
            if (c2 == std::string::npos) fail();
            spec.kind = SetSpec::Kind::annulus;
            spec.n = std::stoi(text.substr(c1 + 1, c2 - c1 - 1));
            spec.theta = std::stoi(text.substr(c2 + 1));
        } else {
            fail();
        }
    } catch (const std::exception&) {
        fail();
    }
    if (spec.n < 0 || spec.theta < 0) fail();
    return spec;
}

WitnessFamily parse_witnesses(const std::string& text, std::uint64_t default_seed) {
    WitnessFamily family;
    family.seed = default_seed;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find(',', pos);
        std::string tok = text.substr(pos, end == std::string::npos ? end : end - pos);
        if (tok == "balls") family.balls = true;
        else if (tok == "spheres") family.spheres = true;
        else if (tok.rfind("random:", 0) == 0) {
            auto c2 = tok.find(':', 7);
            try {
                if (c2 == std::string::npos) {
                    family.random_count = std::stoi(tok.substr(7));
                } else {
                    family.random_count = std::stoi(tok.substr(7, c2 - 7));
                    family.seed = std::stoull(tok.substr(c2 + 1));
                }
            } catch (const std::exception&) {
                throw input_error("invalid witness token: " + tok);
            }
        } else if (!tok.empty()) {
            throw input_error("invalid witness token: " + tok);
        }
        if (end == std::string::npos) break;
        pos = end + 1;
    }
    return family;
}

struct GlobalFlags {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
};

RunConfig load_config(const GlobalFlags& global) {
    RunConfig config;
    if (!global.config_path.empty()) {
        std::ifstream in(global.config_path);
        if (!in) throw input_error("cannot open config file: " + global.config_path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw input_error(std::string("invalid config JSON: ") + e.what());
        }
        config = RunConfig::from_json(j);
    }
    if (!global.out_dir.empty()) config.out_dir = global.out_dir;
    if (global.seed) config.seed = *global.seed;
    if (global.threads) config.threads = *global.threads;
    return config;
}

RewritingSystem load_group(const std::string& path, const RunConfig& config) {
    if (!path.empty()) return group_from_file(path);
    return group_from_json(config.group_spec);
}

int run(int argc, char** argv) {
    CLI::App app{"norm estimates, cocycle bounds and expansion for averaging "
                 "operators over spheres in Cayley graphs"};
    app.require_subcommand(1);

    GlobalFlags global;
    app.add_option("--config", global.config_path, "JSON run configuration");
    app.add_option("--out", global.out_dir, "output directory for reports");
    std::uint64_t seed_flag = 0;
    auto* seed_opt = app.add_option("--seed", seed_flag, "random seed");
    int threads_flag = 1;
    auto* threads_opt = app.add_option("--threads", threads_flag, "worker threads");

    std::string group_path, set_text = "sphere:1";
    double p = 2.0;
    int R = 8;

    auto* enumerate = app.add_subcommand("enumerate", "enumerate spheres and growth stats");
    int enum_R = 8;
    std::string window_text;
    enumerate->add_option("--group", group_path, "group spec file");
    enumerate->add_option("--R", enum_R, "ball radius")->required();
    enumerate->add_option("--window", window_text, "growth fit window lo:hi");

    auto* norm = app.add_subcommand("norm", "truncated averaging-operator norm estimate");
    std::string extrap_text;
    norm->add_option("--group", group_path, "group spec file");
    norm->add_option("--set", set_text, "sphere:n | ball:n | annulus:n:theta");
    norm->add_option("--p", p, "exponent in (1, oo)");
    norm->add_option("--R", R, "truncation radius");
    norm->add_option("--extrapolate", extrap_text, "comma-separated R grid");

    auto* cocycle = app.add_subcommand("cocycle-bound", "cocycle upper bound for the norm");
    std::string delta_text = "auto", eps_text = "opt";
    int horizon = -1;
    cocycle->add_option("--group", group_path, "group spec file");
    cocycle->add_option("--set", set_text, "sphere:n | ball:n | annulus:n:theta");
    cocycle->add_option("--p", p, "exponent in (1, oo)");
    cocycle->add_option("--delta", delta_text, "growth exponent: auto or a number");
    cocycle->add_option("--eps", eps_text, "cocycle scale: paper or opt");
    cocycle->add_option("--horizon", horizon, "sup horizon (default support radius + 4)");

    auto* expansion = app.add_subcommand("expansion", "expansion interval for a set");
    int ground_radius = 2, max_size = 0;
    std::string witness_text = "balls,spheres";
    expansion->add_option("--group", group_path, "group spec file");
    expansion->add_option("--set", set_text, "sphere:n | ball:n | annulus:n:theta");
    expansion->add_option("--ground-radius", ground_radius, "witness/search ground ball radius");
    expansion->add_option("--max-size", max_size, "exact search subset cap (0 = skip)");
    expansion->add_option("--witnesses", witness_text, "balls,spheres,random:COUNT:SEED");

    auto* report = app.add_subcommand("report", "run a batch recipe");
    std::string recipe_name;
    report->add_option("recipe", recipe_name,
                       "cohen | sandwich | radial-factor | expansion")
        ->required();

    // global flags are accepted after the subcommand name as well
    for (auto* sub : {enumerate, norm, cocycle, expansion, report}) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);
    if (*seed_opt) global.seed = seed_flag;
    if (*threads_opt) global.threads = threads_flag;
    RunConfig config = load_config(global);

    if (*enumerate) {
        auto rs = load_group(group_path, config);
        auto ball = BallIndex::enumerate(rs, enum_R, config.memory_budget);
        int lo = 1, hi = std::max(3, enum_R);
        if (!window_text.empty()) {
            auto c = window_text.find(':');
            if (c == std::string::npos) throw input_error("--window expects lo:hi");
            lo = std::stoi(window_text.substr(0, c));
            hi = std::stoi(window_text.substr(c + 1));
        }
        hi = std::min(hi, enum_R);
        auto stats = growth_stats(ball, lo, hi);
        std::printf("n\tsphere_size\tball_size\tratio_to_exp\n");
        for (int n = 0; n <= enum_R; ++n)
            std::printf("%d\t%zu\t%zu\t%.12g\n", n, ball.sphere_size(n), ball.ball_size(n),
                        stats.pure_growth_ratios[static_cast<std::size_t>(n)]);
        std::fprintf(stderr, "delta_hat=%.12g%s\n", stats.delta_hat,
                     stats.non_exponential ? " (non-exponential)" : "");
        return 0;
    }

    if (*norm) {
        auto rs = load_group(group_path, config);
        auto spec = parse_set(set_text);
        std::vector<int> grid;
        if (!extrap_text.empty()) {
            std::size_t pos = 0;
            while (pos <= extrap_text.size()) {
                auto end = extrap_text.find(',', pos);
                grid.push_back(std::stoi(extrap_text.substr(
                    pos, end == std::string::npos ? end : end - pos)));
                if (end == std::string::npos) break;
                pos = end + 1;
            }
        }
        int maxR = R;
        for (int g : grid) maxR = std::max(maxR, g);
        auto ball =
            BallIndex::enumerate(rs, maxR + spec.outer_radius(), config.memory_budget);
        auto members = spec.members(ball);
        auto est = averaging_norm(ball, members, p, R, config.solver());
        nlohmann::ordered_json out;
        out["value"] = est.value;
        out["witness_norm"] = detail::lp_norm(est.witness, p);
        out["iterations"] = est.iterations;
        out["converged"] = est.converged;
        out["R"] = R;
        out["p"] = p;
        out["set"] = spec.descriptor();
        out["set_size"] = members.size();
        if (!grid.empty()) {
            std::vector<std::pair<int, double>> points;
            nlohmann::ordered_json per_R = nlohmann::ordered_json::object();
            for (int g : grid) {
                double v = (g == R) ? est.value
                                    : averaging_norm(ball, members, p, g, config.solver()).value;
                points.push_back({g, v});
                per_R[std::to_string(g)] = v;
            }
            out["estimates"] = per_R;
            out["extrapolated"] = extrapolate_truncation_limit(points);
        }
        std::cout << out.dump(2) << "\n";
        return 0;
    }

    if (*cocycle) {
        auto rs = load_group(group_path, config);
        auto spec = parse_set(set_text);
        int H = horizon >= 0 ? horizon : spec.outer_radius() + config.horizon_pad;
        int needed = std::max({H, spec.outer_radius(), config.fit_hi});
        auto ball = BallIndex::enumerate(rs, needed, config.memory_budget);
        double delta;
        if (delta_text == "auto") {
            auto stats = growth_stats(ball, config.fit_lo, std::min(config.fit_hi, ball.radius()));
            if (stats.non_exponential)
                throw input_error("growth looks non-exponential (delta_hat=" +
                                  std::to_string(stats.delta_hat) +
                                  "); pass --delta explicitly");
            delta = stats.delta_hat;
        } else {
            delta = std::stod(delta_text);
            if (!(delta > 0)) throw input_error("--delta must be positive");
        }
        auto members = spec.members(ball);
        BoundReport rep;
        double eps;
        if (eps_text == "paper") {
            double pc = p / (p - 1.0);
            eps = delta / (p * pc);
            rep = cocycle_upper_bound(ball, members, p, eps, H, config.threads,
                                      spec.descriptor());
        } else if (eps_text == "opt") {
            std::tie(eps, rep) = optimize_epsilon(ball, members, p, delta, H, config.threads,
                                                  spec.descriptor());
        } else {
            throw input_error("--eps must be 'paper' or 'opt'");
        }
        double pc = p / (p - 1.0);
        nlohmann::ordered_json out;
        out["set"] = spec.descriptor();
        out["set_size"] = rep.set_size;
        out["p"] = p;
        out["delta"] = delta;
        out["eps"] = eps;
        out["factor_minus"] = rep.factor_minus;
        out["factor_plus"] = rep.factor_plus;
        out["bound"] = rep.bound;
        out["exactness"] = to_string(rep.exactness);
        out["trivial_lower"] = std::pow(static_cast<double>(rep.set_size), -1.0 / pc);
        std::cout << out.dump(2) << "\n";
        return 0;
    }

    if (*expansion) {
        auto rs = load_group(group_path, config);
        auto spec = parse_set(set_text);
        int needed = std::max({spec.outer_radius() + config.horizon_pad, ground_radius,
                               config.fit_hi});
        auto ball = BallIndex::enumerate(rs, needed, config.memory_budget);
        auto members = spec.members(ball);
        auto ground = BallIndex::enumerate(rs, ground_radius, config.memory_budget);

        ExpansionReport rep;
        rep.descriptor = spec.descriptor();
        rep.set_size = members.size();
        rep.lower_bound = 1.0;
        rep.lower_provenance = "trivial";
        if (rs.tree_like() && spec.outer_radius() > 0) {
            auto stats = growth_stats(ball, config.fit_lo, std::min(config.fit_hi, ball.radius()));
            int H = std::min(spec.outer_radius() + config.horizon_pad, ball.radius());
            for (double pg : {1.1, 1.25, 1.5, 1.75, 2.0}) {
                auto [eps, bound] =
                    optimize_epsilon(ball, members, pg, stats.delta_hat, H, config.threads);
                if (bound.exactness != Exactness::exact_tree) continue;
                double lb = expansion_lower_bound(members.size(), pg, bound.bound);
                if (lb > rep.lower_bound) {
                    rep.lower_bound = lb;
                    rep.lower_p = pg;
                    rep.lower_provenance = "cocycle";
                }
            }
        }
        auto family = parse_witnesses(witness_text, config.seed);
        auto witnesses = expansion_witnesses(rs, members, ground, family);
        rep.witness_min = witnesses.min_ratio;
        rep.witness_best = witnesses.best_descriptor;
        rep.c_estimate = witnesses.min_ratio / static_cast<double>(members.size());
        if (max_size > 0) {
            auto exact = expansion_exact(rs, members, ground, max_size);
            rep.exact_min = exact.min_ratio;
            rep.exact_argmin = exact.argmin;
        }

        nlohmann::ordered_json out;
        out["set"] = rep.descriptor;
        out["set_size"] = rep.set_size;
        out["lower_bound"] = rep.lower_bound;
        out["lower_p"] = rep.lower_p;
        out["lower_provenance"] = rep.lower_provenance;
        if (rep.exact_min) {
            out["exact_min"] = *rep.exact_min;
            std::vector<std::string> argmin;
            for (const auto& e : rep.exact_argmin) argmin.push_back(rs.format(e));
            out["exact_argmin"] = argmin;
        }
        out["witness_min"] = rep.witness_min;
        out["witness_best"] = rep.witness_best;
        out["c_estimate"] = rep.c_estimate;
        std::cout << out.dump(2) << "\n";

        std::filesystem::create_directories(config.out_dir);
        std::ofstream tsv(config.out_dir + "/expansion_witnesses.tsv");
        tsv << "kind\tparam\tx_size\tsx_size\tratio\n";
        for (const auto& row : witnesses.rows)
            tsv << row.kind << "\t" << row.param << "\t" << row.x_size << "\t" << row.sx_size
                << "\t" << nlohmann::json(row.ratio).dump() << "\n";
        return 0;
    }

    if (*report) {
        config.recipe = recipe_name;
        std::filesystem::create_directories(config.out_dir);
        auto table = run_recipe(config);
        auto paths = write_report(table, config);
        std::cout << "wrote " << paths.json_path << " and " << paths.tsv_path << "\n";
        for (const auto& w : table.warnings) std::cerr << "warning: " << w << "\n";
        return 0;
    }

    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const sphavg::input_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const sphavg::resource_error& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return 3;
    } catch (const sphavg::numerical_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
