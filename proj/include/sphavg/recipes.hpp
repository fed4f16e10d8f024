#pragma once

// Experiment recipes: batch runs over spheres that tabulate norm estimates
// against closed forms and two-sided bounds.  Reports are emitted as TSV and
// JSON side by side; re-runs are byte-identical apart from the timestamp.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sphavg/ball.hpp"
#include "sphavg/cocycle.hpp"
#include "sphavg/errors.hpp"
#include "sphavg/expansion.hpp"
#include "sphavg/group_io.hpp"
#include "sphavg/norms.hpp"

namespace sphavg {

inline constexpr int kTableSchemaVersion = 1;

struct RunConfig {
    nlohmann::json group_spec = {{"preset", "free"}, {"rank", 2}};
    std::string recipe;
    std::vector<double> p_list{1.25, 1.5};
    int n_min = 0;
    int n_max = 3;
    std::vector<int> R_schedule{6, 8, 10, 12};
    double tol = 1e-8;
    int max_iters = 5000;
    int restarts = 3;
    std::uint64_t seed = 42;
    int threads = 1;
    std::size_t memory_budget = kDefaultElementBudget;
    int horizon_pad = 4;
    int fit_lo = 1;
    int fit_hi = 8;
    std::string out_dir = ".";
    // expansion recipe knobs
    int ground_radius = 2;
    bool witness_balls = true;
    bool witness_spheres = true;
    int witness_random = 0;

    SolverOptions solver() const { return SolverOptions{tol, max_iters, restarts, seed, threads}; }

    static RunConfig from_json(const nlohmann::json& j) {
        RunConfig c;
        if (j.contains("group")) c.group_spec = j.at("group");
        if (j.contains("recipe")) c.recipe = j.at("recipe").get<std::string>();
        if (j.contains("p_list")) c.p_list = j.at("p_list").get<std::vector<double>>();
        if (j.contains("n_min")) c.n_min = j.at("n_min").get<int>();
        if (j.contains("n_max")) c.n_max = j.at("n_max").get<int>();
        if (j.contains("R_schedule")) c.R_schedule = j.at("R_schedule").get<std::vector<int>>();
        if (j.contains("tol")) c.tol = j.at("tol").get<double>();
        if (j.contains("max_iters")) c.max_iters = j.at("max_iters").get<int>();
        if (j.contains("restarts")) c.restarts = j.at("restarts").get<int>();
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("threads")) c.threads = j.at("threads").get<int>();
        if (j.contains("memory_budget")) c.memory_budget = j.at("memory_budget").get<std::size_t>();
        if (j.contains("horizon_pad")) c.horizon_pad = j.at("horizon_pad").get<int>();
        if (j.contains("fit_window")) {
            c.fit_lo = j.at("fit_window").at(0).get<int>();
            c.fit_hi = j.at("fit_window").at(1).get<int>();
        }
        if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
        if (j.contains("ground_radius")) c.ground_radius = j.at("ground_radius").get<int>();
        if (j.contains("witness_balls")) c.witness_balls = j.at("witness_balls").get<bool>();
        if (j.contains("witness_spheres")) c.witness_spheres = j.at("witness_spheres").get<bool>();
        if (j.contains("witness_random")) c.witness_random = j.at("witness_random").get<int>();
        c.validate();
        return c;
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["group"] = group_spec;
        j["recipe"] = recipe;
        j["p_list"] = p_list;
        j["n_min"] = n_min;
        j["n_max"] = n_max;
        j["R_schedule"] = R_schedule;
        j["tol"] = tol;
        j["max_iters"] = max_iters;
        j["restarts"] = restarts;
        j["seed"] = seed;
        j["threads"] = threads;
        j["memory_budget"] = memory_budget;
        j["horizon_pad"] = horizon_pad;
        j["fit_window"] = {fit_lo, fit_hi};
        j["out_dir"] = out_dir;
        j["ground_radius"] = ground_radius;
        j["witness_balls"] = witness_balls;
        j["witness_spheres"] = witness_spheres;
        j["witness_random"] = witness_random;
        return j;
    }

    void validate() const {
        for (double p : p_list)
            if (!(p > 1.0) || !std::isfinite(p))
                throw input_error("p_list entries must lie in (1, oo)");
        if (n_min < 0 || n_max < n_min) throw input_error("invalid n range");
        if (R_schedule.empty()) throw input_error("R schedule must not be empty");
        for (int R : R_schedule)
            if (R < 0) throw input_error("R schedule entries must be >= 0");
    }
};

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<nlohmann::json>> rows;
    std::vector<std::string> warnings;

    void write_tsv(std::ostream& out) const {
        for (const auto& w : warnings) out << "# warning: " << w << "\n";
        for (std::size_t i = 0; i < columns.size(); ++i)
            out << (i ? "\t" : "") << columns[i];
        out << "\n";
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                out << (i ? "\t" : "");
                if (row[i].is_string()) out << row[i].get<std::string>();
                else out << row[i].dump();
            }
            out << "\n";
        }
    }
};

inline std::string utc_timestamp() {
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline nlohmann::ordered_json table_json(const Table& table, const RunConfig& config) {
    nlohmann::ordered_json j;
    j["schema_version"] = kTableSchemaVersion;
    j["recipe"] = table.name;
    j["generated_at"] = utc_timestamp();
    j["config"] = config.to_json();
    j["columns"] = table.columns;
    j["rows"] = table.rows;
    j["warnings"] = table.warnings;
    return j;
}

namespace detail {

// Enumerates up to `needed` within the budget; reports the shortfall.
inline BallIndex prepare_ball(const RewritingSystem& rs, int needed, const RunConfig& config,
                              std::vector<std::string>& warnings) {
    BallIndex ball = BallIndex::enumerate_up_to(rs, needed, config.memory_budget);
    if (ball.radius() < needed)
        warnings.push_back("memory budget reached at radius " +
                           std::to_string(ball.radius()) + " (wanted " +
                           std::to_string(needed) + "); schedule auto-shrunk");
    return ball;
}

// Largest usable schedule entries for a given support radius.
inline std::vector<int> usable_schedule(const std::vector<int>& schedule, int ball_radius,
                                        int n) {
    std::vector<int> out;
    for (int R : schedule)
        if (R + n <= ball_radius) out.push_back(R);
    return out;
}

inline double cohen_exact_value(int k, int n) {
    return ((1.0 - 1.0 / k) * n + 1.0) * std::pow(2.0 * k - 1.0, -n / 2.0);
}

inline double fitted_delta(const BallIndex& ball, const RunConfig& config) {
    int hi = std::min(config.fit_hi, ball.radius());
    int lo = std::min(config.fit_lo, std::max(1, hi - 2));
    return growth_stats(ball, lo, hi).delta_hat;
}

} // namespace detail

// Spherical p=2 norms on a free group against the closed form
// ((1-1/k) n + 1) (2k-1)^(-n/2), with truncated estimates extrapolated over the
// R schedule.
inline Table recipe_cohen(const RunConfig& config) {
    auto rs = group_from_json(config.group_spec);
    if (!rs.preset().is_free_group())
        throw input_error("recipe cohen requires the free group preset");
    int k = rs.preset().params[0];

    Table table;
    table.name = "cohen";
    int maxR = *std::max_element(config.R_schedule.begin(), config.R_schedule.end());
    BallIndex ball = detail::prepare_ball(rs, maxR + config.n_max, config, table.warnings);

    table.columns = {"n", "sphere_size", "exact"};
    for (int R : config.R_schedule) table.columns.push_back("est_R" + std::to_string(R));
    table.columns.insert(table.columns.end(),
                         {"extrapolated", "rel_err_last", "rel_err_extrapolated"});

    for (int n = config.n_min; n <= config.n_max; ++n) {
        if (n > ball.radius()) break;
        auto schedule = detail::usable_schedule(config.R_schedule, ball.radius(), n);
        if (schedule.empty()) {
            table.warnings.push_back("no usable R for n=" + std::to_string(n));
            continue;
        }
        double exact = detail::cohen_exact_value(k, n);
        auto sphere = ball.sphere(n);
        auto a = SupportedFunction::indicator(sphere, 1.0 / static_cast<double>(sphere.size()));
        std::vector<nlohmann::json> row{n, sphere.size(), exact};
        std::vector<std::pair<int, double>> points;
        for (int R : config.R_schedule) {
            if (R + n > ball.radius()) {
                row.push_back("-");
                continue;
            }
            auto op = TruncatedOperator::build(ball, a, R);
            double est = norm2_estimate(op, config.solver()).value;
            points.push_back({R, est});
            row.push_back(est);
        }
        double extrap = extrapolate_truncation_limit(points);
        row.push_back(extrap);
        row.push_back(std::abs(points.back().second - exact) / exact);
        row.push_back(std::abs(extrap - exact) / exact);
        table.rows.push_back(std::move(row));
    }
    return table;
}

// Two-sided sandwich for p in (1,2): trivial lower bound, truncated estimate,
// and cocycle upper bounds at the starting and optimized scale.
inline Table recipe_sandwich(const RunConfig& config) {
    for (double p : config.p_list)
        if (!(p > 1.0 && p < 2.0))
            throw input_error("recipe sandwich requires p_list within (1, 2)");
    auto rs = group_from_json(config.group_spec);

    Table table;
    table.name = "sandwich";
    int R = *std::max_element(config.R_schedule.begin(), config.R_schedule.end());
    int horizon = config.n_max + config.horizon_pad;
    int needed = std::max({R + config.n_max, horizon, config.fit_hi});
    BallIndex ball = detail::prepare_ball(rs, needed, config, table.warnings);
    while (R + config.n_max > ball.radius() && R > 0) --R;
    horizon = std::min(horizon, ball.radius());

    double delta = detail::fitted_delta(ball, config);
    table.columns = {"n",           "p",        "sphere_size", "lower",     "estimate",
                     "upper_start", "upper_opt", "eps_opt",     "ratio",     "exactness"};
    for (int n = config.n_min; n <= std::min(config.n_max, ball.radius()); ++n) {
        auto sphere = ball.sphere(n);
        for (double p : config.p_list) {
            double pc = p / (p - 1.0);
            double lower = std::pow(static_cast<double>(sphere.size()), -1.0 / pc);
            double est = averaging_norm(ball, sphere, p, R, config.solver()).value;
            int H = std::min(n + config.horizon_pad, ball.radius());
            auto start =
                cocycle_upper_bound(ball, sphere, p, delta / (p * pc), H, config.threads);
            auto [eps_opt, opt] =
                optimize_epsilon(ball, sphere, p, delta, H, config.threads);
            table.rows.push_back({n, p, sphere.size(), lower, est, start.bound, opt.bound,
                                  eps_opt, opt.bound / lower, to_string(opt.exactness)});
        }
    }
    return table;
}

// Normalized p=2 quantity est * |S(n)|^(1/2) / (n+1), bounded for pure
// exponential growth; free presets also get the closed-form column.
inline Table recipe_radial_factor(const RunConfig& config) {
    for (double p : config.p_list)
        if (p != 2.0) throw input_error("recipe radial-factor requires p = 2");
    auto rs = group_from_json(config.group_spec);

    Table table;
    table.name = "radial-factor";
    int R = *std::max_element(config.R_schedule.begin(), config.R_schedule.end());
    BallIndex ball = detail::prepare_ball(rs, R + config.n_max, config, table.warnings);
    while (R + config.n_max > ball.radius() && R > 0) --R;

    bool free_preset = rs.preset().is_free_group();
    table.columns = {"n", "sphere_size", "estimate", "normalized_estimate"};
    if (free_preset) {
        table.columns.push_back("exact");
        table.columns.push_back("normalized_exact");
    }
    for (int n = config.n_min; n <= std::min(config.n_max, ball.radius()); ++n) {
        auto sphere = ball.sphere(n);
        auto a = SupportedFunction::indicator(sphere, 1.0 / static_cast<double>(sphere.size()));
        auto op = TruncatedOperator::build(ball, a, R);
        double est = norm2_estimate(op, config.solver()).value;
        double factor = std::sqrt(static_cast<double>(sphere.size())) / (n + 1.0);
        std::vector<nlohmann::json> row{n, sphere.size(), est, est * factor};
        if (free_preset) {
            double exact = detail::cohen_exact_value(rs.preset().params[0], n);
            row.push_back(exact);
            row.push_back(exact * factor);
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

// Expansion of spheres: norm-fed lower bound over a p grid, witnessed upper
// bound, and the witnessed expansion constant c = witness_min / |S(n)|.
inline Table recipe_expansion(const RunConfig& config) {
    auto rs = group_from_json(config.group_spec);

    Table table;
    table.name = "expansion";
    static constexpr double kPGrid[] = {1.1, 1.25, 1.5, 1.75, 2.0};
    int horizon = config.n_max + config.horizon_pad;
    int needed = std::max({config.ground_radius, config.n_max, horizon, config.fit_hi});
    BallIndex ball = detail::prepare_ball(rs, needed, config, table.warnings);
    int ground_radius = std::min(config.ground_radius, ball.radius());
    BallIndex ground = BallIndex::enumerate(rs, ground_radius, config.memory_budget);

    // Only certified norm upper bounds may feed the lower bound; outside
    // tree-like systems fall back to the trivial bound 1.
    bool tree = rs.tree_like();
    double delta = tree ? detail::fitted_delta(ball, config) : 0.0;

    table.columns = {"n",          "sphere_size", "lower_bound", "lower_p",
                     "provenance", "witness_min", "witness_best", "c_estimate"};
    WitnessFamily family{config.witness_balls, config.witness_spheres, config.witness_random,
                         config.seed};
    for (int n = config.n_min; n <= std::min(config.n_max, ball.radius()); ++n) {
        auto sphere = ball.sphere(n);
        double best_lower = 1.0, best_p = 0.0;
        std::string provenance = "trivial";
        if (tree && n > 0) {
            int H = std::min(n + config.horizon_pad, ball.radius());
            for (double p : kPGrid) {
                auto [eps, rep] =
                    optimize_epsilon(ball, sphere, p, delta, H, config.threads);
                if (rep.exactness != Exactness::exact_tree) continue;
                double lb = expansion_lower_bound(sphere.size(), p, rep.bound);
                if (lb > best_lower) {
                    best_lower = lb;
                    best_p = p;
                    provenance = "cocycle";
                }
            }
        }
        auto witnesses = expansion_witnesses(rs, sphere.members(), ground, family);
        table.rows.push_back({n, sphere.size(), best_lower, best_p, provenance,
                              witnesses.min_ratio, witnesses.best_descriptor,
                              witnesses.min_ratio / static_cast<double>(sphere.size())});
    }
    return table;
}

inline Table run_recipe(const RunConfig& config) {
    if (config.recipe == "cohen") return recipe_cohen(config);
    if (config.recipe == "sandwich") return recipe_sandwich(config);
    if (config.recipe == "radial-factor") return recipe_radial_factor(config);
    if (config.recipe == "expansion") return recipe_expansion(config);
    throw input_error("unknown recipe: " + config.recipe +
                      " (expected cohen | sandwich | radial-factor | expansion)");
}

struct ReportPaths {
    std::string json_path;
    std::string tsv_path;
};

inline ReportPaths write_report(const Table& table, const RunConfig& config) {
    ReportPaths paths;
    paths.json_path = config.out_dir + "/" + table.name + ".json";
    paths.tsv_path = config.out_dir + "/" + table.name + ".tsv";
    std::ofstream js(paths.json_path);
    if (!js) throw input_error("cannot write " + paths.json_path);
    js << table_json(table, config).dump(2) << "\n";
    std::ofstream ts(paths.tsv_path);
    if (!ts) throw input_error("cannot write " + paths.tsv_path);
    table.write_tsv(ts);
    return paths;
}

} // namespace sphavg
