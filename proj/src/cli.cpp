#include "uncertain_eval/cli.hpp"

#include "uncertain_eval/barrier.hpp"
#include "uncertain_eval/csv_io.hpp"
#include "uncertain_eval/error.hpp"
#include "uncertain_eval/metrics.hpp"
#include "uncertain_eval/random.hpp"
#include "uncertain_eval/report.hpp"
#include "uncertain_eval/simulate.hpp"
#include "uncertain_eval/strategies.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

namespace uncertain_eval::cli {
namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr const char* kToolVersion = UNCERTAIN_EVAL_VERSION;
constexpr std::uint64_t kTrialStream = 0x747269616c; // "trial"

std::uint64_t fresh_seed() {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

double parse_number(const std::string& text, const std::string& flag) {
    std::string lower = text;
    std::transform(lower.begin(), lower.end(), lower.begin(), ::tolower);
    if (lower == "inf" || lower == "infinity" || lower == "+inf")
        return std::numeric_limits<double>::infinity();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty() ||
        !std::isfinite(value))
        throw InputError(flag + ": invalid number '" + text + "'");
    return value;
}

double parse_finite(const std::string& text, const std::string& flag) {
    const double v = parse_number(text, flag);
    if (!std::isfinite(v)) throw InputError(flag + ": value must be finite");
    return v;
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

// Provenance record written next to file outputs. Holds no timestamps so a
// re-run with the same inputs reproduces it byte for byte.
struct RunManifest {
    json doc;

    explicit RunManifest(const std::string& command) {
        doc["command"] = command;
        doc["tool_version"] = kToolVersion;
        doc["inputs"] = json::object();
        doc["config"] = json::object();
        doc["seed"] = nullptr;
        doc["outputs"] = json::array();
    }

    void write(const fs::path& path) const { write_file(path, doc.dump(2) + "\n"); }
};

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// --- fit -------------------------------------------------------------------

struct FitArgs {
    std::string obs;
    std::string fallback = "pooled";
    std::string out;
};

int cmd_fit(const FitArgs& a, std::ostream& out, std::ostream& err) {
    const auto fallback = SigmaFallback::parse(a.fallback);
    const auto obs = csv::read_observations_file(a.obs);
    const auto data = fit_uncertainty(obs, fallback);

    std::ostringstream csv_text;
    csv::write_feedback(csv_text, data);
    write_file(a.out, csv_text.str());

    std::size_t single = 0;
    for (const auto& e : data.entries) single += e.trial_count < 2 ? 1 : 0;
    std::optional<double> pooled;
    try {
        pooled = pooled_sigma(data);
    } catch (const UnavailableError&) {
    }

    RunManifest m("fit");
    m.doc["inputs"]["obs"] = a.obs;
    m.doc["config"]["fallback"] = a.fallback;
    m.doc["outputs"].push_back(a.out);
    m.write(a.out + ".manifest.json");

    json summary;
    summary["n"] = data.size();
    summary["pooled_sigma"] = pooled ? json(*pooled) : json(nullptr);
    summary["single_trial_pairs"] = single;
    summary["fallback"] = a.fallback;
    out << dump(summary);
    err << "fit: " << data.size() << " pairs written to " << a.out << "\n";
    return kExitOk;
}

// --- distinguish -----------------------------------------------------------

struct DistinguishArgs {
    std::string feedback;
    std::string s1;
    std::string s2;
};

int cmd_distinguish(const DistinguishArgs& a, std::ostream& out) {
    const double s1 = parse_finite(a.s1, "--s1");
    const double s2 = parse_finite(a.s2, "--s2");
    const auto data = csv::read_feedback_file(a.feedback);
    const auto barrier = barrier_distribution(data);
    out << dump(to_json(distinguishability_test(s1, s2, barrier)));
    return kExitOk;
}

// --- rmse-dist -------------------------------------------------------------

struct RmseDistArgs {
    std::string feedback;
    std::string pred;
    std::size_t samples = 10000;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> tau;
    std::optional<std::string> dump_path;
};

int cmd_rmse_dist(const RmseDistArgs& a, std::ostream& out) {
    McConfig cfg;
    cfg.sample_count = a.samples;
    cfg.seed = a.seed.value_or(fresh_seed());
    if (a.tau) cfg.predictor_tau = parse_finite(*a.tau, "--tau");
    cfg.validate();

    const auto data = csv::read_feedback_file(a.feedback);
    const auto predictions = csv::read_predictions_file(a.pred);
    const auto dist = rmse_distribution(data, predictions, cfg);
    const auto barrier = barrier_distribution(data);

    if (a.dump_path) {
        std::ostringstream text;
        csv::write_samples(text, dist.samples);
        write_file(*a.dump_path, text.str());
        RunManifest m("rmse-dist");
        m.doc["inputs"]["feedback"] = a.feedback;
        m.doc["inputs"]["pred"] = a.pred;
        m.doc["config"]["samples"] = cfg.sample_count;
        m.doc["config"]["tau"] = cfg.predictor_tau ? json(*cfg.predictor_tau) : json(nullptr);
        m.doc["seed"] = cfg.seed;
        m.doc["outputs"].push_back(*a.dump_path);
        m.write(*a.dump_path + ".manifest.json");
    }

    json j = summary_json(dist);
    j["predictor_tau"] = cfg.predictor_tau ? json(*cfg.predictor_tau) : json(nullptr);
    j["barrier_mean"] = barrier.gaussian.mean;
    j["barrier_variance"] = barrier.gaussian.variance;
    out << dump(j);
    return kExitOk;
}

// --- strategies ------------------------------------------------------------

struct StrategiesArgs {
    std::optional<std::string> obs;
    std::optional<std::string> feedback;
    std::string pred;
    std::optional<std::string> denoise_threshold;
    std::string denoise_resampler = "median";
    std::size_t denoise_max_iter = 100;
    std::optional<std::string> tau;
    std::optional<std::string> omit_alpha;
    std::optional<std::uint64_t> seed;
};

int cmd_strategies(const StrategiesArgs& a, std::ostream& out, std::ostream& err) {
    if (!a.obs && !a.feedback) throw InputError("strategies: need --obs or --feedback");

    StrategySelection sel;
    if (a.denoise_threshold) {
        DenoiseConfig d;
        d.threshold = parse_number(*a.denoise_threshold, "--denoise-threshold");
        d.max_iterations = a.denoise_max_iter;
        if (a.denoise_resampler == "median")
            d.resampler = Resampler::replace_with_median;
        else if (a.denoise_resampler == "redraw")
            d.resampler = Resampler::redraw_from_model;
        else
            throw InputError("--denoise-resampler: expected median or redraw");
        if (!a.seed && d.resampler == Resampler::redraw_from_model) {
            d.seed = fresh_seed();
            err << "strategies: generated seed " << d.seed << "\n";
        } else {
            d.seed = a.seed.value_or(0);
        }
        d.validate();
        sel.denoise = d;
    }
    if (a.tau) {
        sel.predictor_tau = parse_finite(*a.tau, "--tau");
        if (*sel.predictor_tau < 0.0) throw InputError("--tau: must be >= 0");
    }
    if (a.omit_alpha) {
        OmissionConfig o{parse_finite(*a.omit_alpha, "--omit-alpha")};
        o.validate();
        sel.omission = o;
    }
    if (!sel.denoise && !sel.predictor_tau && !sel.omission)
        throw InputError("strategies: select at least one of --denoise-threshold, --tau, --omit-alpha");

    StrategyInputs in;
    in.predictions = csv::read_predictions_file(a.pred);
    if (a.obs) in.observations = csv::read_observations_file(*a.obs);
    in.data = a.feedback ? csv::read_feedback_file(*a.feedback)
                         : fit_uncertainty(*in.observations, SigmaFallback::pooled());

    json arr = json::array();
    for (const auto& r : run_strategy_comparison(in, sel)) arr.push_back(to_json(r));
    out << dump(arr);
    return kExitOk;
}

// --- simulate --------------------------------------------------------------

template <typename T>
std::optional<T> spec_field(const json& spec, const char* name) {
    if (!spec.contains(name) || spec[name].is_null()) return std::nullopt;
    const auto& v = spec[name];
    if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) throw InputError(std::string("spec field '") + name + "' must be a number");
    } else {
        if (!v.is_number_integer() || v.get<long long>() < 0)
            throw InputError(std::string("spec field '") + name +
                             "' must be a non-negative integer");
    }
    return v.get<T>();
}

template <typename T>
T required_field(const json& spec, const char* name) {
    auto v = spec_field<T>(spec, name);
    if (!v) throw InputError(std::string("spec field '") + name + "' is required");
    return *v;
}

PopulationSpec parse_population_spec(const json& spec, bool& seed_given) {
    if (!spec.is_object()) throw InputError("spec must be a JSON object");
    PopulationSpec p;
    p.n_users = required_field<std::size_t>(spec, "n_users");
    p.n_items = required_field<std::size_t>(spec, "n_items");
    if (p.n_users < 1) throw InputError("spec field 'n_users' must be >= 1");
    if (p.n_items < 1) throw InputError("spec field 'n_items' must be >= 1");
    if (spec.contains("scale")) {
        const auto& s = spec["scale"];
        if (!s.is_object()) throw InputError("spec field 'scale' must be an object");
        p.scale.min = required_field<double>(s, "min");
        p.scale.max = required_field<double>(s, "max");
        p.scale.step = spec_field<double>(s, "step");
        try {
            p.scale.validate();
        } catch (const InputError& e) {
            throw InputError(std::string("spec field 'scale': ") + e.what());
        }
    }
    p.sigma_lo = required_field<double>(spec, "sigma_lo");
    p.sigma_hi = required_field<double>(spec, "sigma_hi");
    if (!(p.sigma_lo >= 0.0)) throw InputError("spec field 'sigma_lo' must be >= 0");
    if (!(p.sigma_hi >= p.sigma_lo)) throw InputError("spec field 'sigma_hi' must be >= sigma_lo");
    p.density = spec_field<double>(spec, "density").value_or(1.0);
    if (!(p.density > 0.0 && p.density <= 1.0))
        throw InputError("spec field 'density' must lie in (0, 1]");
    p.bias_sd = spec_field<double>(spec, "bias_sd").value_or(0.0);
    if (!(p.bias_sd >= 0.0)) throw InputError("spec field 'bias_sd' must be >= 0");
    auto seed = spec_field<std::uint64_t>(spec, "seed");
    seed_given = seed.has_value();
    p.seed = seed.value_or(0);
    p.validate();
    return p;
}

struct SimulateArgs {
    std::string spec;
    std::size_t trials = 5;
    bool discretise = false;
    std::string out_dir;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
    if (a.trials < 1) throw InputError("--trials must be >= 1");
    std::ifstream in(a.spec);
    if (!in) throw InputError("cannot open '" + a.spec + "'");
    json spec_json;
    try {
        spec_json = json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError("spec is not valid JSON: " + std::string(e.what()));
    }
    bool seed_given = false;
    auto spec = parse_population_spec(spec_json, seed_given);
    if (!seed_given) {
        spec.seed = fresh_seed();
        err << "simulate: generated seed " << spec.seed << "\n";
    }

    const auto truth = generate_population(spec);
    const auto obs = draw_trials(truth, a.trials, a.discretise, child_seed(spec.seed, kTrialStream));

    const fs::path dir(a.out_dir);
    std::ostringstream obs_csv, fb_csv, pred_csv;
    csv::write_observations(obs_csv, obs);
    csv::write_feedback(fb_csv, truth.dataset);
    csv::write_predictions(pred_csv, *truth.predictions);
    write_file(dir / "observations.csv", obs_csv.str());
    write_file(dir / "feedback.csv", fb_csv.str());
    write_file(dir / "predictions.csv", pred_csv.str());

    RunManifest m("simulate");
    m.doc["inputs"]["spec"] = a.spec;
    json cfg;
    cfg["n_users"] = spec.n_users;
    cfg["n_items"] = spec.n_items;
    cfg["scale"] = {{"min", spec.scale.min}, {"max", spec.scale.max},
                    {"step", spec.scale.step ? json(*spec.scale.step) : json(nullptr)}};
    cfg["sigma_lo"] = spec.sigma_lo;
    cfg["sigma_hi"] = spec.sigma_hi;
    cfg["density"] = spec.density;
    cfg["bias_sd"] = spec.bias_sd;
    cfg["trials"] = a.trials;
    cfg["discretised"] = a.discretise;
    m.doc["config"] = cfg;
    m.doc["seed"] = spec.seed;
    m.doc["outputs"] = {"observations.csv", "feedback.csv", "predictions.csv"};
    m.write(dir / "manifest.json");

    json summary;
    summary["pairs"] = truth.dataset.size();
    summary["observations"] = obs.observations.size();
    summary["discretised"] = a.discretise;
    summary["seed"] = spec.seed;
    out << dump(summary);
    return kExitOk;
}

// --- histogram -------------------------------------------------------------

struct HistogramArgs {
    std::string obs;
    std::string user;
    std::string item;
    std::string width;
    std::string out;
};

int cmd_histogram(const HistogramArgs& a, std::ostream& out) {
    const double width = parse_finite(a.width, "--width");
    const auto obs = csv::read_observations_file(a.obs);
    std::vector<double> values;
    const FeedbackKey key{a.user, a.item};
    for (const auto& o : obs.observations)
        if (o.key == key) values.push_back(o.value);
    if (values.empty()) throw InputError("no observations for " + to_string(key));
    const auto bins = histogram(values, width);

    std::ostringstream text;
    csv::write_histogram(text, bins);
    write_file(a.out, text.str());
    RunManifest m("histogram");
    m.doc["inputs"]["obs"] = a.obs;
    m.doc["config"] = {{"user_id", a.user}, {"item_id", a.item}, {"width", width}};
    m.doc["outputs"].push_back(a.out);
    m.write(a.out + ".manifest.json");

    json summary;
    summary["bins"] = bins.size();
    summary["observations"] = values.size();
    out << dump(summary);
    return kExitOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Evaluate accuracy metrics under human uncertainty in user feedback",
                 "uncertain-eval"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    FitArgs fit_args;
    auto* fit = app.add_subcommand("fit", "Estimate per-pair mu and sigma from repeated trials");
    fit->add_option("--obs", fit_args.obs, "Observation CSV")->required();
    fit->add_option("--fallback", fit_args.fallback, "Sigma for single-trial pairs: zero|pooled|fixed:V");
    fit->add_option("--out", fit_args.out, "Feedback CSV to write")->required();

    DistinguishArgs dist_args;
    auto* dist = app.add_subcommand("distinguish", "Shifted-barrier test of two metric scores");
    dist->add_option("--feedback", dist_args.feedback, "Feedback CSV")->required();
    dist->add_option("--s1", dist_args.s1, "First score")->required();
    dist->add_option("--s2", dist_args.s2, "Second score")->required();

    RmseDistArgs rmse_args;
    auto* rmse_cmd = app.add_subcommand("rmse-dist", "Monte Carlo distribution of RMSE");
    rmse_cmd->add_option("--feedback", rmse_args.feedback, "Feedback CSV")->required();
    rmse_cmd->add_option("--pred", rmse_args.pred, "Prediction CSV")->required();
    rmse_cmd->add_option("--samples", rmse_args.samples, "Monte Carlo samples (>= 100)");
    rmse_cmd->add_option("--seed", rmse_args.seed, "RNG seed");
    rmse_cmd->add_option("--tau", rmse_args.tau, "Predictor noise std");
    rmse_cmd->add_option("--dump", rmse_args.dump_path, "Sample dump CSV");

    StrategiesArgs strat_args;
    auto* strat = app.add_subcommand("strategies", "Compare uncertainty-handling strategies");
    strat->add_option("--obs", strat_args.obs, "Observation CSV");
    strat->add_option("--feedback", strat_args.feedback, "Feedback CSV");
    strat->add_option("--pred", strat_args.pred, "Prediction CSV")->required();
    strat->add_option("--denoise-threshold", strat_args.denoise_threshold,
                      "Re-rating de-noising threshold (inf = identity)");
    strat->add_option("--denoise-resampler", strat_args.denoise_resampler, "median|redraw");
    strat->add_option("--denoise-max-iter", strat_args.denoise_max_iter, "De-noising pass cap");
    strat->add_option("--tau", strat_args.tau, "Predictor noise std");
    strat->add_option("--omit-alpha", strat_args.omit_alpha, "Omission significance level");
    strat->add_option("--seed", strat_args.seed, "RNG seed for redraws");

    SimulateArgs sim_args;
    auto* sim = app.add_subcommand("simulate", "Generate a synthetic population and trials");
    sim->add_option("--spec", sim_args.spec, "Population spec JSON")->required();
    sim->add_option("--trials", sim_args.trials, "Trials per pair")->required();
    sim->add_flag("--discretise", sim_args.discretise, "Round to the scale step and clamp");
    sim->add_option("--out-dir", sim_args.out_dir, "Output directory")->required();

    HistogramArgs hist_args;
    auto* hist = app.add_subcommand("histogram", "Histogram of one pair's repeated ratings");
    hist->add_option("--obs", hist_args.obs, "Observation CSV")->required();
    hist->add_option("--user", hist_args.user, "User id")->required();
    hist->add_option("--item", hist_args.item, "Item id")->required();
    hist->add_option("--width", hist_args.width, "Bin width")->required();
    hist->add_option("--out", hist_args.out, "Histogram CSV to write")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (fit->parsed()) return cmd_fit(fit_args, out, err);
        if (dist->parsed()) return cmd_distinguish(dist_args, out);
        if (rmse_cmd->parsed()) return cmd_rmse_dist(rmse_args, out);
        if (strat->parsed()) return cmd_strategies(strat_args, out, err);
        if (sim->parsed()) return cmd_simulate(sim_args, out, err);
        if (hist->parsed()) return cmd_histogram(hist_args, out);
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const UnavailableError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitInternal;
}

} // namespace uncertain_eval::cli
