#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "prymsieve/config.hpp"
#include "prymsieve/version.hpp"

namespace ps = prymsieve;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitBudget = 3;
constexpr int kExitInternal = 4;

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::int64_t seed = -1;
    std::int64_t workers = -1;
    std::int64_t budget_closure = -1;
    std::int64_t budget_adjacency = -1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "key=value config file");
    cmd->add_option("--out-dir", args.out_dir, "output directory (default: .)");
    cmd->add_option("--seed", args.seed, "seed override");
    cmd->add_option("--workers", args.workers, "worker thread override");
    cmd->add_option("--budget-closure", args.budget_closure, "group closure budget override");
    cmd->add_option("--budget-adjacency", args.budget_adjacency,
                    "adjacency table budget override");
}

ps::ExperimentConfig load_config(const CommonArgs& args, const std::string& command) {
    ps::ExperimentConfig cfg;
    if (!args.config_path.empty()) cfg = ps::ExperimentConfig::parse_file(args.config_path);
    if (args.seed >= 0) cfg.set("seed", std::to_string(args.seed));
    if (args.workers >= 0) cfg.set("workers", std::to_string(args.workers));
    if (args.budget_closure >= 0)
        cfg.set("budget_closure", std::to_string(args.budget_closure));
    if (args.budget_adjacency >= 0)
        cfg.set("budget_adjacency", std::to_string(args.budget_adjacency));
    cfg.set("command", command);
    return cfg;
}

ordered_json meta_block(const ps::ExperimentConfig& cfg) {
    ordered_json meta;
    meta["version"] = ps::version_string;
    meta["command"] = cfg.get_string("command", "");
    meta["config_hash"] = cfg.hash();
    meta["seed"] = cfg.get_u64("seed", 0);
    return meta;
}

std::string out_path(const CommonArgs& args, const std::string& name) {
    if (args.out_dir.empty() || args.out_dir == ".") return name;
    return args.out_dir + "/" + name;
}

int run_walk(const CommonArgs& args) {
    const ps::ExperimentConfig cfg = load_config(args, "walk");
    const ps::WalkExperiment exp = ps::walk_experiment_from_config(cfg);
    const ps::DecayEstimate est = ps::run_walks(exp);

    ps::atomic_write(out_path(args, "walk_rows.csv"), ps::walk_csv(est));

    ordered_json summary = meta_block(cfg);
    summary["representation"] =
        exp.representation == ps::RepresentationKind::Prym ? "prym" : "homology";
    summary["walks"] = est.walks;
    summary["k_max"] = exp.k_max;
    summary["k_stride"] = exp.k_stride;
    summary["sigma_size"] = exp.sigma.matrices.size();
    summary["fitted"] = est.fitted;
    if (est.fitted) {
        summary["alpha"] = est.alpha;
        summary["c"] = est.c;
        summary["alpha_ci"] = {est.alpha_ci_low, est.alpha_ci_high};
        summary["dropped_zero_cells"] = est.dropped_zero_cells;
        summary["bootstrap_rounds"] = est.bootstrap_rounds;
        summary["degenerate_resamples"] = est.degenerate_resamples;
    }
    ordered_json rows = ordered_json::array();
    std::size_t total_indeterminate = 0;
    for (const auto& r : est.rows) {
        ordered_json row;
        row["k"] = r.k;
        row["hits"] = r.hits;
        row["n"] = r.n;
        row["proportion"] = r.proportion;
        row["ci_low"] = r.ci_low;
        row["ci_high"] = r.ci_high;
        row["indeterminate"] = r.indeterminate;
        rows.push_back(row);
        total_indeterminate += r.indeterminate;
    }
    summary["total_indeterminate"] = total_indeterminate;
    summary["rows"] = rows;
    summary["config_canonical"] = cfg.canonical();
    ps::atomic_write(out_path(args, "walk_summary.json"), summary.dump(2) + "\n");
    std::cout << "walk: wrote " << out_path(args, "walk_rows.csv") << " and "
              << out_path(args, "walk_summary.json") << "\n";
    return kExitOk;
}

ps::FiniteGroupSpec spec_from_config(const ps::ExperimentConfig& cfg) {
    const auto n = static_cast<unsigned>(cfg.get_u64("group_n", 2));
    const auto p = static_cast<ps::ModMatrix::Coeff>(
        cfg.get_u64("group_p", cfg.get_u64("p", 3)));
    const bool projective = cfg.get_bool("group_projective", true);
    return ps::FiniteGroupSpec(n, p, projective);
}

int run_census(const CommonArgs& args) {
    const ps::ExperimentConfig cfg = load_config(args, "census");
    const ps::FiniteGroupSpec spec = spec_from_config(cfg);
    const std::size_t cap = cfg.get_u64("exhaustive_cap", 100'000);
    const std::size_t budget = cfg.get_u64("budget_closure", 10'000'000);
    const std::string mode_name = cfg.get_string("census_mode", "auto");
    ps::CensusMode mode;
    if (mode_name == "exhaustive")
        mode = ps::CensusMode::Exhaustive;
    else if (mode_name == "sampled")
        mode = ps::CensusMode::Sampled;
    else if (mode_name == "auto")
        mode = ps::group_order(spec) <= static_cast<unsigned long>(cap)
                   ? ps::CensusMode::Exhaustive
                   : ps::CensusMode::Sampled;
    else
        throw ps::config_error("census_mode must be exhaustive, sampled, or auto");
    const std::size_t samples = cfg.get_u64("samples", 100'000);
    const std::uint64_t seed = cfg.get_u64("seed", 0);
    const ps::CensusResult res = ps::reducible_density(
        spec, mode, samples, seed, mode == ps::CensusMode::Exhaustive ? budget : 0);

    ps::atomic_write(out_path(args, "census.csv"), ps::census_csv({res}));
    ordered_json meta = meta_block(cfg);
    meta["spec"] = spec.label();
    meta["method"] = mode == ps::CensusMode::Exhaustive ? "exhaustive" : "sampled";
    meta["total"] = res.total;
    meta["reducible"] = res.reducible;
    meta["density"] = res.density;
    meta["ci"] = {res.ci_low, res.ci_high};
    meta["config_canonical"] = cfg.canonical();
    ps::atomic_write(out_path(args, "census_meta.json"), meta.dump(2) + "\n");
    std::cout << "census: " << spec.label() << " density " << res.density << "\n";
    return kExitOk;
}

int run_gap(const CommonArgs& args) {
    const ps::ExperimentConfig cfg = load_config(args, "gap");
    const ps::FiniteGroupSpec spec = spec_from_config(cfg);
    const std::string source = cfg.get_string("generator_source", "standard");
    std::vector<ps::ModMatrix> gens;
    if (source == "standard") {
        gens = ps::with_inverses(ps::standard_transvection_generators(spec), spec.projective());
    } else if (source == "prym") {
        const auto genus = static_cast<unsigned>(cfg.get_u64("genus", spec.n() + 1));
        const ps::PrymModule mod(genus);
        if (mod.half_rank() != spec.n())
            throw ps::config_error("gap: genus and group_n disagree");
        std::vector<ps::ModMatrix> images;
        for (const ps::Letter& l : ps::prym_generator_letters(mod))
            images.push_back(ps::rho_generator(l, mod).reduce_mod(spec.p()));
        gens = ps::with_inverses(images, spec.projective());
    } else {
        throw ps::config_error("generator_source must be standard or prym");
    }
    ps::GapOptions gopts;
    gopts.budget = cfg.get_u64("budget_closure", 10'000'000);
    gopts.adjacency_budget = cfg.get_u64("budget_adjacency", 100'000'000);
    gopts.projective = spec.projective();
    gopts.tol = cfg.get_double("gap_tol", 1e-6);
    gopts.seed = cfg.get_u64("seed", 1);
    const ps::GapEstimate est = ps::cayley_spectral_gap(gens, gopts);

    ordered_json out = meta_block(cfg);
    out["spec"] = spec.label();
    out["generator_source"] = source;
    out["degree"] = est.degree;
    out["group_size"] = est.group_size;
    out["lambda2"] = est.lambda2;
    out["gap"] = est.gap;
    out["iterations"] = est.iterations;
    out["heuristic"] = true;
    out["note"] = "spectral gap of one finite quotient; evidence, not a proof";
    out["config_canonical"] = cfg.canonical();
    ps::atomic_write(out_path(args, "gap.json"), out.dump(2) + "\n");
    std::cout << "gap: " << spec.label() << " gap " << est.gap << "\n";
    return kExitOk;
}

int run_check_sieve(const CommonArgs& args) {
    const ps::ExperimentConfig cfg = load_config(args, "check-sieve");
    const auto genus = static_cast<unsigned>(cfg.get_u64("genus", 3));
    const ps::PrymModule mod(genus);
    std::vector<ps::ModMatrix::Coeff> primes;
    for (const std::uint64_t p : cfg.get_u64_list("primes", {3, 5, 7}))
        primes.push_back(static_cast<ps::ModMatrix::Coeff>(p));
    ps::SieveCheckOptions opts;
    opts.exhaustive_cap = cfg.get_u64("exhaustive_cap", 100'000);
    opts.samples = cfg.get_u64("samples", 100'000);
    opts.seed = cfg.get_u64("seed", 0);
    opts.closure_budget = cfg.get_u64("budget_closure", 10'000'000);
    opts.gap_prime = static_cast<ps::ModMatrix::Coeff>(cfg.get_u64("gap_prime", 3));
    const ps::SieveConditionReport rep = ps::check_sieve_conditions(mod, primes, opts);

    ordered_json out = meta_block(cfg);
    out["genus"] = rep.genus;
    out["primes"] = rep.primes;
    {
        ordered_json c1;
        c1["group"] = ps::FiniteGroupSpec(static_cast<unsigned>(mod.half_rank()),
                                          rep.cond1_prime, true)
                          .label();
        c1["gap"] = rep.cond1_gap.gap;
        c1["lambda2"] = rep.cond1_gap.lambda2;
        c1["group_size"] = rep.cond1_gap.group_size;
        c1["degree"] = rep.cond1_gap.degree;
        c1["positive"] = rep.cond1_positive;
        c1["heuristic"] = rep.cond1_heuristic;
        c1["note"] = "spectral gap of one finite quotient; evidence, not a proof";
        out["condition1"] = c1;
    }
    {
        ordered_json per = ordered_json::array();
        for (std::size_t i = 0; i < rep.cond2.size(); ++i) {
            ordered_json row;
            row["p"] = rep.cond2[i].first;
            row["order"] = rep.orders[i].get_str();
            row["bound_exponent"] = mod.rank() * mod.rank();
            row["ok"] = rep.cond2[i].second;
            per.push_back(row);
        }
        ordered_json c2;
        c2["all_within_bound"] = rep.cond2_all;
        c2["per_prime"] = per;
        out["condition2"] = c2;
    }
    {
        ordered_json c3;
        c3["distinct_orders"] = rep.cond3_distinct_orders;
        ordered_json orders = ordered_json::array();
        for (const auto& o : rep.orders) orders.push_back(o.get_str());
        c3["orders"] = orders;
        out["condition3"] = c3;
    }
    {
        ordered_json rows = ordered_json::array();
        for (const auto& r : rep.cond4) {
            ordered_json row;
            row["spec"] = r.spec.label();
            row["method"] = r.method == ps::CensusMode::Exhaustive ? "exhaustive" : "sampled";
            row["total"] = r.total;
            row["reducible"] = r.reducible;
            row["density"] = r.density;
            row["ci"] = {r.ci_low, r.ci_high};
            rows.push_back(row);
        }
        ordered_json c4;
        c4["bounded_away_from_one"] = rep.cond4_bounded;
        c4["empirical_c"] = rep.empirical_c;
        c4["census"] = rows;
        out["condition4"] = c4;
    }
    out["all_pass"] = rep.cond1_positive && rep.cond2_all && rep.cond3_distinct_orders &&
                      rep.cond4_bounded;
    out["config_canonical"] = cfg.canonical();
    ps::atomic_write(out_path(args, "sieve_report.json"), out.dump(2) + "\n");
    std::cout << "check-sieve: genus " << rep.genus << " all_pass "
              << (out["all_pass"].get<bool>() ? "true" : "false") << "\n";
    return kExitOk;
}

int run_rep_dump(const CommonArgs& args, const std::string& rep_name, unsigned genus,
                 const std::string& word_text, std::int64_t mod_p, bool char_poly) {
    const ps::ExperimentConfig cfg = load_config(args, "rep-dump");
    const ps::MCGWord word = ps::MCGWord::parse(word_text);
    ps::IntMatrix m = [&] {
        if (rep_name == "homology") {
            const ps::SurfaceModel s(genus);
            return ps::homology_matrix(word, s);
        }
        if (rep_name == "prym") {
            const ps::PrymModule pm(genus);
            return ps::rho_word(word, pm).matrix();
        }
        throw ps::config_error("rep must be 'homology' or 'prym'");
    }();
    if (mod_p >= 2) {
        std::cout << m.reduce_mod(static_cast<ps::ModMatrix::Coeff>(mod_p)).to_string();
    } else {
        std::cout << m.to_string();
    }
    if (char_poly) std::cout << "charpoly: " << m.char_poly().to_string() << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"random-walk and finite-quotient experiments for surface group "
                 "representations"};
    app.set_version_flag("--version", std::string(ps::version_string));
    app.require_subcommand(1);

    CommonArgs walk_args, census_args, gap_args, sieve_args, dump_args;
    CLI::App* walk = app.add_subcommand("walk", "run the decay experiment");
    add_common(walk, walk_args);
    CLI::App* census = app.add_subcommand("census", "reducible char-poly density of a group");
    add_common(census, census_args);
    CLI::App* gap = app.add_subcommand("gap", "Cayley graph spectral gap of a group");
    add_common(gap, gap_args);
    CLI::App* sieve = app.add_subcommand("check-sieve", "verify the sieve conditions");
    add_common(sieve, sieve_args);

    CLI::App* dump = app.add_subcommand("rep-dump", "print the image of a word");
    add_common(dump, dump_args);
    std::string dump_rep = "prym";
    unsigned dump_genus = 3;
    std::string dump_word;
    std::int64_t dump_mod = 0;
    bool dump_char_poly = false;
    dump->add_option("--rep", dump_rep, "homology or prym (default: prym)");
    dump->add_option("--genus", dump_genus, "surface genus (default: 3)");
    dump->add_option("--word", dump_word, "whitespace-separated letters")->required();
    dump->add_option("--mod", dump_mod, "reduce the matrix mod this prime");
    dump->add_flag("--char-poly", dump_char_poly, "also print the characteristic polynomial");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (walk->parsed()) return run_walk(walk_args);
        if (census->parsed()) return run_census(census_args);
        if (gap->parsed()) return run_gap(gap_args);
        if (sieve->parsed()) return run_check_sieve(sieve_args);
        if (dump->parsed())
            return run_rep_dump(dump_args, dump_rep, dump_genus, dump_word, dump_mod,
                                dump_char_poly);
        std::cerr << "no subcommand\n";
        return kExitConfig;
    } catch (const ps::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ps::budget_error& e) {
        std::cerr << "budget exhausted: " << e.what() << "\n";
        return kExitBudget;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}
