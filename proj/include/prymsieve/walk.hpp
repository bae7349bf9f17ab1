#pragma once

#include <cmath>
#include <cstdint>
#include <exception>
#include <iomanip>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "prymsieve/error.hpp"
#include "prymsieve/factor.hpp"
#include "prymsieve/finite_group.hpp"
#include "prymsieve/prym.hpp"
#include "prymsieve/rng.hpp"
#include "prymsieve/stats.hpp"
#include "prymsieve/surface.hpp"

namespace prymsieve {

// --------------------------------------------------------------------------
// admissible generating sets

/// Finite symmetric generating set for the walk. Words document where each
/// matrix came from (parallel to `matrices` when present). The odd-relation
/// requirement is met by containing the identity, or by an explicit
/// attestation that the set satisfies one.
struct AdmissibleSet {
    std::vector<MCGWord> words;
    std::vector<IntMatrix> matrices;
    bool projective = false;  // compare elements up to sign (Prym side)
    bool attested_odd_relation = false;
};

struct AdmissibleReport {
    bool ok = false;
    bool symmetric = false;
    bool has_identity = false;
    std::string diagnostic;
};

inline AdmissibleReport validate_admissible(const AdmissibleSet& s) {
    if (s.matrices.empty()) throw config_error("validate_admissible: empty set");
    const std::size_t dim = s.matrices.front().dim();
    AdmissibleReport rep;
    auto canon = [&](const IntMatrix& m) {
        return s.projective ? PrymImage::canonical_sign(m) : m;
    };
    for (std::size_t i = 0; i < s.matrices.size(); ++i) {
        if (s.matrices[i].dim() != dim)
            throw config_error("validate_admissible: mixed matrix dimensions");
        if (canon(s.matrices[i]).is_identity()) rep.has_identity = true;
    }
    rep.symmetric = true;
    for (std::size_t i = 0; i < s.matrices.size(); ++i) {
        const IntMatrix inv = canon(s.matrices[i].inverse());
        bool found = false;
        for (const auto& m : s.matrices)
            if (canon(m) == inv) {
                found = true;
                break;
            }
        if (!found) {
            rep.symmetric = false;
            rep.diagnostic = "element " + std::to_string(i) +
                             (i < s.words.size() ? " (" + s.words[i].to_string() + ")" : "") +
                             " has no inverse in the set";
            break;
        }
    }
    if (rep.symmetric && !rep.has_identity && !s.attested_odd_relation)
        rep.diagnostic = "no identity element and no odd-relation attestation";
    rep.ok = rep.symmetric && (rep.has_identity || s.attested_odd_relation);
    return rep;
}

/// Homology-side walk alphabet: identity plus the Humphries-type twists
/// Da_i, Db_i (i = 1..g) and the chain twists Dc_i (i = 1..g-1), with
/// inverses. Their transvections generate the full Sp(2g, Z) image.
inline AdmissibleSet homology_walk_set(const SurfaceModel& s) {
    AdmissibleSet set;
    auto add = [&](const Letter& l) {
        set.words.push_back(MCGWord{l});
        set.matrices.push_back(letter_homology_matrix(l, s));
    };
    set.words.push_back(MCGWord{});
    set.matrices.push_back(IntMatrix::identity(s.dim()));
    const int g = static_cast<int>(s.genus());
    for (int e : {1, -1}) {
        for (int i = 1; i <= g; ++i) {
            add(twist_a(i, e));
            add(twist_b(i, e));
        }
        for (int i = 1; i < g; ++i) add(twist_chain(i, e));
    }
    return set;
}

/// Prym-side walk alphabet: identity plus every rho-generator letter
/// (t^(+-i), r^(i,j), u with all sign patterns) and their inverses.
inline AdmissibleSet prym_walk_set(const PrymModule& m) {
    AdmissibleSet set;
    set.projective = true;
    set.words.push_back(MCGWord{});
    set.matrices.push_back(IntMatrix::identity(m.rank()));
    for (const Letter& l : prym_generator_letters(m)) {
        for (int e : {1, -1}) {
            Letter le = l;
            le.exponent = e;
            set.words.push_back(MCGWord{le});
            set.matrices.push_back(rho_generator(le, m).matrix());
        }
    }
    return set;
}

// --------------------------------------------------------------------------
// PA-proxy classification

struct ClassifierSet {
    bool reducible = false;
    bool root_of_unity = false;
    bool power_substitution = false;
    bool always = false;  // test-only classifier: fires on everything

    bool any() const { return reducible || root_of_unity || power_substitution || always; }
};

struct ClassifyOutcome {
    bool fired = false;
    bool reducible = false;
    bool root_of_unity = false;
    bool power_substitution = false;
    bool indeterminate = false;
    std::string failure;  // reason when indeterminate
};

/// Applies the selected characteristic-polynomial conditions:
///   (a) reducible over Q, (b) has a root of unity among its roots,
///   (c) is a polynomial in x^d for some d >= 2.
/// A classifier failure (budget and the like) is reported as indeterminate,
/// never silently dropped.
inline ClassifyOutcome classify_pa_proxy(const IntPolynomial& f, const ClassifierSet& cs,
                                         const FactorOptions& fo = {}) {
    ClassifyOutcome out;
    if (cs.always) {
        out.fired = true;
        return out;
    }
    try {
        if (cs.reducible && is_reducible_Q(f, fo)) out.reducible = true;
        if (cs.root_of_unity && has_root_of_unity_root(f).has_value()) out.root_of_unity = true;
        if (cs.power_substitution && power_substitution(f).has_value())
            out.power_substitution = true;
    } catch (const budget_error& e) {
        out.indeterminate = true;
        out.failure = e.what();
        return out;
    } catch (const error& e) {
        out.indeterminate = true;
        out.failure = e.what();
        return out;
    }
    out.fired = out.reducible || out.root_of_unity || out.power_substitution;
    return out;
}

inline ClassifyOutcome classify_pa_proxy(const IntMatrix& mat, const ClassifierSet& cs,
                                         const FactorOptions& fo = {}) {
    return classify_pa_proxy(mat.char_poly(), cs, fo);
}

// --------------------------------------------------------------------------
// decay estimates and fitting

struct KRow {
    unsigned k = 0;
    std::size_t hits = 0;
    std::size_t n = 0;  // determinate samples at this k
    double proportion = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t indeterminate = 0;
};

struct DecayEstimate {
    std::vector<KRow> rows;
    bool fitted = false;
    double alpha = 0.0;
    double c = 0.0;
    double alpha_ci_low = 0.0;
    double alpha_ci_high = 0.0;
    std::size_t dropped_zero_cells = 0;
    std::size_t bootstrap_rounds = 0;
    std::size_t degenerate_resamples = 0;
    std::uint64_t seed = 0;
    std::size_t walks = 0;
};

namespace detail {

/// Least-squares fit of log(proportion) = log(c) - alpha*k over cells with
/// nonzero proportion; false when fewer than 3 such cells remain.
inline bool fit_log_linear(const std::vector<KRow>& rows, double& alpha, double& c,
                           std::size_t& dropped) {
    std::vector<double> xs, ys;
    dropped = 0;
    for (const auto& r : rows) {
        if (r.n == 0 || r.hits == 0) {
            ++dropped;
            continue;
        }
        xs.push_back(static_cast<double>(r.k));
        ys.push_back(std::log(static_cast<double>(r.hits) / static_cast<double>(r.n)));
    }
    if (xs.size() < 3) return false;
    const LinearFit f = least_squares(xs, ys);
    alpha = -f.slope;
    c = std::exp(f.intercept);
    return true;
}

/// Binomial(n, p) sample by inverse transform, expanding outward from the
/// mode; expected work O(sqrt(n p (1-p))).
inline std::size_t binomial_sample(std::size_t n, double p, Rng& rng) {
    if (p <= 0.0) return 0;
    if (p >= 1.0) return n;
    const double u = rng.unit();
    auto log_pmf = [&](std::size_t k) {
        const double kk = static_cast<double>(k), nn = static_cast<double>(n);
        return std::lgamma(nn + 1) - std::lgamma(kk + 1) - std::lgamma(nn - kk + 1) +
               kk * std::log(p) + (nn - kk) * std::log1p(-p);
    };
    const std::size_t mode = std::min<std::size_t>(
        n, static_cast<std::size_t>(static_cast<double>(n + 1) * p));
    double cum = std::exp(log_pmf(mode));
    if (u <= cum) return mode;
    std::size_t lo = mode, hi = mode;
    while (lo > 0 || hi < n) {
        if (hi < n) {
            ++hi;
            cum += std::exp(log_pmf(hi));
            if (u <= cum) return hi;
        }
        if (lo > 0) {
            --lo;
            cum += std::exp(log_pmf(lo));
            if (u <= cum) return lo;
        }
    }
    return mode;  // numerical leftover mass
}

}  // namespace detail

struct FitOptions {
    std::size_t bootstrap_rounds = 1000;
    std::uint64_t seed = 0;
};

/// Fit of Prob(w_k in Z) ~ c * exp(-alpha k) from per-k counts. Zero cells
/// are dropped (and counted); fewer than 3 usable cells is an error. The CI
/// for alpha is a percentile bootstrap, resampling each cell binomially.
inline DecayEstimate fit_decay(const std::vector<KRow>& rows, const FitOptions& opts = {}) {
    DecayEstimate est;
    est.rows = rows;
    est.seed = opts.seed;
    if (!detail::fit_log_linear(rows, est.alpha, est.c, est.dropped_zero_cells))
        throw config_error("fit_decay: need at least 3 k with nonzero proportion");
    est.fitted = true;
    std::vector<double> alphas;
    alphas.reserve(opts.bootstrap_rounds);
    for (std::size_t b = 0; b < opts.bootstrap_rounds; ++b) {
        Rng rng(derive_seed(opts.seed, stream::bootstrap, b));
        std::vector<KRow> resampled = rows;
        for (auto& r : resampled) {
            if (r.n == 0) continue;
            const double p = static_cast<double>(r.hits) / static_cast<double>(r.n);
            r.hits = detail::binomial_sample(r.n, p, rng);
        }
        double a = 0, c = 0;
        std::size_t dropped = 0;
        if (detail::fit_log_linear(resampled, a, c, dropped))
            alphas.push_back(a);
        else
            ++est.degenerate_resamples;
    }
    est.bootstrap_rounds = opts.bootstrap_rounds;
    if (!alphas.empty()) {
        est.alpha_ci_low = percentile(alphas, 0.025);
        est.alpha_ci_high = percentile(alphas, 0.975);
    }
    return est;
}

/// Noiseless variant for synthetic proportion series; no bootstrap.
inline DecayEstimate fit_decay_proportions(const std::vector<std::pair<unsigned, double>>& series) {
    std::vector<KRow> rows;
    for (const auto& [k, p] : series) {
        KRow r;
        r.k = k;
        r.n = 1'000'000'000;  // formal weight; only the ratio enters the fit
        r.hits = static_cast<std::size_t>(p * static_cast<double>(r.n));
        r.proportion = p;
        rows.push_back(r);
    }
    DecayEstimate est;
    est.rows = rows;
    std::vector<double> xs, ys;
    for (const auto& [k, p] : series) {
        if (p <= 0.0) {
            ++est.dropped_zero_cells;
            continue;
        }
        xs.push_back(static_cast<double>(k));
        ys.push_back(std::log(p));
    }
    if (xs.size() < 3)
        throw config_error("fit_decay: need at least 3 k with nonzero proportion");
    const LinearFit f = least_squares(xs, ys);
    est.alpha = -f.slope;
    est.c = std::exp(f.intercept);
    est.fitted = true;
    return est;
}

// --------------------------------------------------------------------------
// the walk experiment

enum class RepresentationKind { Homology, Prym };

struct WalkExperiment {
    AdmissibleSet sigma;
    RepresentationKind representation = RepresentationKind::Prym;
    unsigned k_max = 100;
    unsigned k_stride = 5;
    std::size_t walks = 20'000;
    std::uint64_t seed = 0;
    ClassifierSet classifiers;
    std::size_t workers = 1;
    std::size_t bootstrap_rounds = 1000;
    unsigned certificate_primes = 10;
};

/// Runs N independent left-to-right walks w_k = w(1)...w(k) with steps drawn
/// uniformly from the admissible set, classifying the product at every
/// checkpoint k in {stride, 2*stride, ..., k_max}.
///
/// Determinism: walk w draws from the stream (seed, walk, w) and the
/// classifier for checkpoint c of walk w from (seed, factor, w*64+c), so the
/// result is bit-identical for any worker count. The alpha CI is a
/// percentile bootstrap over whole walks, preserving within-walk dependence
/// across k.
inline DecayEstimate run_walks(const WalkExperiment& e) {
    const AdmissibleReport rep = validate_admissible(e.sigma);
    if (!rep.ok)
        throw config_error("run_walks: admissible set invalid: " + rep.diagnostic);
    if (e.k_stride < 1 || e.k_max < e.k_stride)
        throw config_error("run_walks: need 1 <= stride <= k_max");
    if (e.walks < 1) throw config_error("run_walks: need at least one walk");
    std::vector<unsigned> checkpoints;
    for (unsigned k = e.k_stride; k <= e.k_max; k += e.k_stride) checkpoints.push_back(k);
    if (checkpoints.size() > 64)
        throw config_error("run_walks: more than 64 checkpoints unsupported");

    const std::size_t n_sigma = e.sigma.matrices.size();
    const std::size_t n_walks = e.walks;
    std::vector<std::uint64_t> hit_mask(n_walks, 0), indet_mask(n_walks, 0);

    auto run_range = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t w = lo; w < hi; ++w) {
            Rng rng(derive_seed(e.seed, stream::walk, w));
            IntMatrix m = IntMatrix::identity(e.sigma.matrices.front().dim());
            std::size_t cp = 0;
            for (unsigned step = 1; step <= e.k_max && cp < checkpoints.size(); ++step) {
                m = m * e.sigma.matrices[rng.below(n_sigma)];
                if (step != checkpoints[cp]) continue;
                FactorOptions fo;
                fo.certificate_primes = e.certificate_primes;
                fo.seed = derive_seed(e.seed, stream::factor, w * 64 + cp);
                const ClassifyOutcome out = classify_pa_proxy(m, e.classifiers, fo);
                if (out.indeterminate)
                    indet_mask[w] |= std::uint64_t{1} << cp;
                else if (out.fired)
                    hit_mask[w] |= std::uint64_t{1} << cp;
                ++cp;
            }
        }
    };

    const std::size_t workers = std::max<std::size_t>(1, std::min(e.workers, n_walks));
    if (workers == 1) {
        run_range(0, n_walks);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(workers);
        const std::size_t chunk = (n_walks + workers - 1) / workers;
        for (std::size_t t = 0; t < workers; ++t) {
            const std::size_t lo = t * chunk;
            const std::size_t hi = std::min(n_walks, lo + chunk);
            pool.emplace_back([&, t, lo, hi] {
                try {
                    if (lo < hi) run_range(lo, hi);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& err : errors)
            if (err) std::rethrow_exception(err);
    }

    DecayEstimate est;
    est.seed = e.seed;
    est.walks = n_walks;
    for (std::size_t cp = 0; cp < checkpoints.size(); ++cp) {
        KRow row;
        row.k = checkpoints[cp];
        const std::uint64_t bit = std::uint64_t{1} << cp;
        for (std::size_t w = 0; w < n_walks; ++w) {
            if (indet_mask[w] & bit)
                ++row.indeterminate;
            else if (hit_mask[w] & bit)
                ++row.hits;
        }
        row.n = n_walks - row.indeterminate;
        if (row.n > 0) {
            row.proportion = static_cast<double>(row.hits) / static_cast<double>(row.n);
            const Interval ci = wilson_interval(row.hits, row.n);
            row.ci_low = ci.low;
            row.ci_high = ci.high;
        }
        est.rows.push_back(row);
    }

    double alpha = 0, c = 0;
    std::size_t dropped = 0;
    if (detail::fit_log_linear(est.rows, alpha, c, dropped)) {
        est.fitted = true;
        est.alpha = alpha;
        est.c = c;
        est.dropped_zero_cells = dropped;
        // walk-level percentile bootstrap
        std::vector<double> alphas;
        alphas.reserve(e.bootstrap_rounds);
        std::vector<KRow> resampled(est.rows.size());
        for (std::size_t b = 0; b < e.bootstrap_rounds; ++b) {
            Rng rng(derive_seed(e.seed, stream::bootstrap, b));
            for (std::size_t cp = 0; cp < est.rows.size(); ++cp) {
                resampled[cp] = KRow{};
                resampled[cp].k = est.rows[cp].k;
            }
            for (std::size_t draw = 0; draw < n_walks; ++draw) {
                const std::size_t w = rng.below(n_walks);
                for (std::size_t cp = 0; cp < est.rows.size(); ++cp) {
                    const std::uint64_t bit = std::uint64_t{1} << cp;
                    if (indet_mask[w] & bit) continue;
                    ++resampled[cp].n;
                    if (hit_mask[w] & bit) ++resampled[cp].hits;
                }
            }
            double a = 0, cc = 0;
            std::size_t dr = 0;
            if (detail::fit_log_linear(resampled, a, cc, dr))
                alphas.push_back(a);
            else
                ++est.degenerate_resamples;
        }
        est.bootstrap_rounds = e.bootstrap_rounds;
        if (!alphas.empty()) {
            est.alpha_ci_low = percentile(alphas, 0.025);
            est.alpha_ci_high = percentile(alphas, 0.975);
        }
    }
    return est;
}

// --------------------------------------------------------------------------
// sieve condition report

struct SieveCheckOptions {
    std::size_t exhaustive_cap = 100'000;  // census switches to sampling above this
    std::size_t samples = 100'000;
    std::uint64_t seed = 0;
    std::size_t closure_budget = 10'000'000;
    ModMatrix::Coeff gap_prime = 3;
    double gap_tol = 1e-6;
};

struct SieveConditionReport {
    unsigned genus = 0;
    std::vector<ModMatrix::Coeff> primes;

    // 1: property-tau evidence; a spectral gap on one finite quotient is
    // heuristic support, never a proof.
    GapEstimate cond1_gap;
    ModMatrix::Coeff cond1_prime = 0;
    bool cond1_positive = false;
    const bool cond1_heuristic = true;

    // 2: |PSp(2g-2, F_p)| <= p^((2g-2)^2), exact.
    bool cond2_all = true;
    std::vector<std::pair<ModMatrix::Coeff, bool>> cond2;

    // 3: pairwise non-isomorphic simple quotients, witnessed by distinct
    // orders (p >= 3 so the quotients are simple).
    bool cond3_distinct_orders = false;
    std::vector<Int> orders;

    // 4: reducible densities bounded away from 1.
    std::vector<CensusResult> cond4;
    bool cond4_bounded = false;
    double empirical_c = 0.0;  // 1 - max density bound over the primes
};

inline SieveConditionReport check_sieve_conditions(const PrymModule& m,
                                                   const std::vector<ModMatrix::Coeff>& primes,
                                                   const SieveCheckOptions& opts = {}) {
    if (primes.empty()) throw config_error("check_sieve_conditions: no primes given");
    SieveConditionReport rep;
    rep.genus = m.genus();
    rep.primes = primes;
    const unsigned half = static_cast<unsigned>(m.half_rank());
    const unsigned long d_exp = static_cast<unsigned long>(m.rank()) * m.rank();

    for (const auto p : primes) {
        if (p < 3)
            throw config_error("check_sieve_conditions: primes must be >= 3 (simplicity)");
        const FiniteGroupSpec spec(half, p, true);
        const Int order = group_order(spec);
        rep.orders.push_back(order);
        const bool ok = order <= int_pow(Int(static_cast<unsigned long>(p)), d_exp);
        rep.cond2.emplace_back(p, ok);
        rep.cond2_all = rep.cond2_all && ok;
    }

    rep.cond3_distinct_orders = true;
    for (std::size_t i = 0; i < rep.orders.size() && rep.cond3_distinct_orders; ++i)
        for (std::size_t j = i + 1; j < rep.orders.size(); ++j)
            if (rep.orders[i] == rep.orders[j]) {
                rep.cond3_distinct_orders = false;
                break;
            }

    double max_density_bound = 0.0;
    for (std::size_t pi = 0; pi < primes.size(); ++pi) {
        const FiniteGroupSpec spec(half, primes[pi], true);
        const bool exhaustive = rep.orders[pi] <= static_cast<unsigned long>(opts.exhaustive_cap);
        CensusResult census =
            exhaustive
                ? reducible_density(spec, CensusMode::Exhaustive, 0, 0, opts.exhaustive_cap)
                : reducible_density(spec, CensusMode::Sampled, opts.samples,
                                    derive_seed(opts.seed, stream::census, primes[pi]));
        max_density_bound = std::max(
            max_density_bound, exhaustive ? census.density : census.ci_high);
        rep.cond4.push_back(std::move(census));
    }
    rep.cond4_bounded = max_density_bound < 1.0;
    rep.empirical_c = 1.0 - max_density_bound;

    std::vector<ModMatrix> gap_gens;
    for (const Letter& l : prym_generator_letters(m))
        gap_gens.push_back(rho_generator(l, m).reduce_mod(opts.gap_prime));
    GapOptions gopts;
    gopts.budget = opts.closure_budget;
    gopts.projective = true;
    gopts.tol = opts.gap_tol;
    rep.cond1_prime = opts.gap_prime;
    rep.cond1_gap = cayley_spectral_gap(with_inverses(gap_gens, true), gopts);
    rep.cond1_positive = rep.cond1_gap.gap > 0.0;
    return rep;
}

// --------------------------------------------------------------------------
// plain-text emission

namespace detail {

inline std::string format_double(double v) {
    std::ostringstream out;
    out << std::setprecision(12) << v;
    return out.str();
}

}  // namespace detail

inline std::string walk_csv(const DecayEstimate& est) {
    std::ostringstream out;
    out << "k,hits,n,proportion,ci_low,ci_high,indeterminate\n";
    for (const auto& r : est.rows) {
        out << r.k << "," << r.hits << "," << r.n << "," << detail::format_double(r.proportion)
            << "," << detail::format_double(r.ci_low) << "," << detail::format_double(r.ci_high)
            << "," << r.indeterminate << "\n";
    }
    return out.str();
}

inline std::string census_csv(const std::vector<CensusResult>& rows) {
    std::ostringstream out;
    out << "spec,method,total,reducible,density,ci_low,ci_high,seed\n";
    for (const auto& r : rows) {
        out << r.spec.label() << ","
            << (r.method == CensusMode::Exhaustive ? "exhaustive" : "sampled") << "," << r.total
            << "," << r.reducible << "," << detail::format_double(r.density) << ","
            << detail::format_double(r.ci_low) << "," << detail::format_double(r.ci_high) << ","
            << r.seed << "\n";
    }
    return out.str();
}

}  // namespace prymsieve
