// simdeg: average similarity degree of solution pairs in random k-SAT and
// Model GB CSP ensembles. Subcommands: gen | analyze | finite | verify | sweep.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <simdeg/simdeg.hpp>

namespace {

using nlohmann::json;

unsigned env_threads() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const char* env = std::getenv("SIMDEG_THREADS");
    if (!env) return hw;
    long v = std::strtol(env, nullptr, 10);
    if (v < 1) throw simdeg::parameter_error("SIMDEG_THREADS must be a positive integer");
    return static_cast<unsigned>(v);
}

// --config <path>: JSON object mirroring the long flag names; command-line
// flags win over config values.
struct Overlay {
    json cfg;

    void load(const std::string& path) {
        try {
            cfg = json::parse(simdeg::read_text_file(path));
        } catch (const json::exception& e) {
            throw simdeg::parameter_error("config file " + path + " is not valid JSON: " +
                                          e.what());
        }
        if (!cfg.is_object())
            throw simdeg::parameter_error("config file " + path + " must hold a JSON object");
    }

    template <class T>
    void apply(const CLI::Option* opt, const char* key, T& var) const {
        if (cfg.is_null() || opt->count() > 0 || !cfg.contains(key)) return;
        try {
            var = cfg.at(key).get<T>();
        } catch (const json::exception& e) {
            throw simdeg::parameter_error(std::string("config key '") + key +
                                          "' has the wrong type: " + e.what());
        }
    }
};

struct OutputTarget {
    std::ofstream file;
    std::ostream& os;

    explicit OutputTarget(const std::string& path) : os(path.empty() ? std::cout : file) {
        if (!path.empty()) {
            file.open(path);
            if (!file) throw simdeg::io_error("cannot open for writing: " + path);
        }
    }
};

struct GenOpts {
    simdeg::ModelParams p{20, 2, 2, 1, 0};
    std::uint64_t seed = 1;
    bool ksat = false;
    std::string out, dimacs, config;
};

struct AnalyzeOpts {
    int k = 5, d = 2;
    std::int64_t q = 1;
    std::string out, curve, config;
    double r_min = 0.0, r_max = 0.0;
    std::int64_t r_steps = 201;
    bool have_min = false, have_max = false;
};

struct FiniteOpts {
    simdeg::ModelParams p{100, 2, 2, 1, 100};
    std::vector<std::string> conc;  // "center,eps" pairs
    std::string out, config;
};

std::pair<double, double> parse_conc_pair(const std::string& text) {
    std::size_t comma = text.find(',');
    if (comma == std::string::npos)
        throw simdeg::parameter_error("finite: --conc expects center,eps (got '" + text + "')");
    char* end = nullptr;
    double c = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + comma)
        throw simdeg::parameter_error("finite: bad --conc center in '" + text + "'");
    const char* tail = text.c_str() + comma + 1;
    double e = std::strtod(tail, &end);
    if (end == tail || *end != '\0')
        throw simdeg::parameter_error("finite: bad --conc eps in '" + text + "'");
    return {c, e};
}

struct VerifyOpts {
    simdeg::ModelParams p{2, 2, 2, 1, 1};
    std::string mode = "exhaustive";
    std::uint64_t samples = 10000, seed = 1;
    std::uint64_t max_instances = 1ull << 20, budget = simdeg::kDefaultAssignmentBudget;
    double z_max = 3.0, rel_tol = 1e-9;
    unsigned threads = 0;
    bool corrupt = false;
    std::string out, manifest, config;
};

struct SweepOpts {
    std::vector<int> k_list{5}, d_list{2};
    std::vector<std::int64_t> q_list{1};
    std::string out, config;
};

int run_gen(GenOpts& o) {
    if (o.ksat) {
        o.p.d = 2;
        o.p.q = 1;
    }
    o.p.validate();
    simdeg::Instance inst = simdeg::generate(o.p, o.seed);
    json doc = simdeg::instance_to_json(inst, o.seed);
    bool any_file = !o.out.empty() || !o.dimacs.empty();
    if (!o.out.empty()) simdeg::write_text_file(o.out, doc.dump(2) + "\n");
    if (!o.dimacs.empty()) {
        std::ofstream cnf(o.dimacs);
        if (!cnf) throw simdeg::io_error("cannot open for writing: " + o.dimacs);
        simdeg::write_dimacs(cnf, inst);
    }
    if (!any_file) {
        std::cout << doc.dump(2) << "\n";
        return 0;
    }
    std::cout << "gen: n=" << o.p.n << " d=" << o.p.d << " k=" << o.p.k << " q=" << o.p.q
              << " t=" << o.p.t << " r=" << simdeg::fmt_g12(o.p.ratio()) << " seed=" << o.seed;
    if (!o.out.empty()) std::cout << " -> " << o.out;
    if (!o.dimacs.empty()) std::cout << " dimacs -> " << o.dimacs;
    std::cout << "\n";
    return 0;
}

int run_analyze(const AnalyzeOpts& o) {
    simdeg::AnalyticContext ctx = simdeg::AnalyticContext::create(o.k, o.q, o.d);
    simdeg::PhasePortrait pp = simdeg::find_r_cr(ctx);  // throws regime_error -> exit 3
    json doc = simdeg::portrait_to_json(pp);
    if (o.out.empty()) {
        std::cout << doc.dump(2) << "\n";
    } else {
        simdeg::write_text_file(o.out, doc.dump(2) + "\n");
        std::cout << "analyze: k=" << o.k << " q=" << o.q << " d=" << o.d
                  << " r_cr=" << simdeg::fmt_g12(pp.r_cr) << " -> " << o.out << "\n";
    }
    if (!o.curve.empty()) {
        double lo = o.have_min ? o.r_min : 0.5 * pp.r_cr;
        double hi = o.have_max ? o.r_max : 1.5 * pp.r_cr;
        if (!(lo < hi)) throw simdeg::parameter_error("analyze: r grid needs r-min < r-max");
        if (o.r_steps < 2) throw simdeg::parameter_error("analyze: r-steps must be >= 2");
        if (!(lo >= 0.0)) throw simdeg::parameter_error("analyze: r-min must be >= 0");
        std::vector<simdeg::CurveRow> rows;
        for (std::int64_t i = 0; i < o.r_steps; ++i) {
            double r = lo + (hi - lo) * static_cast<double>(i) /
                                static_cast<double>(o.r_steps - 1);
            if (std::abs(r - pp.r_cr) <= simdeg::kThresholdGuardRel * pp.r_cr) {
                double s1 = simdeg::branch_inverse(pp, simdeg::Branch::one, r);
                double s3 = simdeg::branch_inverse(pp, simdeg::Branch::three, r);
                rows.push_back({r, s1, "threshold"});
                rows.push_back({r, s3, "threshold"});
            } else {
                simdeg::LimitSimilarity ls = simdeg::s_av_infinity(pp, r);
                rows.push_back({r, ls.value, simdeg::branch_name(ls.branch)});
            }
        }
        std::ofstream cs(o.curve);
        if (!cs) throw simdeg::io_error("cannot open for writing: " + o.curve);
        simdeg::write_curve_csv(cs, rows);
        std::cout << "analyze: curve (" << rows.size() << " rows) -> " << o.curve << "\n";
    }
    return 0;
}

int run_finite(const FiniteOpts& o) {
    std::vector<std::pair<double, double>> conc;
    for (const std::string& raw : o.conc) conc.push_back(parse_conc_pair(raw));
    simdeg::PairCountProfile prof = simdeg::expected_sat_pairs(o.p);
    OutputTarget target(o.out);
    simdeg::write_profile_csv(target.os, prof);
    target.os << "s_av=" << simdeg::fmt_g12(simdeg::avg_similarity_finite(prof)) << "\n";
    target.os << "log_E_N2=" << simdeg::fmt_g12(simdeg::second_moment_finite(prof).log())
              << "\n";
    for (const auto& [c, e] : conc) {
        double mass = simdeg::concentration_mass(prof, c, e);
        target.os << "conc_mass(" << simdeg::fmt_g12(c) << "," << simdeg::fmt_g12(e)
                  << ")=" << simdeg::fmt_g12(mass) << "\n";
    }
    if (!target.os) throw simdeg::io_error("finite: output stream failure");
    if (!o.out.empty())
        std::cout << "finite: n=" << o.p.n << " t=" << o.p.t << " -> " << o.out << "\n";
    return 0;
}

int run_verify(const VerifyOpts& o) {
    simdeg::EnsembleMode mode;
    if (o.mode == "exhaustive" || o.mode == "exhaustive_ensemble")
        mode = simdeg::EnsembleMode::exhaustive_ensemble;
    else if (o.mode == "mc" || o.mode == "monte_carlo")
        mode = simdeg::EnsembleMode::monte_carlo;
    else
        throw simdeg::parameter_error("verify: --mode must be exhaustive or mc");

    simdeg::EnsembleOptions eo;
    eo.max_instances = o.max_instances;
    eo.samples = o.samples;
    eo.seed = o.seed;
    eo.assignment_budget = o.budget;
    eo.threads = o.threads ? o.threads : env_threads();
    simdeg::EnsembleEstimate est = simdeg::ensemble_expected_counts(o.p, mode, eo);

    simdeg::PairCountProfile prof = simdeg::expected_sat_pairs(o.p);
    bool ok = true;
    double worst = 0.0;
    for (int S = 0; S <= o.p.n; ++S) {
        double formula = std::exp(prof.log_counts[static_cast<std::size_t>(S)].log());
        if (o.corrupt) formula *= 1.0 + 1e-3;  // self-test hook: force a mismatch
        double emp = est.mean_counts[static_cast<std::size_t>(S)];
        std::cout << "S=" << S << " formula=" << simdeg::fmt_g12(formula)
                  << " empirical=" << simdeg::fmt_g12(emp);
        if (mode == simdeg::EnsembleMode::exhaustive_ensemble) {
            double rel = std::abs(emp - formula) / formula;
            std::cout << " rel_err=" << simdeg::fmt_g12(rel) << "\n";
            worst = std::max(worst, rel);
            if (rel >= o.rel_tol) ok = false;
        } else {
            double se = est.std_err[static_cast<std::size_t>(S)];
            double diff = std::abs(emp - formula);
            double z = diff == 0.0 ? 0.0
                                   : (se > 0.0 ? diff / se
                                               : std::numeric_limits<double>::infinity());
            std::cout << " z=" << simdeg::fmt_g12(z) << "\n";
            worst = std::max(worst, z);
            if (!(z < o.z_max)) ok = false;
        }
    }
    if (!o.out.empty()) {
        std::ofstream cs(o.out);
        if (!cs) throw simdeg::io_error("cannot open for writing: " + o.out);
        simdeg::write_estimate_csv(cs, est);
    }
    if (!o.manifest.empty())
        simdeg::write_text_file(o.manifest,
                                simdeg::run_manifest_json(o.p, mode, o.seed, o.samples,
                                                          o.budget)
                                        .dump(2) +
                                    "\n");
    const char* label =
        mode == simdeg::EnsembleMode::exhaustive_ensemble ? "worst rel_err" : "worst z";
    std::cout << "verify: " << (ok ? "PASS" : "FAIL") << " (mode=" << o.mode
              << ", instances=" << est.instances_sampled << ", " << label << "="
              << simdeg::fmt_g12(worst) << ")\n";
    return ok ? 0 : 4;
}

int run_sweep(const SweepOpts& o) {
    OutputTarget target(o.out);
    for (int k : o.k_list) {
        for (std::int64_t q : o.q_list) {
            for (int d : o.d_list) {
                json line;
                line["k"] = k;
                line["q"] = q;
                line["d"] = d;
                try {
                    simdeg::AnalyticContext ctx = simdeg::AnalyticContext::create(k, q, d);
                    simdeg::RegimeInfo ri = simdeg::classify(ctx);
                    if (ri.regime == simdeg::Regime::two_roots) {
                        simdeg::PhasePortrait pp = simdeg::find_r_cr(ctx);
                        line = simdeg::portrait_to_json(pp);
                        line["regime"] = "two_roots";
                    } else {
                        line["regime"] = "no_transition";
                        line["s02"] = simdeg::round_g12(ri.s02);
                        line["r_prime_at_s02"] = simdeg::round_g12(ri.r_prime_at_s02);
                    }
                } catch (const simdeg::parameter_error& e) {
                    line["error"] = e.what();
                }
                target.os << line.dump() << "\n";
            }
        }
    }
    if (!target.os) throw simdeg::io_error("sweep: output stream failure");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"average similarity degree of random k-SAT / Model GB solution pairs"};
    app.require_subcommand(1);

    GenOpts g;
    CLI::App* gen = app.add_subcommand("gen", "generate a random instance");
    auto* g_n = gen->add_option("--n", g.p.n, "variable count");
    auto* g_d = gen->add_option("--d", g.p.d, "domain size");
    auto* g_k = gen->add_option("--k", g.p.k, "constraint arity");
    auto* g_q = gen->add_option("--q", g.p.q, "nogoods per constraint");
    auto* g_t = gen->add_option("--t", g.p.t, "constraint count");
    auto* g_seed = gen->add_option("--seed", g.seed, "rng seed");
    auto* g_out = gen->add_option("-o,--out", g.out, "instance JSON path");
    auto* g_dimacs = gen->add_option("--dimacs", g.dimacs, "DIMACS CNF path (d=2, q=1)");
    auto* g_ksat = gen->add_flag("--ksat", g.ksat, "force d=2, q=1");
    gen->add_option("--config", g.config, "JSON config mirroring the flags");

    AnalyzeOpts a;
    CLI::App* analyze = app.add_subcommand("analyze", "phase portrait and limit curves");
    auto* a_d = analyze->add_option("--d", a.d, "domain size");
    auto* a_q = analyze->add_option("--q", a.q, "nogoods per constraint");
    auto* a_k = analyze->add_option("--k", a.k, "constraint arity");
    auto* a_out = analyze->add_option("-o,--out", a.out, "portrait JSON path (default stdout)");
    auto* a_curve = analyze->add_option("--curve", a.curve, "limit-curve CSV path");
    auto* a_rmin = analyze->add_option("--r-min", a.r_min, "grid start (default 0.5 r_cr)");
    auto* a_rmax = analyze->add_option("--r-max", a.r_max, "grid end (default 1.5 r_cr)");
    auto* a_rsteps = analyze->add_option("--r-steps", a.r_steps, "grid point count");
    analyze->add_option("--config", a.config, "JSON config mirroring the flags");

    FiniteOpts f;
    CLI::App* finite = app.add_subcommand("finite", "exact finite-n profile");
    auto* f_n = finite->add_option("--n", f.p.n, "variable count");
    auto* f_d = finite->add_option("--d", f.p.d, "domain size");
    auto* f_k = finite->add_option("--k", f.p.k, "constraint arity");
    auto* f_q = finite->add_option("--q", f.p.q, "nogoods per constraint");
    auto* f_t = finite->add_option("--t", f.p.t, "constraint count");
    auto* f_out = finite->add_option("-o,--out", f.out, "profile CSV path (default stdout)");
    auto* f_conc = finite->add_option("--conc", f.conc, "concentration pair center,eps (repeatable)");
    finite->add_option("--config", f.config, "JSON config mirroring the flags");

    VerifyOpts v;
    CLI::App* verify = app.add_subcommand("verify", "oracle vs formula comparison");
    auto* v_n = verify->add_option("--n", v.p.n, "variable count");
    auto* v_d = verify->add_option("--d", v.p.d, "domain size");
    auto* v_k = verify->add_option("--k", v.p.k, "constraint arity");
    auto* v_q = verify->add_option("--q", v.p.q, "nogoods per constraint");
    auto* v_t = verify->add_option("--t", v.p.t, "constraint count");
    auto* v_mode = verify->add_option("--mode", v.mode, "exhaustive | mc");
    auto* v_samples = verify->add_option("--samples", v.samples, "MC sample count");
    auto* v_seed = verify->add_option("--seed", v.seed, "MC base seed");
    auto* v_zmax = verify->add_option("--z-max", v.z_max, "MC z-score threshold");
    auto* v_reltol = verify->add_option("--rel-tol", v.rel_tol, "exhaustive relative tolerance");
    auto* v_maxinst = verify->add_option("--max-instances", v.max_instances,
                                         "exhaustive ensemble budget");
    auto* v_budget = verify->add_option("--budget", v.budget, "assignment enumeration budget");
    auto* v_threads = verify->add_option("--threads", v.threads, "worker threads");
    auto* v_out = verify->add_option("-o,--out", v.out, "estimate CSV path");
    auto* v_manifest = verify->add_option("--manifest", v.manifest, "run manifest JSON path");
    verify->add_flag("--corrupt", v.corrupt, "perturb the formula side (self-test)")
        ->group("");  // hidden
    verify->add_option("--config", v.config, "JSON config mirroring the flags");

    SweepOpts s;
    CLI::App* sweep = app.add_subcommand("sweep", "portraits over (k, q, d) lists");
    auto* s_k = sweep->add_option("--k-list", s.k_list, "arities")->delimiter(',');
    auto* s_q = sweep->add_option("--q-list", s.q_list, "nogood counts")->delimiter(',');
    auto* s_d = sweep->add_option("--d-list", s.d_list, "domain sizes")->delimiter(',');
    auto* s_out = sweep->add_option("-o,--out", s.out, "JSON-lines path (default stdout)");
    sweep->add_option("--config", s.config, "JSON config mirroring the flags");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed()) {
            if (!g.config.empty()) {
                Overlay gcfg;
                gcfg.load(g.config);
                gcfg.apply(g_n, "n", g.p.n);
                gcfg.apply(g_d, "d", g.p.d);
                gcfg.apply(g_k, "k", g.p.k);
                gcfg.apply(g_q, "q", g.p.q);
                gcfg.apply(g_t, "t", g.p.t);
                gcfg.apply(g_seed, "seed", g.seed);
                gcfg.apply(g_out, "out", g.out);
                gcfg.apply(g_dimacs, "dimacs", g.dimacs);
                gcfg.apply(g_ksat, "ksat", g.ksat);
            }
            return run_gen(g);
        }
        if (analyze->parsed()) {
            if (!a.config.empty()) {
                Overlay cfg;
                cfg.load(a.config);
                cfg.apply(a_d, "d", a.d);
                cfg.apply(a_q, "q", a.q);
                cfg.apply(a_k, "k", a.k);
                cfg.apply(a_out, "out", a.out);
                cfg.apply(a_curve, "curve", a.curve);
                cfg.apply(a_rmin, "r-min", a.r_min);
                cfg.apply(a_rmax, "r-max", a.r_max);
                cfg.apply(a_rsteps, "r-steps", a.r_steps);
                if (cfg.cfg.contains("r-min")) a.have_min = true;
                if (cfg.cfg.contains("r-max")) a.have_max = true;
            }
            a.have_min = a.have_min || a_rmin->count() > 0;
            a.have_max = a.have_max || a_rmax->count() > 0;
            return run_analyze(a);
        }
        if (finite->parsed()) {
            if (!f.config.empty()) {
                Overlay cfg;
                cfg.load(f.config);
                cfg.apply(f_n, "n", f.p.n);
                cfg.apply(f_d, "d", f.p.d);
                cfg.apply(f_k, "k", f.p.k);
                cfg.apply(f_q, "q", f.p.q);
                cfg.apply(f_t, "t", f.p.t);
                cfg.apply(f_out, "out", f.out);
                cfg.apply(f_conc, "conc", f.conc);
            }
            return run_finite(f);
        }
        if (verify->parsed()) {
            if (!v.config.empty()) {
                Overlay cfg;
                cfg.load(v.config);
                cfg.apply(v_n, "n", v.p.n);
                cfg.apply(v_d, "d", v.p.d);
                cfg.apply(v_k, "k", v.p.k);
                cfg.apply(v_q, "q", v.p.q);
                cfg.apply(v_t, "t", v.p.t);
                cfg.apply(v_mode, "mode", v.mode);
                cfg.apply(v_samples, "samples", v.samples);
                cfg.apply(v_seed, "seed", v.seed);
                cfg.apply(v_zmax, "z-max", v.z_max);
                cfg.apply(v_reltol, "rel-tol", v.rel_tol);
                cfg.apply(v_maxinst, "max-instances", v.max_instances);
                cfg.apply(v_budget, "budget", v.budget);
                cfg.apply(v_threads, "threads", v.threads);
                cfg.apply(v_out, "out", v.out);
                cfg.apply(v_manifest, "manifest", v.manifest);
            }
            return run_verify(v);
        }
        if (sweep->parsed()) {
            if (!s.config.empty()) {
                Overlay cfg;
                cfg.load(s.config);
                cfg.apply(s_k, "k-list", s.k_list);
                cfg.apply(s_q, "q-list", s.q_list);
                cfg.apply(s_d, "d-list", s.d_list);
                cfg.apply(s_out, "out", s.out);
            }
            return run_sweep(s);
        }
    } catch (const simdeg::budget_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 5;
    } catch (const simdeg::regime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const simdeg::threshold_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const simdeg::parameter_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const simdeg::io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
