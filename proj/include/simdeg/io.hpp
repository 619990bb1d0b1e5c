#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "simdeg/analytic.hpp"
#include "simdeg/errors.hpp"
#include "simdeg/exact.hpp"
#include "simdeg/model.hpp"
#include "simdeg/oracle.hpp"

namespace simdeg {

// All floating output carries 12 significant digits.
inline std::string fmt_g12(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

// Round a double to the 12 digits it would be printed with, so JSON numbers
// match the CSV text byte-for-byte after serialization.
inline double round_g12(double x) {
    return std::strtod(fmt_g12(x).c_str(), nullptr);
}

inline nlohmann::json instance_to_json(const Instance& inst, std::uint64_t seed) {
    nlohmann::json j;
    j["version"] = 1;
    j["params"] = {{"n", inst.params.n}, {"d", inst.params.d}, {"k", inst.params.k},
                   {"q", inst.params.q}, {"t", inst.params.t}};
    j["rng"] = {{"algorithm", "splitmix64"}, {"seed", seed}};
    nlohmann::json cs = nlohmann::json::array();
    for (const Constraint& con : inst.constraints) {
        nlohmann::json tuples = nlohmann::json::array();
        for (std::uint64_t rank : con.nogoods)
            tuples.push_back(decode_tuple(rank, inst.params.k, inst.params.d));
        cs.push_back({{"scope", con.scope}, {"nogoods", tuples}});
    }
    j["constraints"] = std::move(cs);
    return j;
}

inline Instance instance_from_json(const nlohmann::json& j, std::uint64_t* seed_out = nullptr) {
    try {
        if (j.at("version").get<int>() != 1)
            throw io_error("instance_from_json: unsupported version");
        const nlohmann::json& jp = j.at("params");
        Instance inst;
        inst.params.n = jp.at("n").get<int>();
        inst.params.d = jp.at("d").get<int>();
        inst.params.k = jp.at("k").get<int>();
        inst.params.q = jp.at("q").get<std::int64_t>();
        inst.params.t = jp.at("t").get<std::int64_t>();
        inst.params.validate();
        if (j.contains("rng")) {
            if (j.at("rng").at("algorithm").get<std::string>() != "splitmix64")
                throw io_error("instance_from_json: unknown rng algorithm");
            if (seed_out) *seed_out = j.at("rng").at("seed").get<std::uint64_t>();
        }
        const nlohmann::json& jc = j.at("constraints");
        if (static_cast<std::int64_t>(jc.size()) != inst.params.t)
            throw io_error("instance_from_json: constraint count differs from t");
        for (const nlohmann::json& je : jc) {
            Constraint con;
            con.scope = je.at("scope").get<std::vector<int>>();
            if (static_cast<int>(con.scope.size()) != inst.params.k)
                throw io_error("instance_from_json: scope size differs from k");
            for (std::size_t i = 0; i < con.scope.size(); ++i) {
                if (con.scope[i] < 0 || con.scope[i] >= inst.params.n)
                    throw io_error("instance_from_json: scope index out of range");
                if (i > 0 && con.scope[i] <= con.scope[i - 1])
                    throw io_error("instance_from_json: scope not ascending");
            }
            for (const nlohmann::json& jt : je.at("nogoods")) {
                std::vector<int> tuple = jt.get<std::vector<int>>();
                if (static_cast<int>(tuple.size()) != inst.params.k)
                    throw io_error("instance_from_json: nogood arity differs from k");
                con.nogoods.push_back(encode_tuple(tuple, inst.params.d));
            }
            if (static_cast<std::int64_t>(con.nogoods.size()) != inst.params.q)
                throw io_error("instance_from_json: nogood count differs from q");
            for (std::size_t i = 1; i < con.nogoods.size(); ++i)
                if (con.nogoods[i] <= con.nogoods[i - 1])
                    throw io_error("instance_from_json: nogoods not ascending by rank");
            inst.constraints.push_back(std::move(con));
        }
        return inst;
    } catch (const nlohmann::json::exception& e) {
        throw io_error(std::string("instance_from_json: malformed document: ") + e.what());
    }
}

// DIMACS CNF export of the d=2, q=1 slice. A nogood component with value 1 on
// variable v maps to the positive literal v+1, value 0 to -(v+1); a CNF model
// then corresponds to a solution under value = 1 - (literal truth value).
inline void write_dimacs(std::ostream& os, const Instance& inst) {
    if (inst.params.d != 2 || inst.params.q != 1)
        throw parameter_error("write_dimacs: requires d = 2, q = 1");
    os << "c random k-SAT instance, k=" << inst.params.k << " n=" << inst.params.n
       << " t=" << inst.params.t << "\n";
    os << "p cnf " << inst.params.n << " " << inst.params.t << "\n";
    for (const Constraint& con : inst.constraints) {
        std::vector<int> tuple = decode_tuple(con.nogoods.at(0), inst.params.k, 2);
        for (int i = 0; i < inst.params.k; ++i) {
            int lit = con.scope[static_cast<std::size_t>(i)] + 1;
            os << (tuple[static_cast<std::size_t>(i)] == 1 ? lit : -lit) << " ";
        }
        os << "0\n";
    }
    if (!os) throw io_error("write_dimacs: stream failure");
}

// Profile CSV: S,s,log_E,E with the linear column left empty past the
// double-precision overflow edge.
inline void write_profile_csv(std::ostream& os, const PairCountProfile& prof) {
    os << "S,s,log_E,E\n";
    for (int S = 0; S <= prof.n(); ++S) {
        const LogValue& w = prof.log_counts[static_cast<std::size_t>(S)];
        double s = static_cast<double>(S) / prof.n();
        os << S << "," << fmt_g12(s) << ",";
        if (w.is_zero()) {
            os << "-inf,0";
        } else {
            os << fmt_g12(w.log()) << ",";
            if (w.log() < 709.0) os << fmt_g12(std::exp(w.log()));
        }
        os << "\n";
    }
    if (!os) throw io_error("write_profile_csv: stream failure");
}

struct CurveRow {
    double r;
    double s_av;
    std::string branch;  // "one" | "three" | "threshold"
};

inline void write_curve_csv(std::ostream& os, std::span<const CurveRow> rows) {
    os << "r,s_av_inf,branch,d_av_inf\n";
    for (const CurveRow& row : rows)
        os << fmt_g12(row.r) << "," << fmt_g12(row.s_av) << "," << row.branch << ","
           << fmt_g12(1.0 - row.s_av) << "\n";
    if (!os) throw io_error("write_curve_csv: stream failure");
}

inline nlohmann::json portrait_to_json(const PhasePortrait& pp) {
    nlohmann::json j;
    j["k"] = pp.ctx.k;
    j["q"] = pp.ctx.q;
    j["d"] = pp.ctx.d;
    j["s01"] = round_g12(pp.s01);
    j["s02"] = round_g12(pp.s02);
    j["s03"] = round_g12(pp.s03);
    j["r_at_s01"] = round_g12(pp.r_at_s01);
    j["r_at_s03"] = round_g12(pp.r_at_s03);
    j["r_cr"] = round_g12(pp.r_cr);
    return j;
}

// Estimate CSV: S,s,count_or_mean,std_err.
inline void write_estimate_csv(std::ostream& os, const EnsembleEstimate& est) {
    os << "S,s,count_or_mean,std_err\n";
    for (std::size_t S = 0; S < est.mean_counts.size(); ++S) {
        double s = static_cast<double>(S) / est.params.n;
        os << S << "," << fmt_g12(s) << "," << fmt_g12(est.mean_counts[S]) << ","
           << fmt_g12(est.std_err[S]) << "\n";
    }
    if (!os) throw io_error("write_estimate_csv: stream failure");
}

inline nlohmann::json run_manifest_json(const ModelParams& p, EnsembleMode mode,
                                        std::uint64_t seed, std::uint64_t samples,
                                        std::uint64_t assignment_budget) {
    nlohmann::json j;
    j["params"] = {{"n", p.n}, {"d", p.d}, {"k", p.k}, {"q", p.q}, {"t", p.t}};
    j["mode"] = mode == EnsembleMode::exhaustive_ensemble ? "exhaustive_ensemble" : "monte_carlo";
    if (mode == EnsembleMode::monte_carlo) {
        j["seed"] = seed;
        j["samples"] = samples;
    }
    j["assignment_budget"] = assignment_budget;
    return j;
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream os(path);
    if (!os) throw io_error("cannot open for writing: " + path);
    os << text;
    if (!os) throw io_error("write failure: " + path);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw io_error("cannot open for reading: " + path);
    std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    if (is.bad()) throw io_error("read failure: " + path);
    return text;
}

}  // namespace simdeg
