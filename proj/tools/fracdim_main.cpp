#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fracdim/constructors.hpp"
#include "fracdim/convexdim.hpp"
#include "fracdim/errors.hpp"

using namespace fracdim;
using ojson = nlohmann::ordered_json;

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// Radii are accepted as "a/b", "b^-n" or a plain decimal.
double parse_radius(const std::string& s) {
    auto num = [&](const std::string& t) {
        std::size_t pos = 0;
        double v = 0;
        try {
            v = std::stod(t, &pos);
        } catch (const std::exception&) {
            throw ParseError("bad number: " + t);
        }
        if (pos != t.size()) throw ParseError("bad number: " + t);
        return v;
    };
    if (auto k = s.find('/'); k != std::string::npos) {
        const double d = num(s.substr(k + 1));
        if (d == 0) throw ParseError("zero denominator: " + s);
        return num(s.substr(0, k)) / d;
    }
    if (auto k = s.find('^'); k != std::string::npos) {
        return std::pow(num(s.substr(0, k)), num(s.substr(k + 1)));
    }
    return num(s);
}

QValue parse_q(const std::string& s) {
    if (s == "inf" || s == "+inf") return QValue::plus_inf();
    if (s == "-inf") return QValue::minus_inf();
    std::size_t pos = 0;
    double q = 0;
    try {
        q = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw ParseError("bad q: " + s);
    }
    if (pos != s.size()) throw ParseError("bad q: " + s);
    return QValue::real(q);
}

std::pair<int, int> parse_levels(const std::string& s) {
    const auto k = s.find(':');
    if (k == std::string::npos) throw ParseError("levels must be A:B");
    int a = 0, b = 0;
    try {
        a = std::stoi(s.substr(0, k));
        b = std::stoi(s.substr(k + 1));
    } catch (const std::exception&) {
        throw ParseError("levels must be A:B");
    }
    if (a > b) throw ParseError("levels must satisfy A <= B");
    return {a, b};
}

Norm parse_norm(const std::string& s) {
    if (s == "linf") return Norm::Chebyshev;
    if (s == "l2") return Norm::Euclidean;
    throw ParseError("norm must be linf or l2");
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto k = s.find(sep, start);
        out.push_back(s.substr(start, k - start));
        if (k == std::string::npos) break;
        start = k + 1;
    }
    return out;
}

std::vector<Ball> parse_balls(const std::string& s, int dim) {
    std::vector<Ball> out;
    for (const auto& part : split(s, ';')) {
        const auto fields = split(part, ',');
        if (static_cast<int>(fields.size()) != dim + 1) {
            throw ParseError("each ball needs " + std::to_string(dim) +
                             " coordinates and a radius");
        }
        Ball b;
        for (int j = 0; j < dim; ++j) b.center.push_back(parse_radius(fields[j]));
        b.radius = parse_radius(fields[dim]);
        if (!(b.radius > 0)) throw ParseError("ball radius must be positive");
        out.push_back(std::move(b));
    }
    return out;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

ojson cell_json(const std::string& s) {
    if (s == "true") return true;
    if (s == "false") return false;
    if (s.empty()) return nullptr;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end && *end == '\0') return v;
    return s;
}

void emit(const Table& t, const std::string& format) {
    if (format == "csv") {
        std::string out;
        for (std::size_t j = 0; j < t.header.size(); ++j) {
            out += (j ? "," : "") + t.header[j];
        }
        out += "\n";
        for (const auto& row : t.rows) {
            for (std::size_t j = 0; j < row.size(); ++j) out += (j ? "," : "") + row[j];
            out += "\n";
        }
        std::fputs(out.c_str(), stdout);
    } else {
        ojson arr = ojson::array();
        for (const auto& row : t.rows) {
            ojson obj = ojson::object();
            for (std::size_t j = 0; j < row.size() && j < t.header.size(); ++j) {
                obj[t.header[j]] = cell_json(row[j]);
            }
            arr.push_back(std::move(obj));
        }
        std::fputs((arr.dump(2) + "\n").c_str(), stdout);
    }
}

Table series_table(const ScaleSeries& s, const DimEstimate& est,
                   const std::string& value_name) {
    Table t;
    t.header = {"n", "r", value_name, "ratio"};
    for (const auto& row : s.rows) {
        t.rows.push_back({std::to_string(row.n), fmt(row.r), fmt(row.log_value),
                          fmt(row.ratio)});
    }
    t.rows.push_back({"slope", "", fmt(est.slope_fit),
                      est.degenerate ? "degenerate" : ""});
    return t;
}

int run(int argc, char** argv) {
    CLI::App app{"dimension-like quantities of compact sets and finite measures"};
    app.require_subcommand(1);

    std::string set_file, mu_file, nu_file, profile_file, levels = "3:12";
    std::string q_str = "2", r_str, scales_str, ratios_str, norm_str = "linf";
    std::string format = "csv", balls_str, theta_str = "0.5", t_str, alpha_str;
    int n_level = 0, trials = 20;
    std::uint64_t seed = 0;
    std::vector<std::string> set_files;

    auto add_format = [&](CLI::App* c) {
        c->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
    };

    auto* dims = app.add_subcommand("dims", "box-counting series and estimate");
    dims->add_option("--set", set_file)->required();
    dims->add_option("--levels", levels);
    add_format(dims);

    auto* bsi = app.add_subcommand("bsi", "box separation index series");
    bsi->add_option("--set", set_file)->required();
    bsi->add_option("--levels", levels);
    add_format(bsi);

    auto* conv = app.add_subcommand("convdim", "uniform/convex dimensions");
    conv->add_option("--profile", profile_file);
    conv->add_option("--set", set_files);
    conv->add_option("--levels", levels);
    add_format(conv);

    auto* lq = app.add_subcommand("lq", "moment integrals and dimension profile");
    lq->add_option("--measure", mu_file)->required();
    lq->add_option("--q", q_str);
    lq->add_option("--r", r_str);
    lq->add_option("--scales", scales_str);
    lq->add_option("--norm", norm_str);
    add_format(lq);

    auto* dist = app.add_subcommand("dist", "Fortet-Mourier distance");
    dist->add_option("--mu", mu_file)->required();
    dist->add_option("--nu", nu_file)->required();
    dist->add_option("--norm", norm_str);
    add_format(dist);

    auto* probe = app.add_subcommand("probe", "perturbation stability probe");
    probe->add_option("--measure", mu_file)->required();
    probe->add_option("--r", r_str)->required();
    probe->add_option("--q", q_str);
    probe->add_option("--trials", trials);
    probe->add_option("--seed", seed)->required();
    probe->add_option("--norm", norm_str);
    add_format(probe);

    auto* moran = app.add_subcommand("moran", "Moran exponent of similarity ratios");
    moran->add_option("--ratios", ratios_str)->required();
    add_format(moran);

    auto* construct = app.add_subcommand("construct", "build certified measures");
    construct->require_subcommand(1);
    auto* c_up = construct->add_subcommand("packing-upper");
    auto* c_lo = construct->add_subcommand("packing-lower");
    for (auto* c : {c_up, c_lo}) {
        c->add_option("--set", set_file)->required();
        c->add_option("--t", t_str)->required();
        c->add_option("--alpha", alpha_str)->required();
        add_format(c);
    }
    auto* c_nu = construct->add_subcommand("imubsi");
    c_nu->add_option("--set", set_file)->required();
    c_nu->add_option("--n", n_level)->required();
    c_nu->add_option("--q", q_str);
    add_format(c_nu);

    auto* check = app.add_subcommand("check", "verify a stated inequality");
    check->require_subcommand(1);
    auto* k_nu = check->add_subcommand("imubsi");
    k_nu->add_option("--set", set_file)->required();
    k_nu->add_option("--n", n_level)->required();
    k_nu->add_option("--q", q_str);
    k_nu->add_option("--measure", mu_file)->required();
    k_nu->add_option("--theta", theta_str);
    add_format(k_nu);
    auto* k_lq = check->add_subcommand("jensen-lq");
    auto* k_l1 = check->add_subcommand("jensen-l1");
    for (auto* c : {k_lq, k_l1}) {
        c->add_option("--measure", mu_file)->required();
        c->add_option("--r", r_str)->required();
        c->add_option("--balls", balls_str)->required();
        c->add_option("--norm", norm_str);
        add_format(c);
    }
    k_lq->add_option("--q", q_str);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (dims->parsed()) {
        auto set = load_setspec(set_file);
        auto [a, b] = parse_levels(levels);
        const auto series = box_count_series(*set, a, b);
        const auto est = estimate_from_series(series, set->dim());
        emit(series_table(series, est, "log_count"), format);
    } else if (bsi->parsed()) {
        auto set = load_setspec(set_file);
        auto [a, b] = parse_levels(levels);
        const auto series = bsi_series(*set, a, b);
        const auto est = bsi_estimate(*set, a, b);
        emit(series_table(series, est, "log_components"), format);
    } else if (conv->parsed()) {
        RateProfile prof;
        if (!profile_file.empty()) {
            prof = load_profile(profile_file);
        } else if (!set_files.empty()) {
            std::vector<SetSpecPtr> sets;
            for (const auto& f : set_files) sets.push_back(load_setspec(f));
            auto [a, b] = parse_levels(levels);
            prof = profile_estimate(sets, a, b);
        } else {
            throw ParseError("convdim needs --profile or --set");
        }
        const auto cd = s_conv(prof);
        std::string w;
        for (std::size_t j = 0; j < cd.weights.size(); ++j) {
            w += (j ? ";" : "") + fmt(cd.weights[j]);
        }
        Table t;
        t.header = {"quantity", "value", "weights"};
        t.rows = {{"s_u", fmt(s_u(prof)), ""},
                  {"s_conv", fmt(cd.value), w},
                  {"s_conv_max", fmt(s_conv_max(prof)), ""}};
        emit(t, format);
    } else if (lq->parsed()) {
        const auto mu = load_measure(mu_file);
        const QValue q = parse_q(q_str);
        const Norm norm = parse_norm(norm_str);
        if (!scales_str.empty()) {
            std::vector<double> scales;
            for (const auto& s : split(scales_str, ',')) {
                scales.push_back(parse_radius(s));
            }
            const auto [series, est] = lq_profile(mu, scales, q, norm);
            Table t;
            t.header = {"r", "phi"};
            for (const auto& row : series.rows) {
                t.rows.push_back({fmt(row.r), fmt(row.ratio)});
            }
            t.rows.push_back({"slope", fmt(est.slope_fit)});
            emit(t, format);
        } else if (!r_str.empty()) {
            const double r = parse_radius(r_str);
            Table t;
            t.header = {"r", "phi", "log_I"};
            t.rows = {{fmt(r), fmt(phi(mu, r, q, norm)), fmt(log_I(mu, r, q, norm))}};
            emit(t, format);
        } else {
            throw ParseError("lq needs --r or --scales");
        }
    } else if (dist->parsed()) {
        const auto mu = load_measure(mu_file);
        const auto nu = load_measure(nu_file);
        const Norm norm = parse_norm(norm_str);
        Table t;
        t.header = {"primal", "dual"};
        t.rows = {{fmt(fm_distance(mu, nu, norm)), fmt(fm_distance_dual(mu, nu, norm))}};
        emit(t, format);
    } else if (probe->parsed()) {
        const auto mu = load_measure(mu_file);
        const auto rep = stability_probe(mu, parse_radius(r_str), parse_q(q_str),
                                         trials, seed, parse_norm(norm_str));
        Table t;
        t.header = {"passed", "delta", "trials"};
        t.rows = {{rep.passed ? "true" : "false", fmt(rep.delta),
                   std::to_string(rep.trials)}};
        emit(t, format);
        if (!rep.detail.empty()) std::fprintf(stderr, "%s\n", rep.detail.c_str());
    } else if (moran->parsed()) {
        std::vector<double> ratios;
        for (const auto& s : split(ratios_str, ',')) ratios.push_back(parse_radius(s));
        Table t;
        t.header = {"quantity", "value"};
        t.rows = {{"beta", fmt(moran_beta(ratios))}};
        emit(t, format);
    } else if (construct->parsed()) {
        PackedMeasure pm;
        bool have_r = true;
        if (c_nu->parsed()) {
            auto set = load_setspec(set_file);
            pm.mu = imubsi_nu(*set, n_level, parse_q(q_str).q);
            have_r = false;
        } else {
            auto set = load_setspec(set_file);
            const double tt = parse_radius(t_str);
            const double alpha = parse_radius(alpha_str);
            pm = c_up->parsed() ? packing_measure_upper(*set, tt, alpha)
                                : packing_measure_lower(*set, tt, alpha);
        }
        if (format == "json") {
            ojson doc = ojson::parse(serialize_measure(pm.mu));
            if (have_r) doc["r"] = pm.r;
            std::fputs((doc.dump(2) + "\n").c_str(), stdout);
        } else {
            Table t;
            t.header = {"atoms", "r"};
            t.rows = {{std::to_string(pm.mu.atoms.size()), have_r ? fmt(pm.r) : ""}};
            emit(t, format);
        }
    } else if (check->parsed()) {
        CheckResult res;
        if (k_nu->parsed()) {
            auto set = load_setspec(set_file);
            res = imubsi_check(*set, n_level, parse_q(q_str).q, load_measure(mu_file),
                               parse_radius(theta_str));
        } else {
            const auto mu = load_measure(mu_file);
            const auto balls = parse_balls(balls_str, mu.dim);
            const double r = parse_radius(r_str);
            const Norm norm = parse_norm(norm_str);
            res = k_lq->parsed()
                      ? jensen_lq_check(mu, balls, r, parse_q(q_str).q, norm)
                      : jensen_l1_check(mu, balls, r, norm);
        }
        Table t;
        t.header = {"lhs", "rhs", "pass", "params"};
        t.rows = {{fmt(res.lhs), fmt(res.rhs), res.pass ? "true" : "false", res.params}};
        emit(t, format);
        if (!res.pass) return 4;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const PreconditionError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
