// dlgeo command-line driver.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <random>

#include "dlgeo/dlgeo.hpp"

using namespace dlgeo;
using nlohmann::json;

namespace {

struct Common {
    int threads = 0;
    std::string format = "csv";
    std::string output;
    int k_max = 2;
    double z_radius = 0.5;
    int z_nodes = 128;
};

std::string num(double v) {
    std::ostringstream o;
    o.precision(17);
    if (std::isfinite(v)) o << v;
    return o.str();
}

class Sink {
public:
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw DomainError("cannot open output file " + path);
        }
    }
    std::ostream& os() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

TruncationPolicy policy(const Common& c) {
    TruncationPolicy p;
    p.k_max = c.k_max;
    p.z_radius = c.z_radius;
    p.z_nodes = c.z_nodes;
    p.threads = c.threads;
    return p;
}

void check_format(const Common& c) {
    if (c.format != "csv" && c.format != "json") throw DomainError("--format must be csv or json");
}

int cmd_density(const Common& c, bool scaled, ScaledQuery sq, DensityQuery q) {
    check_format(c);
    if (scaled) q = to_density_query(sq);
    q.validate();
    const auto r = density_p(q, policy(c));
    Sink out(c.output);
    if (c.format == "json") {
        json j = r.to_json();
        j["ell1"] = q.ell1;
        j["ell2"] = q.ell2;
        j["x"] = q.x;
        j["s"] = q.s;
        out.os() << j.dump() << '\n';
    } else {
        out.os() << "component,k1,k2,log_mag,sign,est_error\n";
        for (const auto& t : r.terms)
            out.os() << "term," << t.k1 << ',' << t.k2 << ',' << num(t.value.log_mag) << ',' << t.value.sign() << ','
                     << num(t.est_error) << '\n';
        out.os() << "total,,," << num(r.value.log_mag) << ',' << r.value.sign() << ',' << num(r.truncation_estimate)
                 << '\n';
    }
    return 0;
}

int cmd_conditional(const Common& c, const std::vector<double>& Ls, double s, const std::vector<double>& ells,
                    const std::vector<double>& xs) {
    check_format(c);
    Sink out(c.output);
    if (c.format == "csv") out.os() << "L,s,ell,x,value,reference,ratio,log_f_gue\n";
    const auto pol = policy(c);
    for (double L : Ls)
        for (double ell : ells)
            for (double x : xs) {
                const auto r = conditional_rescaled_density({L, ell, x, s}, pol);
                if (c.format == "json") {
                    out.os() << json{{"L", L}, {"s", s}, {"ell", ell}, {"x", x}, {"value", r.value},
                                     {"reference", r.reference}, {"ratio", r.ratio()}, {"log_f_gue", r.log_f_gue}}
                                    .dump()
                             << '\n';
                } else {
                    out.os() << num(L) << ',' << num(s) << ',' << num(ell) << ',' << num(x) << ',' << num(r.value) << ','
                             << num(r.reference) << ',' << num(r.ratio()) << ',' << num(r.log_f_gue) << '\n';
                }
            }
    return 0;
}

int cmd_tw(const Common& c, double from, double to, double step, const std::string& method) {
    check_format(c);
    if (!(step > 0.0) || !(to >= from)) throw DomainError("tw: need step > 0 and to >= from");
    if (method != "painleve" && method != "fredholm") throw DomainError("tw: --method must be painleve or fredholm");
    const auto& tw = tracy_widom();
    Sink out(c.output);
    if (c.format == "csv") out.os() << "L,F,f,method\n";
    const int n = static_cast<int>(std::floor((to - from) / step + 1e-9)) + 1;
    for (int i = 0; i < n; ++i) {
        const double L = from + i * step;
        const double F = method == "painleve" ? tw.F(L) : fredholm_F(L);
        const double f = tw.f(L);
        if (c.format == "json")
            out.os() << json{{"L", L}, {"F", F}, {"f", f}, {"method", method}}.dump() << '\n';
        else
            out.os() << num(L) << ',' << num(F) << ',' << num(f) << ',' << method << '\n';
    }
    return 0;
}

int cmd_converge(const Common& c, const std::vector<double>& Ls, const std::vector<double>& ss,
                 const std::vector<double>& grid_flat) {
    check_format(c);
    if (grid_flat.size() % 2) throw DomainError("converge: --grid takes ell,x pairs");
    std::vector<std::pair<double, double>> grid;
    for (std::size_t i = 0; i < grid_flat.size(); i += 2) grid.emplace_back(grid_flat[i], grid_flat[i + 1]);
    ConvergenceOptions o;
    o.policy = policy(c);
    o.policy.estimate_error = false;
    Sink out(c.output);
    bool header = true;
    for (double s : ss) {
        const auto st = convergence_study(Ls, s, grid, o);
        if (c.format == "csv") {
            write_convergence_csv(out.os(), st, header);
            header = false;
            continue;
        }
        for (const auto& r : st.records) {
            json j{{"L", r.L}, {"s", r.s}, {"ell", r.ell}, {"x", r.x}, {"ok", r.ok}};
            j["ratio"] = r.ok ? json(r.ratio) : json(nullptr);
            j["abs_err"] = r.ok ? json(r.abs_err) : json(nullptr);
            if (!r.ok) j["error"] = r.error;
            out.os() << j.dump() << '\n';
        }
        const auto& f = st.fit;
        json a{{"aggregate", true}, {"s", s}, {"points", f.points}, {"monotone", f.monotone}};
        a["alpha_fit"] = std::isfinite(f.alpha) ? json(f.alpha) : json(nullptr);
        a["half_width"] = std::isfinite(f.half_width) ? json(f.half_width) : json(nullptr);
        a["coefficient"] = std::isfinite(f.coefficient) ? json(f.coefficient) : json(nullptr);
        out.os() << a.dump() << '\n';
    }
    return 0;
}

int cmd_verify(const Common& c, double budget, std::uint64_t seed, std::size_t mc_samples, double L, double s) {
    if (!(budget >= 1e4)) throw DomainError("verify: --budget must be at least 1e4");
    const auto q = to_density_query({L, 0.0, 0.0, s});
    const auto fam = build_saddle_contours(q);
    TermOptions to;
    to.threads = c.threads;
    const auto main = term_T({1, 1}, fam, to).value;
    std::vector<OracleReport> reports;

    // brute force on a shifted family, as many nodes as the budget allows
    SaddleContourOptions alt;
    alt.anchor_shift = 0.3;
    const auto fam_alt = build_saddle_contours(q, alt);
    int n = static_cast<int>(std::floor(std::pow(budget, 0.25)));
    std::optional<BruteForceResult> bf;
    for (; n >= 8 && !bf; n -= 4) {
        try {
            bf = t11_bruteforce_full(q, fam_alt, n, budget, c.threads);
        } catch (const BudgetError&) {
        }
    }
    if (!bf) throw BudgetError("verify: budget too small for the brute-force oracle");
    OracleReport b;
    b.target_id = "t11_bruteforce";
    b.main_value = main;
    b.oracle_value = bf->value;
    b.rel_diff = oracle_rel_diff(main, bf->value);
    b.threshold = 1e-4;
    b.budget_used = bf->evaluations;
    b.passed = b.rel_diff <= b.threshold;
    reports.push_back(b);

    const auto mc = mc_estimate(q, fam, mc_samples, seed, c.threads);
    OracleReport m;
    m.target_id = "t11_monte_carlo";
    m.main_value = main;
    m.oracle_value = mc.value;
    m.rel_diff = oracle_rel_diff(main, mc.value);
    m.threshold = 3.0 * mc.rel_std_err;
    m.budget_used = static_cast<double>(mc.samples);
    m.passed = m.rel_diff <= m.threshold;
    reports.push_back(m);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k1 = 1; k1 <= 2; ++k1)
        for (int k2 = 1; k2 <= 2; ++k2) {
            const cplx a{u(rng), u(rng)}, d{u(rng), u(rng)};
            auto inner = [&](unsigned mask) { return (a + double(mask)) / (d + 3.0 + double(std::popcount(mask))); };
            ZOptions zo;
            zo.radius = c.z_radius;
            zo.nodes = c.z_nodes;
            reports.push_back(z_methods_compare(k1, k2, inner, zo, 1e-10));
        }

    Sink out(c.output);
    bool ok = true;
    for (const auto& r : reports) {
        out.os() << r.to_json().dump() << '\n';
        ok = ok && r.passed;
    }
    return ok ? 0 : 1;
}

int cmd_contours(const Common& c, ScaledQuery sq, const std::string& family) {
    ContourFamily f;
    if (family == "saddle")
        f = build_saddle_contours(to_density_query(sq));
    else if (family == "paper")
        f = build_paper_contours(sq.L, sq.ell, sq.x, sq.s);
    else if (family == "lemma32")
        f = build_lemma32_contours(sq.L, {}, to_density_query(sq));
    else
        throw DomainError("contours: --family must be saddle, paper or lemma32");
    Sink out(c.output);
    write_grids_csv(out.os(), discretize(f));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Geodesic density of the directed landscape: evaluation, Tracy-Widom tables, convergence studies"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "key = value file; command-line flags take precedence");
    Common c;
    c.threads = default_threads();
    app.add_option("--threads", c.threads, "worker threads (default: $DLGEO_THREADS or hardware)")->check(CLI::Range(1, 1024));
    app.add_option("--format", c.format, "csv or json (json: one object per line)")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--output,-o", c.output, "write to this file instead of stdout");
    app.add_option("--k-max", c.k_max, "series truncation: terms with k1 + k2 <= k-max (2 or 3)");
    app.add_option("--z-radius", c.z_radius, "radius of the z circle, in (0,1)");
    app.add_option("--z-nodes", c.z_nodes, "trapezoid nodes on the z circle");

    auto* den = app.add_subcommand("density",
                                   "p(ell1, ell2, x; s). CSV columns: component (term|total), k1, k2, log_mag, sign, "
                                   "est_error (total row: truncation estimate)");
    bool scaled = false;
    ScaledQuery sq;
    DensityQuery q;
    den->add_flag("--scaled", scaled, "take (L, ell, x, s) and map to (L1, L2, X)");
    den->add_option("-L", sq.L, "endpoint value (scaled mode)");
    den->add_option("--ell", sq.ell, "rescaled value fluctuation (scaled mode)");
    den->add_option("--x", sq.x, "location: rescaled in scaled mode, raw X otherwise");
    den->add_option("--ell1", q.ell1);
    den->add_option("--ell2", q.ell2);
    den->add_option("-s", q.s, "time in (0,1)");

    auto* cond = app.add_subcommand("conditional",
                                    "conditional density of (ell, x) given L(1) = L. CSV columns: L, s, ell, x, value, "
                                    "reference (phi(ell) phi(x)), ratio, log_f_gue");
    std::vector<double> cL{16.0}, cell{0.0}, cx{0.0};
    double cs = 0.5;
    cond->add_option("-L", cL, "endpoint values")->delimiter(',');
    cond->add_option("-s", cs, "time in (0,1)");
    cond->add_option("--ell", cell, "ell values")->delimiter(',');
    cond->add_option("--x", cx, "x values")->delimiter(',');

    auto* tw = app.add_subcommand("tw", "Tracy-Widom GUE table. CSV columns: L, F (cdf), f (density), method");
    double from = -4.0, to = 4.0, step = 1.0;
    std::string method = "painleve";
    tw->add_option("--from", from);
    tw->add_option("--to", to);
    tw->add_option("--step", step);
    tw->add_option("--method", method, "route for F: painleve or fredholm");

    auto* conv = app.add_subcommand("converge",
                                    "convergence of the conditional density to phi(ell) phi(x). CSV columns: L, s, ell, "
                                    "x, ratio, abs_err, alpha_fit, aggregate (1 on the per-s fit row)");
    std::vector<double> vL{9.0, 16.0, 25.0}, vs{0.5, 0.7}, vgrid{0, 0, 1, 0, 0, 1, 1, 1, -1, 0};
    conv->add_option("-L", vL, "endpoint values")->delimiter(',');
    conv->add_option("-s", vs, "times")->delimiter(',');
    conv->add_option("--grid", vgrid, "flattened ell,x pairs")->delimiter(',');

    auto* ver = app.add_subcommand("verify",
                                   "independent oracles for T(1,1) and the z-integral; one JSON report per line, exit 1 "
                                   "if any fails");
    double budget = 1e8;
    std::uint64_t seed = 20240607;
    std::size_t mc_samples = 1 << 18;
    double vLq = 9.0, vsq = 0.5;
    ver->add_option("--budget", budget, "max integrand evaluations of the brute-force oracle");
    ver->add_option("--seed", seed, "Monte Carlo seed");
    ver->add_option("--mc-samples", mc_samples);
    ver->add_option("-L", vLq);
    ver->add_option("-s", vsq);

    auto* con = app.add_subcommand("contours",
                                   "discretized contours. CSV columns: contour_id, segment_id, node_re, node_im, "
                                   "weight_re, weight_im");
    ScaledQuery csq;
    std::string family = "saddle";
    con->add_option("-L", csq.L);
    con->add_option("--ell", csq.ell);
    con->add_option("--x", csq.x);
    con->add_option("-s", csq.s);
    con->add_option("--family", family, "saddle, paper or lemma32");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (c.k_max != 2 && c.k_max != 3) throw DomainError("--k-max must be 2 or 3");
        if (*den) {
            sq.s = q.s;
            q.x = sq.x;
            return cmd_density(c, scaled, sq, q);
        }
        if (*cond) return cmd_conditional(c, cL, cs, cell, cx);
        if (*tw) return cmd_tw(c, from, to, step, method);
        if (*conv) return cmd_converge(c, vL, vs, vgrid);
        if (*ver) return cmd_verify(c, budget, seed, mc_samples, vLq, vsq);
        if (*con) return cmd_contours(c, csq, family);
    } catch (const dlgeo::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
